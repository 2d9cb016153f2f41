#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace expbasis {

// Regular step function on [0,1]: b_j on [(j-1)/N, j/N), the last cell closed.
class StepProfile {
public:
    explicit StepProfile(std::vector<double> values);

    int steps() const { return static_cast<int>(values_.size()); }
    std::span<const double> values() const { return values_; }
    double value(int cell) const { return values_.at(static_cast<std::size_t>(cell)); }

    // 0-based cell holding y under the half-open convention.
    int cell_index(double y) const;
    double operator()(double y) const { return values_[static_cast<std::size_t>(cell_index(y))]; }

    double cell_lower(int cell) const { return static_cast<double>(cell) / steps(); }
    double cell_upper(int cell) const { return static_cast<double>(cell + 1) / steps(); }

    bool bounded_by_one() const;

private:
    std::vector<double> values_;
};

enum class Continuity { continuous, piecewise_continuous };

// The boundary function f of a trapezoid {|x| <= f(y), 0 <= y <= 1}, with
// declared bounds lower <= f <= upper. Jump points must be declared for
// piecewise-continuous profiles.
class ProfileFunction {
public:
    using Evaluator = std::function<double(double)>;

    ProfileFunction(Evaluator f, double lower, double upper, std::vector<double> jumps = {},
                    std::string description = {});

    static ProfileFunction constant(double value);
    static ProfileFunction from_step(const StepProfile& step);
    // Piecewise-linear interpolation through (ys[i], fs[i]); ys must cover [0,1].
    static ProfileFunction from_samples(std::vector<double> ys, std::vector<double> fs);

    double operator()(double y) const { return f_(y); }
    // Right-hand limit; differs from operator() only at declared jumps.
    double right_limit(double y) const;

    double lower_bound() const { return lower_; }
    double upper_bound() const { return upper_; }
    Continuity continuity() const {
        return jumps_.empty() ? Continuity::continuous : Continuity::piecewise_continuous;
    }
    std::span<const double> jumps() const { return jumps_; }
    const std::optional<StepProfile>& step() const { return step_; }
    const std::string& description() const { return description_; }

    // c * f with bounds scaled accordingly.
    ProfileFunction scaled(double c) const;

private:
    Evaluator f_;
    double lower_;
    double upper_;
    std::vector<double> jumps_;
    std::string description_;
    std::optional<StepProfile> step_;
};

struct Trapezoid {
    ProfileFunction profile;

    // \int_0^1 2 f(y) dy
    double area() const;
    bool contains(double x, double y) const;
};

struct Segment {
    double left;
    double right;
    double length() const { return right - left; }
};

// Finite union of disjoint open intervals, ordered left to right.
class MultiInterval {
public:
    explicit MultiInterval(std::vector<Segment> segments);

    std::span<const Segment> segments() const { return segments_; }
    double total_length() const;
    Segment hull() const { return {segments_.front().left, segments_.back().right}; }
    bool contains(double x) const;

private:
    std::vector<Segment> segments_;
};

// |S^{d-2}|, the measure of the unit sphere of R^{d-1}; equals 1 for d = 2.
double unit_sphere_measure(int dimension);

class SphericalTrapezoid {
public:
    SphericalTrapezoid(ProfileFunction profile, int dimension);

    const ProfileFunction& profile() const { return profile_; }
    int dimension() const { return dimension_; }
    double sphere_measure() const { return unit_sphere_measure(dimension_); }
    // |S^{d-2}| \int_0^1 f^{d-1}/(d-1) dy
    double volume() const;

private:
    ProfileFunction profile_;
    int dimension_;
};

struct ProfileValidation {
    int grid_size = 0;
    double min = 0.0;
    double max = 0.0;
    std::vector<double> violations;  // grid points with f outside [lower, upper]
    bool ok() const { return violations.empty(); }
};

// Samples f on y_i = i/(grid_size-1). Throws admissibility errors when the
// empirical minimum is not positive.
ProfileValidation validate_profile(const ProfileFunction& profile, int grid_size);

struct ApproximationOptions {
    int audit_grid = 10000;
    int max_partitions = 1 << 20;
};

struct StepApproximation {
    int n = 0;
    StepProfile step;          // in the original scale of f
    int partitions = 0;        // N
    double scale = 1.0;        // sup f used for normalisation
    double inverse_error = 0;  // sup |1/s - 1/f| of the normalised pair on the audit grid
    double uniform_error = 0;  // sup |s - f| of the normalised pair on the audit grid
    int audit_grid = 0;
    std::vector<int> schedule;  // partition counts tried, in order
};

// Regular step approximation s_n with sup|1/s_n - 1/f| < 1/(4n) after
// normalising sup f = 1. s_n takes the right limit of f at each cell's left
// endpoint; N runs over base * 2^m where base puts every declared jump on
// the cell grid.
StepApproximation approximate_profile(const ProfileFunction& profile, int n,
                                      const ApproximationOptions& options = {});

// I = U_j (-b_j + 2(j-1), b_j + 2(j-1)); requires every b_j <= 1.
MultiInterval build_multiinterval(const StepProfile& step);

struct Translation {
    int dx;
    int dy;
};

// v_j = (2(j-1), -(j-1)) in units of the cell height.
std::vector<Translation> translation_plan(const StepProfile& step);

}  // namespace expbasis
