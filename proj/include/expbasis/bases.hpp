#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "expbasis/domains.hpp"

namespace expbasis {

using cplx = std::complex<double>;

// Elements are exp(i * s * (freq_x * x + freq_y * y)) with s = 1, pi or 2 pi.
enum class PhaseConvention { unit, pi, two_pi };

double phase_factor(PhaseConvention c);
const char* convention_name(PhaseConvention c);

// The x-frequency of element n at height y.
class XFrequency {
public:
    enum class Kind { constant, over_profile, custom };
    using Coefficient = std::function<double(int)>;
    using Custom = std::function<double(int, double)>;

    // freq = c(n)
    static XFrequency constant(Coefficient c);
    // freq = c(n) / h(y), h the half-width (profile value) of the region
    static XFrequency over_profile(Coefficient c);
    // freq = g(n, y)
    static XFrequency custom(Custom g);

    Kind kind() const { return kind_; }
    double coefficient(int n) const { return coefficient_(n); }
    double operator()(int n, double y, double half_width) const;

private:
    Kind kind_ = Kind::constant;
    Coefficient coefficient_;
    Custom custom_;
};

// Per-n profile perturbation g_n. A ratio family has f/g_n = c(n)/n for an
// exponent c(n), so exp(i pi n x / g_n) = exp(i pi c(n) x / f) and the ratio
// is independent of y. For every kind, n = 0 maps to the x-independent
// element (frequency 0).
class PerturbationFamily {
public:
    enum class Kind { identity, ratio, custom };

    static PerturbationFamily identity();
    static PerturbationFamily ratio(std::function<double(int)> exponent, std::string name);
    static PerturbationFamily custom(std::function<double(int, double)> g, std::string name);

    Kind kind() const { return kind_; }
    const std::string& name() const { return name_; }

    // c(n); n itself for the identity.
    double exponent(int n) const;
    // g_n(y); 0 for n = 0 in the ratio case (the Ingham convention).
    double g(int n, double y, const ProfileFunction& f) const;

    // n / g_n(y) on the trapezoid bounded by f.
    XFrequency trapezoid_frequencies() const;
    // n f(y) / g_n(y), the exponent after mapping the trapezoid onto
    // [-1,1] x [0,1].
    XFrequency rectangle_frequencies(const ProfileFunction& f) const;

private:
    Kind kind_ = Kind::identity;
    std::string name_ = "identity";
    std::function<double(int)> exponent_;
    std::function<double(int, double)> custom_;
};

// Integration domain shared by the elements of a family. Planar regions are
// {|x| <= h(y), y0 <= y <= y1}; radial regions use r = |x'| in [0, h(y)] with
// measure |S^{d-2}| r^{d-2} dr dy.
class Region {
public:
    enum class Kind { planar, radial };
    struct Cell {
        double y_lower;
        double y_upper;
        double half_width;
    };

    static Region trapezoid(const ProfileFunction& profile);
    static Region rectangle(double half_width, double y_lower, double y_upper);
    static Region spherical(const SphericalTrapezoid& trapezoid);

    Kind kind() const { return kind_; }
    double y_lower() const { return y_lower_; }
    double y_upper() const { return y_upper_; }
    double half_width(double y) const;
    std::span<const double> breakpoints() const { return breakpoints_; }
    // Piecewise-constant description, when the boundary is a step function.
    const std::vector<Cell>* cells() const { return cells_ ? &*cells_ : nullptr; }

    int dimension() const { return dimension_; }
    double measure_factor() const { return measure_factor_; }
    double measure_power() const { return kind_ == Kind::radial ? dimension_ - 2.0 : 0.0; }

    bool contains(double x, double y) const;
    // Area, or volume of the solid of revolution for radial regions.
    double measure() const;
    std::string describe() const;

private:
    Kind kind_ = Kind::planar;
    std::optional<ProfileFunction> profile_;
    double constant_half_width_ = 0.0;
    double y_lower_ = 0.0;
    double y_upper_ = 1.0;
    int dimension_ = 2;
    double measure_factor_ = 1.0;
    std::vector<double> breakpoints_;
    std::optional<std::vector<Cell>> cells_;
};

enum class WeightKind {
    none,
    trapezoid_orthonormal,  // (2 h(y))^{-1/2}
    radial_orthonormal,     // (|S^{d-2}| h(y))^{-1/2} r^{-(d-2)/2}
};

struct Truncation {
    int nx;
    int ny;
};

// Finite doubly indexed family {(n, k)}: n runs over x_indices, k over
// [-ny, ny]; element (n, k) =
//   amplitude * w(y) * r^q * exp(i s (freq_x(n, y) x + (shift(n) + step k) y)).
// Flat ordering is lexicographic with n outer.
class BasisFamily {
public:
    struct Spec {
        std::string name;
        PhaseConvention convention = PhaseConvention::pi;
        std::shared_ptr<const Region> region;
        std::vector<int> x_indices;
        int y_truncation = 0;
        XFrequency freq_x = XFrequency::constant([](int n) { return static_cast<double>(n); });
        std::vector<double> y_shifts;  // one per x index; empty means all zero
        double y_step = 1.0;
        WeightKind weight = WeightKind::none;
        double amplitude = 1.0;
    };

    explicit BasisFamily(Spec spec);

    const std::string& name() const { return spec_.name; }
    PhaseConvention convention() const { return spec_.convention; }
    double phase() const { return phase_; }
    const Region& region() const { return *spec_.region; }
    const std::shared_ptr<const Region>& region_ptr() const { return spec_.region; }
    const XFrequency& freq_x() const { return spec_.freq_x; }
    WeightKind weight() const { return spec_.weight; }
    double amplitude() const { return spec_.amplitude; }
    double y_step() const { return spec_.y_step; }
    int y_truncation() const { return spec_.y_truncation; }
    std::size_t x_count() const { return spec_.x_indices.size(); }
    std::size_t y_count() const { return static_cast<std::size_t>(2 * spec_.y_truncation + 1); }
    std::size_t size() const { return x_count() * y_count(); }

    int x_index(std::size_t position) const { return spec_.x_indices[position]; }
    std::span<const int> x_indices() const { return spec_.x_indices; }
    double y_shift(std::size_t position) const { return spec_.y_shifts[position]; }

    std::size_t flat(std::size_t position, int k) const {
        return position * y_count() + static_cast<std::size_t>(k + spec_.y_truncation);
    }
    std::size_t position_of(std::size_t flat_index) const { return flat_index / y_count(); }
    int k_of(std::size_t flat_index) const {
        return static_cast<int>(flat_index % y_count()) - spec_.y_truncation;
    }

    double frequency_x(std::size_t position, double y) const;
    double frequency_y(std::size_t position, int k) const {
        return spec_.y_shifts[position] + spec_.y_step * k;
    }
    // y-dependent weight factor (times amplitude) and radial power q.
    double weight_y(double y) const;
    double weight_r_power() const;

    cplx operator()(std::size_t flat_index, double x, double y) const;
    cplx evaluate(std::size_t position, int k, double x, double y) const;

    BasisFamily with_amplitude(double amplitude) const;

private:
    Spec spec_;
    double phase_ = 1.0;
};

// exp(i pi (n x / g_n(y) + 2 k y)) on the trapezoid bounded by f, |n| <= nx,
// |k| <= ny; weighted by (2 f(y))^{-1/2} when requested.
BasisFamily trapezoid_basis(const ProfileFunction& profile,
                            const std::optional<PerturbationFamily>& perturbation,
                            Truncation truncation, bool weighted);

// exp(2 pi i (n r / f(y) + k y)) on the spherical trapezoid, optionally
// weighted by (|S^{d-2}| f(y))^{-1/2} r^{-(d-2)/2}.
BasisFamily spherical_basis(const SphericalTrapezoid& trapezoid, Truncation truncation,
                            bool weighted);

using PlaneFunction = std::function<cplx(double, double)>;

class IsometryMap {
public:
    enum class Kind { rectangle_to_trapezoid, multirect_tiling, radial };

    // L^2([-1,1] x [0,1]) -> L^2(T)
    static IsometryMap rectangle_to_trapezoid(ProfileFunction profile);
    // L^2(I x (0,1)) -> L^2(R); the source is in the dilated setting where
    // every step has height 1, the target is the original multi-rectangle.
    static IsometryMap multirect_tiling(StepProfile step);
    // L^2([0,1] x [0,1]) -> L^2_S(T); the target argument x is r = |x'|.
    static IsometryMap radial(SphericalTrapezoid trapezoid);

    Kind kind() const { return kind_; }
    // Jacobian of the y-dilation folded into the map (N for the tiling, else 1).
    double dilation() const;

    const std::optional<ProfileFunction>& profile() const { return profile_; }
    const std::optional<StepProfile>& step() const { return step_; }
    const std::optional<SphericalTrapezoid>& spherical() const { return spherical_; }

private:
    Kind kind_ = Kind::rectangle_to_trapezoid;
    std::optional<ProfileFunction> profile_;
    std::optional<StepProfile> step_;
    std::optional<SphericalTrapezoid> spherical_;
};

// Evaluator for the image of source under the map. Points outside the
// target domain evaluate to zero for the tiling and throw otherwise.
PlaneFunction lift_by_isometry(const IsometryMap& map, PlaneFunction source);

double radial_coordinate(std::span<const double> x_prime);

struct RemainderShift {
    int remainder;               // n_k mod N, in [0, N)
    long long literal;           // remainder + h
    long long scaled_frequency;  // remainder + N h: the y-frequency on the undilated strip
};

// y-frequency for the h-th member of the fibre over n_k. The scaled
// frequency M satisfies (j-1)(n_k - M) = 0 mod N for every step j.
RemainderShift remainder_shift(long long n_k, int steps, long long h);

// Integer form of "2 pi (j-1)(n_k/N - M/N) is a multiple of 2 pi".
bool phase_consistent(long long n_k, long long scaled_frequency, int steps, int j);

// exp(i s lambda_m x) on a multi-interval.
struct ExpFamily1D {
    PhaseConvention convention = PhaseConvention::two_pi;
    std::vector<double> frequencies;
    MultiInterval domain;

    std::size_t size() const { return frequencies.size(); }
    cplx operator()(std::size_t m, double x) const;
};

// {v_n(x) w_{n(m)}(y)} on D x E; position n of v selects its own family w_n.
class TensorFamily {
public:
    TensorFamily(ExpFamily1D v, std::vector<ExpFamily1D> w);

    const ExpFamily1D& v() const { return v_; }
    const ExpFamily1D& w(std::size_t position) const { return w_[position]; }
    std::size_t size() const { return offsets_.back(); }
    std::size_t offset(std::size_t position) const { return offsets_[position]; }
    bool selector_independent() const;

    cplx operator()(std::size_t flat_index, double x, double y) const;

private:
    ExpFamily1D v_;
    std::vector<ExpFamily1D> w_;
    std::vector<std::size_t> offsets_;
};

using Selector = std::function<std::optional<ExpFamily1D>(std::size_t position)>;

// Throws when the selector is undefined for some position of v.
TensorFamily tensor_basis(ExpFamily1D v, const Selector& selector);

}  // namespace expbasis
