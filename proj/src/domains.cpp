#include "expbasis/domains.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "expbasis/error.hpp"
#include "expbasis/quadrature.hpp"

namespace expbasis {

namespace {

std::string describe_values(std::span<const double> v) {
    std::ostringstream os;
    os.precision(17);
    os << "step[";
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    os << "]";
    return os.str();
}

// Smallest q <= limit with q*y integral, or 0.
long long grid_denominator(double y, long long limit) {
    for (long long q = 1; q <= limit; ++q) {
        const double t = y * static_cast<double>(q);
        if (std::abs(t - std::round(t)) < 1e-12 * static_cast<double>(q)) return q;
    }
    return 0;
}

}  // namespace

StepProfile::StepProfile(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw Error(ErrorCode::invalid_argument, "step profile needs N >= 1");
    for (double b : values_) {
        if (!std::isfinite(b) || b <= 0.0)
            throw Error(ErrorCode::admissibility, "step profile values must be positive");
    }
}

int StepProfile::cell_index(double y) const {
    const int n = steps();
    if (!(y > 0.0)) return 0;
    if (y >= 1.0) return n - 1;
    auto c = static_cast<int>(std::floor(y * n));
    if (static_cast<double>(c + 1) / n <= y) ++c;
    if (c > 0 && static_cast<double>(c) / n > y) --c;
    return std::clamp(c, 0, n - 1);
}

bool StepProfile::bounded_by_one() const {
    return std::all_of(values_.begin(), values_.end(), [](double b) { return b <= 1.0; });
}

ProfileFunction::ProfileFunction(Evaluator f, double lower, double upper,
                                 std::vector<double> jumps, std::string description)
    : f_(std::move(f)),
      lower_(lower),
      upper_(upper),
      jumps_(std::move(jumps)),
      description_(std::move(description)) {
    if (!f_) throw Error(ErrorCode::invalid_argument, "profile evaluator is empty");
    if (!(lower_ > 0.0) || !std::isfinite(upper_) || upper_ < lower_)
        throw Error(ErrorCode::admissibility, "profile bounds must satisfy 0 < lower <= upper");
    std::sort(jumps_.begin(), jumps_.end());
    for (double j : jumps_) {
        if (!(j > 0.0 && j < 1.0))
            throw Error(ErrorCode::invalid_argument, "jump points must lie in (0,1)");
    }
}

ProfileFunction ProfileFunction::constant(double value) {
    return from_step(StepProfile({value}));
}

ProfileFunction ProfileFunction::from_step(const StepProfile& step) {
    std::vector<double> jumps;
    for (int j = 1; j < step.steps(); ++j) {
        if (step.value(j) != step.value(j - 1)) jumps.push_back(step.cell_lower(j));
    }
    const auto v = step.values();
    ProfileFunction p([step](double y) { return step(y); }, *std::min_element(v.begin(), v.end()),
                      *std::max_element(v.begin(), v.end()), std::move(jumps),
                      describe_values(v));
    p.step_ = step;
    return p;
}

ProfileFunction ProfileFunction::from_samples(std::vector<double> ys, std::vector<double> fs) {
    if (ys.size() != fs.size() || ys.size() < 2)
        throw Error(ErrorCode::invalid_argument, "samples need matching ys/fs with >= 2 points");
    for (std::size_t i = 1; i < ys.size(); ++i) {
        if (!(ys[i] > ys[i - 1]))
            throw Error(ErrorCode::invalid_argument, "sample ys must be strictly increasing");
    }
    if (ys.front() > 0.0 || ys.back() < 1.0)
        throw Error(ErrorCode::invalid_argument, "sample ys must cover [0,1]");
    const double lo = *std::min_element(fs.begin(), fs.end());
    const double hi = *std::max_element(fs.begin(), fs.end());
    auto eval = [ys, fs](double y) {
        auto it = std::upper_bound(ys.begin(), ys.end(), y);
        std::size_t i = it == ys.begin() ? 0 : static_cast<std::size_t>(it - ys.begin()) - 1;
        i = std::min(i, ys.size() - 2);
        const double t = (y - ys[i]) / (ys[i + 1] - ys[i]);
        return fs[i] + t * (fs[i + 1] - fs[i]);
    };
    return ProfileFunction(eval, lo, hi, {}, "samples");
}

double ProfileFunction::right_limit(double y) const {
    for (double j : jumps_) {
        if (std::abs(j - y) <= 1e-14) return f_(std::nextafter(j, 2.0));
    }
    return f_(y);
}

ProfileFunction ProfileFunction::scaled(double c) const {
    if (!(c > 0.0) || !std::isfinite(c))
        throw Error(ErrorCode::invalid_argument, "profile scale must be positive");
    if (step_) {
        std::vector<double> v(step_->values().begin(), step_->values().end());
        for (double& b : v) b *= c;
        return from_step(StepProfile(std::move(v)));
    }
    auto f = f_;
    std::ostringstream os;
    os.precision(17);
    os << c << "*(" << description_ << ")";
    return ProfileFunction([f, c](double y) { return c * f(y); }, c * lower_, c * upper_, jumps_,
                           os.str());
}

double Trapezoid::area() const {
    if (const auto& s = profile.step()) {
        double sum = 0.0;
        for (double b : s->values()) sum += b;
        return 2.0 * sum / s->steps();
    }
    QuadratureOptions opts;
    opts.abs_tol = 1e-13;
    return 2.0 * integrate_real([&](double y) { return profile(y); }, 0.0, 1.0, profile.jumps(),
                                opts);
}

bool Trapezoid::contains(double x, double y) const {
    return y >= 0.0 && y <= 1.0 && std::abs(x) <= profile(y);
}

MultiInterval::MultiInterval(std::vector<Segment> segments) : segments_(std::move(segments)) {
    if (segments_.empty()) throw Error(ErrorCode::invalid_argument, "multi-interval is empty");
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        if (!(segments_[i].right > segments_[i].left))
            throw Error(ErrorCode::invalid_argument, "segment with non-positive length");
        if (i > 0 && segments_[i].left < segments_[i - 1].right)
            throw Error(ErrorCode::invalid_argument, "segments overlap or are out of order");
    }
}

double MultiInterval::total_length() const {
    double sum = 0.0;
    for (const auto& s : segments_) sum += s.length();
    return sum;
}

bool MultiInterval::contains(double x) const {
    return std::any_of(segments_.begin(), segments_.end(),
                       [x](const Segment& s) { return x > s.left && x < s.right; });
}

double unit_sphere_measure(int dimension) {
    if (dimension < 2) throw Error(ErrorCode::invalid_argument, "dimension must be >= 2");
    if (dimension == 2) return 1.0;
    const double k = 0.5 * (dimension - 1);
    return 2.0 * std::pow(std::numbers::pi, k) / std::tgamma(k);
}

SphericalTrapezoid::SphericalTrapezoid(ProfileFunction profile, int dimension)
    : profile_(std::move(profile)), dimension_(dimension) {
    if (dimension_ < 2) throw Error(ErrorCode::invalid_argument, "dimension must be >= 2");
}

double SphericalTrapezoid::volume() const {
    const int p = dimension_ - 1;
    QuadratureOptions opts;
    opts.abs_tol = 1e-13;
    const double integral = integrate_real(
        [&](double y) { return std::pow(profile_(y), p) / p; }, 0.0, 1.0, profile_.jumps(), opts);
    return sphere_measure() * integral;
}

ProfileValidation validate_profile(const ProfileFunction& profile, int grid_size) {
    if (grid_size < 2) throw Error(ErrorCode::invalid_argument, "grid_size must be >= 2");
    ProfileValidation r;
    r.grid_size = grid_size;
    r.min = std::numeric_limits<double>::infinity();
    r.max = -r.min;
    for (int i = 0; i < grid_size; ++i) {
        const double y = static_cast<double>(i) / (grid_size - 1);
        const double v = profile(y);
        if (!std::isfinite(v))
            throw Error(ErrorCode::admissibility, "profile is not finite at y=" + std::to_string(y));
        r.min = std::min(r.min, v);
        r.max = std::max(r.max, v);
        if (v < profile.lower_bound() || v > profile.upper_bound()) r.violations.push_back(y);
    }
    if (r.min <= 0.0)
        throw Error(ErrorCode::admissibility,
                    "profile is not positive: empirical min " + std::to_string(r.min));
    return r;
}

StepApproximation approximate_profile(const ProfileFunction& profile, int n,
                                      const ApproximationOptions& options) {
    if (n < 1) throw Error(ErrorCode::invalid_argument, "n must be >= 1");
    if (options.audit_grid < 2) throw Error(ErrorCode::invalid_argument, "audit grid too small");

    const int grid = options.audit_grid;
    std::vector<double> ys(static_cast<std::size_t>(grid));
    std::vector<double> fs(ys.size());
    double scale = 0.0;
    for (int i = 0; i < grid; ++i) {
        ys[i] = static_cast<double>(i) / (grid - 1);
        fs[i] = profile.right_limit(ys[i]);
        if (!(fs[i] > 0.0) || !std::isfinite(fs[i]))
            throw Error(ErrorCode::admissibility, "profile not positive on the audit grid");
        scale = std::max(scale, fs[i]);
    }
    for (double j : profile.jumps()) scale = std::max({scale, profile(j), profile.right_limit(j)});

    long long base = 1;
    for (double j : profile.jumps()) {
        const long long q = grid_denominator(j, 4096);
        if (q == 0)
            throw Error(ErrorCode::admissibility,
                        "jump at y=" + std::to_string(j) + " is not on any regular grid");
        base = std::lcm(base, q);
        if (base > options.max_partitions)
            throw Error(ErrorCode::not_certified, "jump grid exceeds the partition cap");
    }

    const double bound = 1.0 / (4.0 * n);
    std::vector<int> schedule;
    for (long long parts = base; parts <= options.max_partitions; parts *= 2) {
        const int N = static_cast<int>(parts);
        schedule.push_back(N);
        std::vector<double> cells(static_cast<std::size_t>(N));
        for (int j = 0; j < N; ++j)
            cells[j] = profile.right_limit(static_cast<double>(j) / N) / scale;
        StepProfile normalised(cells);

        double inv_err = 0.0, uni_err = 0.0;
        for (int i = 0; i < grid; ++i) {
            const double s = cells[static_cast<std::size_t>(normalised.cell_index(ys[i]))];
            const double f = fs[i] / scale;
            inv_err = std::max(inv_err, std::abs(1.0 / s - 1.0 / f));
            uni_err = std::max(uni_err, std::abs(s - f));
        }
        if (inv_err < bound && uni_err < bound) {
            for (double& c : cells) c *= scale;
            return StepApproximation{n,       StepProfile(std::move(cells)), N, scale, inv_err,
                                     uni_err, grid,                          schedule};
        }
    }
    throw Error(ErrorCode::not_certified,
                "no partition count up to " + std::to_string(options.max_partitions) +
                    " certifies sup|1/s - 1/f| < 1/(4n) for n=" + std::to_string(n));
}

MultiInterval build_multiinterval(const StepProfile& step) {
    if (!step.bounded_by_one())
        throw Error(ErrorCode::invalid_argument,
                    "multi-interval construction requires every b_j <= 1");
    std::vector<Segment> segs;
    for (int j = 0; j < step.steps(); ++j) {
        const double centre = 2.0 * j;
        segs.push_back({centre - step.value(j), centre + step.value(j)});
    }
    return MultiInterval(std::move(segs));
}

std::vector<Translation> translation_plan(const StepProfile& step) {
    std::vector<Translation> plan;
    for (int j = 0; j < step.steps(); ++j) plan.push_back({2 * j, -j});
    return plan;
}

}  // namespace expbasis
