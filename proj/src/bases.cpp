#include "expbasis/bases.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "expbasis/error.hpp"
#include "expbasis/quadrature.hpp"

namespace expbasis {

double phase_factor(PhaseConvention c) {
    switch (c) {
        case PhaseConvention::unit: return 1.0;
        case PhaseConvention::pi: return std::numbers::pi;
        case PhaseConvention::two_pi: return 2.0 * std::numbers::pi;
    }
    return 1.0;
}

const char* convention_name(PhaseConvention c) {
    switch (c) {
        case PhaseConvention::unit: return "exp(i(.))";
        case PhaseConvention::pi: return "exp(i*pi*(.))";
        case PhaseConvention::two_pi: return "exp(2*pi*i*(.))";
    }
    return "?";
}

XFrequency XFrequency::constant(Coefficient c) {
    XFrequency f;
    f.kind_ = Kind::constant;
    f.coefficient_ = std::move(c);
    return f;
}

XFrequency XFrequency::over_profile(Coefficient c) {
    XFrequency f;
    f.kind_ = Kind::over_profile;
    f.coefficient_ = std::move(c);
    return f;
}

XFrequency XFrequency::custom(Custom g) {
    XFrequency f;
    f.kind_ = Kind::custom;
    f.custom_ = std::move(g);
    return f;
}

double XFrequency::operator()(int n, double y, double half_width) const {
    switch (kind_) {
        case Kind::constant: return coefficient_(n);
        case Kind::over_profile: return coefficient_(n) / half_width;
        case Kind::custom: return custom_(n, y);
    }
    return 0.0;
}

PerturbationFamily PerturbationFamily::identity() { return PerturbationFamily{}; }

PerturbationFamily PerturbationFamily::ratio(std::function<double(int)> exponent,
                                             std::string name) {
    PerturbationFamily p;
    p.kind_ = Kind::ratio;
    p.exponent_ = std::move(exponent);
    p.name_ = std::move(name);
    return p;
}

PerturbationFamily PerturbationFamily::custom(std::function<double(int, double)> g,
                                              std::string name) {
    PerturbationFamily p;
    p.kind_ = Kind::custom;
    p.custom_ = std::move(g);
    p.name_ = std::move(name);
    return p;
}

double PerturbationFamily::exponent(int n) const {
    if (n == 0) return 0.0;
    switch (kind_) {
        case Kind::identity: return n;
        case Kind::ratio: return exponent_(n);
        case Kind::custom: break;
    }
    throw Error(ErrorCode::invalid_argument, "custom perturbations have no constant exponent");
}

double PerturbationFamily::g(int n, double y, const ProfileFunction& f) const {
    switch (kind_) {
        case Kind::identity: return f(y);
        case Kind::ratio: return n == 0 ? 0.0 : n * f(y) / exponent_(n);
        case Kind::custom: return custom_(n, y);
    }
    return 0.0;
}

XFrequency PerturbationFamily::trapezoid_frequencies() const {
    switch (kind_) {
        case Kind::identity:
            return XFrequency::over_profile([](int n) { return static_cast<double>(n); });
        case Kind::ratio: {
            auto c = exponent_;
            return XFrequency::over_profile([c](int n) { return n == 0 ? 0.0 : c(n); });
        }
        case Kind::custom: {
            auto g = custom_;
            return XFrequency::custom([g](int n, double y) { return n == 0 ? 0.0 : n / g(n, y); });
        }
    }
    return XFrequency::over_profile([](int n) { return static_cast<double>(n); });
}

XFrequency PerturbationFamily::rectangle_frequencies(const ProfileFunction& f) const {
    switch (kind_) {
        case Kind::identity:
            return XFrequency::constant([](int n) { return static_cast<double>(n); });
        case Kind::ratio: {
            auto c = exponent_;
            return XFrequency::constant([c](int n) { return n == 0 ? 0.0 : c(n); });
        }
        case Kind::custom: {
            auto g = custom_;
            return XFrequency::custom(
                [g, f](int n, double y) { return n == 0 ? 0.0 : n * f(y) / g(n, y); });
        }
    }
    return XFrequency::constant([](int n) { return static_cast<double>(n); });
}

namespace {

std::vector<Region::Cell> step_cells(const StepProfile& s) {
    std::vector<Region::Cell> cells;
    for (int j = 0; j < s.steps(); ++j) cells.push_back({s.cell_lower(j), s.cell_upper(j), s.value(j)});
    return cells;
}

std::vector<double> profile_breakpoints(const ProfileFunction& p) {
    std::vector<double> b(p.jumps().begin(), p.jumps().end());
    if (const auto& s = p.step()) {
        for (int j = 1; j < s->steps(); ++j) b.push_back(s->cell_lower(j));
    }
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    return b;
}

}  // namespace

Region Region::trapezoid(const ProfileFunction& profile) {
    Region r;
    r.profile_ = profile;
    r.breakpoints_ = profile_breakpoints(profile);
    if (const auto& s = profile.step()) r.cells_ = step_cells(*s);
    return r;
}

Region Region::rectangle(double half_width, double y_lower, double y_upper) {
    if (!(half_width > 0.0) || !(y_upper > y_lower))
        throw Error(ErrorCode::invalid_argument, "degenerate rectangle");
    Region r;
    r.constant_half_width_ = half_width;
    r.y_lower_ = y_lower;
    r.y_upper_ = y_upper;
    r.cells_ = std::vector<Cell>{{y_lower, y_upper, half_width}};
    return r;
}

Region Region::spherical(const SphericalTrapezoid& trapezoid) {
    Region r = Region::trapezoid(trapezoid.profile());
    r.kind_ = Kind::radial;
    r.dimension_ = trapezoid.dimension();
    r.measure_factor_ = trapezoid.sphere_measure();
    return r;
}

double Region::half_width(double y) const {
    return profile_ ? (*profile_)(y) : constant_half_width_;
}

bool Region::contains(double x, double y) const {
    if (y < y_lower_ || y > y_upper_) return false;
    const double h = half_width(y);
    return kind_ == Kind::radial ? (x >= 0.0 && x <= h) : std::abs(x) <= h;
}

double Region::measure() const {
    const double p = kind_ == Kind::radial ? dimension_ - 1.0 : 1.0;
    const double factor = kind_ == Kind::radial ? measure_factor_ / p : 2.0;
    if (cells_) {
        double sum = 0.0;
        for (const auto& c : *cells_) sum += (c.y_upper - c.y_lower) * std::pow(c.half_width, p);
        return factor * sum;
    }
    QuadratureOptions opts;
    opts.abs_tol = 1e-13;
    return factor * integrate_real([&](double y) { return std::pow(half_width(y), p); },
                                   y_lower_, y_upper_, breakpoints_, opts);
}

std::string Region::describe() const {
    std::ostringstream os;
    os.precision(17);
    if (kind_ == Kind::radial) {
        os << "spherical_trapezoid(d=" << dimension_ << ", f=" << profile_->description() << ")";
    } else if (profile_) {
        os << "trapezoid(f=" << profile_->description() << ")";
    } else {
        os << "rectangle([-" << constant_half_width_ << "," << constant_half_width_ << "]x["
           << y_lower_ << "," << y_upper_ << "])";
    }
    return os.str();
}

BasisFamily::BasisFamily(Spec spec) : spec_(std::move(spec)) {
    if (!spec_.region) throw Error(ErrorCode::invalid_argument, "family without a region");
    if (spec_.y_truncation < 0) throw Error(ErrorCode::invalid_argument, "negative y truncation");
    if (spec_.x_indices.empty()) throw Error(ErrorCode::invalid_argument, "empty x index set");
    if (spec_.y_shifts.empty()) spec_.y_shifts.assign(spec_.x_indices.size(), 0.0);
    if (spec_.y_shifts.size() != spec_.x_indices.size())
        throw Error(ErrorCode::invalid_argument, "y shifts must match the x index set");
    phase_ = phase_factor(spec_.convention);
}

double BasisFamily::frequency_x(std::size_t position, double y) const {
    return spec_.freq_x(spec_.x_indices[position], y, spec_.region->half_width(y));
}

double BasisFamily::weight_y(double y) const {
    switch (spec_.weight) {
        case WeightKind::none: return spec_.amplitude;
        case WeightKind::trapezoid_orthonormal:
            return spec_.amplitude / std::sqrt(2.0 * spec_.region->half_width(y));
        case WeightKind::radial_orthonormal:
            return spec_.amplitude /
                   std::sqrt(spec_.region->measure_factor() * spec_.region->half_width(y));
    }
    return spec_.amplitude;
}

double BasisFamily::weight_r_power() const {
    return spec_.weight == WeightKind::radial_orthonormal ? -0.5 * (spec_.region->dimension() - 2)
                                                          : 0.0;
}

cplx BasisFamily::evaluate(std::size_t position, int k, double x, double y) const {
    const double q = weight_r_power();
    double w = weight_y(y);
    if (q != 0.0) w *= std::pow(x, q);
    return std::polar(w, phase_ * (frequency_x(position, y) * x + frequency_y(position, k) * y));
}

cplx BasisFamily::operator()(std::size_t flat_index, double x, double y) const {
    return evaluate(position_of(flat_index), k_of(flat_index), x, y);
}

BasisFamily BasisFamily::with_amplitude(double amplitude) const {
    Spec s = spec_;
    s.amplitude = amplitude;
    return BasisFamily(std::move(s));
}

namespace {

std::vector<int> symmetric_indices(int n) {
    if (n < 0) throw Error(ErrorCode::invalid_argument, "negative truncation");
    std::vector<int> v;
    for (int i = -n; i <= n; ++i) v.push_back(i);
    return v;
}

}  // namespace

BasisFamily trapezoid_basis(const ProfileFunction& profile,
                            const std::optional<PerturbationFamily>& perturbation,
                            Truncation truncation, bool weighted) {
    const PerturbationFamily g = perturbation.value_or(PerturbationFamily::identity());
    if (g.kind() == PerturbationFamily::Kind::custom) {
        constexpr int probes = 1001;
        for (int n = -truncation.nx; n <= truncation.nx; ++n) {
            if (n == 0) continue;
            for (int i = 0; i < probes; ++i) {
                const double y = static_cast<double>(i) / (probes - 1);
                const double v = g.g(n, y, profile);
                if (!std::isfinite(v) || std::abs(v) < 1e-14 * profile.lower_bound())
                    throw Error(ErrorCode::admissibility, "g_" + std::to_string(n) +
                                                              " vanishes near y=" +
                                                              std::to_string(y));
            }
        }
    }
    BasisFamily::Spec spec;
    spec.name = std::string(weighted ? "trapezoid_orthonormal" : "trapezoid") + "/" + g.name();
    spec.convention = PhaseConvention::pi;
    spec.region = std::make_shared<const Region>(Region::trapezoid(profile));
    spec.x_indices = symmetric_indices(truncation.nx);
    spec.y_truncation = truncation.ny;
    spec.freq_x = g.trapezoid_frequencies();
    spec.y_step = 2.0;
    spec.weight = weighted ? WeightKind::trapezoid_orthonormal : WeightKind::none;
    return BasisFamily(std::move(spec));
}

BasisFamily spherical_basis(const SphericalTrapezoid& trapezoid, Truncation truncation,
                            bool weighted) {
    BasisFamily::Spec spec;
    spec.name = weighted ? "spherical_orthonormal" : "spherical";
    spec.convention = PhaseConvention::two_pi;
    spec.region = std::make_shared<const Region>(Region::spherical(trapezoid));
    spec.x_indices = symmetric_indices(truncation.nx);
    spec.y_truncation = truncation.ny;
    spec.freq_x = XFrequency::over_profile([](int n) { return static_cast<double>(n); });
    spec.y_step = 1.0;
    spec.weight = weighted ? WeightKind::radial_orthonormal : WeightKind::none;
    return BasisFamily(std::move(spec));
}

IsometryMap IsometryMap::rectangle_to_trapezoid(ProfileFunction profile) {
    IsometryMap m;
    m.kind_ = Kind::rectangle_to_trapezoid;
    m.profile_ = std::move(profile);
    return m;
}

IsometryMap IsometryMap::multirect_tiling(StepProfile step) {
    if (!step.bounded_by_one())
        throw Error(ErrorCode::invalid_argument, "tiling requires every b_j <= 1");
    IsometryMap m;
    m.kind_ = Kind::multirect_tiling;
    m.step_ = std::move(step);
    return m;
}

IsometryMap IsometryMap::radial(SphericalTrapezoid trapezoid) {
    IsometryMap m;
    m.kind_ = Kind::radial;
    m.spherical_ = std::move(trapezoid);
    return m;
}

double IsometryMap::dilation() const {
    return kind_ == Kind::multirect_tiling ? static_cast<double>(step_->steps()) : 1.0;
}

PlaneFunction lift_by_isometry(const IsometryMap& map, PlaneFunction source) {
    constexpr double slack = 1e-12;
    switch (map.kind()) {
        case IsometryMap::Kind::rectangle_to_trapezoid: {
            const ProfileFunction f = *map.profile();
            return [f, source](double x, double y) {
                if (y < 0.0 || y > 1.0)
                    throw Error(ErrorCode::invalid_argument, "point outside the trapezoid");
                const double h = f(y);
                if (std::abs(x) > h * (1.0 + slack))
                    throw Error(ErrorCode::invalid_argument, "point outside the trapezoid");
                return source(x / h, y) / std::sqrt(h);
            };
        }
        case IsometryMap::Kind::multirect_tiling: {
            const StepProfile step = *map.step();
            const double scale = std::sqrt(static_cast<double>(step.steps()));
            return [step, scale, source](double x, double y) -> cplx {
                if (y < 0.0 || y > 1.0) return {};
                const int j = step.cell_index(y);
                if (std::abs(x) > step.value(j)) return {};
                return scale * source(x + 2.0 * j, step.steps() * y - j);
            };
        }
        case IsometryMap::Kind::radial: {
            const SphericalTrapezoid sph = *map.spherical();
            return [sph, source](double r, double y) {
                const double h = sph.profile()(y);
                if (y < 0.0 || y > 1.0 || r < 0.0 || r > h * (1.0 + slack))
                    throw Error(ErrorCode::invalid_argument, "point outside the spherical trapezoid");
                const int d = sph.dimension();
                if (d > 2 && r == 0.0)
                    throw Error(ErrorCode::invalid_argument, "radial weight is singular at r = 0");
                const double w = 1.0 / std::sqrt(sph.sphere_measure() * h) *
                                 (d > 2 ? std::pow(r, -0.5 * (d - 2)) : 1.0);
                return w * source(r / h, y);
            };
        }
    }
    throw Error(ErrorCode::internal, "unknown isometry kind");
}

double radial_coordinate(std::span<const double> x_prime) {
    double s = 0.0;
    for (double v : x_prime) s += v * v;
    return std::sqrt(s);
}

bool phase_consistent(long long n_k, long long scaled_frequency, int steps, int j) {
    if (steps < 1) throw Error(ErrorCode::invalid_argument, "N must be >= 1");
    const long long diff = ((n_k - scaled_frequency) % steps + steps) % steps;
    const long long mult = static_cast<long long>(j - 1) % steps;
    return (diff * mult) % steps == 0;
}

RemainderShift remainder_shift(long long n_k, int steps, long long h) {
    if (steps < 1) throw Error(ErrorCode::invalid_argument, "N must be >= 1");
    RemainderShift r;
    r.remainder = static_cast<int>(((n_k % steps) + steps) % steps);
    r.literal = r.remainder + h;
    r.scaled_frequency = r.remainder + static_cast<long long>(steps) * h;
    for (int j = 1; j <= steps; ++j) {
        if (!phase_consistent(n_k, r.scaled_frequency, steps, j))
            throw Error(ErrorCode::internal, "remainder shift violates phase consistency");
    }
    return r;
}

cplx ExpFamily1D::operator()(std::size_t m, double x) const {
    return std::polar(1.0, phase_factor(convention) * frequencies[m] * x);
}

namespace {

bool same_domain(const MultiInterval& a, const MultiInterval& b) {
    const auto sa = a.segments();
    const auto sb = b.segments();
    if (sa.size() != sb.size()) return false;
    for (std::size_t i = 0; i < sa.size(); ++i) {
        if (sa[i].left != sb[i].left || sa[i].right != sb[i].right) return false;
    }
    return true;
}

}  // namespace

TensorFamily::TensorFamily(ExpFamily1D v, std::vector<ExpFamily1D> w)
    : v_(std::move(v)), w_(std::move(w)) {
    if (w_.size() != v_.size())
        throw Error(ErrorCode::invalid_argument, "one y-family per x-element is required");
    offsets_.push_back(0);
    for (const auto& wn : w_) {
        if (!same_domain(wn.domain, w_.front().domain) || wn.convention != w_.front().convention)
            throw Error(ErrorCode::invalid_argument, "y-families must share domain and convention");
        offsets_.push_back(offsets_.back() + wn.size());
    }
}

bool TensorFamily::selector_independent() const {
    return std::all_of(w_.begin(), w_.end(), [&](const ExpFamily1D& wn) {
        return wn.frequencies == w_.front().frequencies;
    });
}

cplx TensorFamily::operator()(std::size_t flat_index, double x, double y) const {
    const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), flat_index);
    const auto pos = static_cast<std::size_t>(it - offsets_.begin()) - 1;
    return v_(pos, x) * w_[pos](flat_index - offsets_[pos], y);
}

TensorFamily tensor_basis(ExpFamily1D v, const Selector& selector) {
    std::vector<ExpFamily1D> w;
    for (std::size_t pos = 0; pos < v.size(); ++pos) {
        auto fam = selector ? selector(pos) : std::nullopt;
        if (!fam)
            throw Error(ErrorCode::invalid_argument,
                        "selector is undefined for x-position " + std::to_string(pos));
        w.push_back(std::move(*fam));
    }
    return TensorFamily(std::move(v), std::move(w));
}

}  // namespace expbasis
