#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "expbasis/error.hpp"
#include "expbasis/gram.hpp"
#include "expbasis/quadrature.hpp"

namespace expbasis {

Target Target::box(double x0, double x1, double y0, double y1) {
    if (!(x1 > x0) || !(y1 > y0)) throw Error(ErrorCode::invalid_argument, "empty target box");
    Target t;
    t.kind_ = Kind::box;
    t.bounds_ = {x0, x1, y0, y1};
    return t;
}

Target Target::element(std::size_t flat_index) {
    Target t;
    t.kind_ = Kind::element;
    t.index_ = flat_index;
    return t;
}

Target Target::function(PlaneFunction f, std::vector<double> y_breaks, std::string description) {
    if (!f) throw Error(ErrorCode::invalid_argument, "empty target function");
    Target t;
    t.kind_ = Kind::function;
    t.f_ = std::move(f);
    t.y_breaks_ = std::move(y_breaks);
    t.description_ = std::move(description);
    return t;
}

std::string Target::describe() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind_) {
        case Kind::box:
            os << "indicator([" << bounds_[0] << "," << bounds_[1] << "]x[" << bounds_[2] << ","
               << bounds_[3] << "])";
            break;
        case Kind::element: os << "element(" << index_ << ")"; break;
        case Kind::function: os << "function(" << description_ << ")"; break;
    }
    return os.str();
}

namespace {

Target::Moments box_moments(const std::vector<double>& bx, const BasisFamily& family,
                            const GramOptions& options) {
    const Region& region = family.region();
    if (region.kind() != Region::Kind::planar)
        throw Error(ErrorCode::invalid_argument, "box targets need a planar region");
    const double s = family.phase();
    const auto n = static_cast<Eigen::Index>(family.size());
    const int ny = family.y_truncation();
    Target::Moments m;
    m.b = Vector::Zero(n);

    const double ya = std::max(bx[2], region.y_lower());
    const double yb = std::min(bx[3], region.y_upper());
    if (!(yb > ya)) return m;

    if (options.prefer_closed_form && region.cells() &&
        family.freq_x().kind() != XFrequency::Kind::custom) {
        for (const auto& cell : *region.cells()) {
            const double lo_y = std::max(ya, cell.y_lower);
            const double hi_y = std::min(yb, cell.y_upper);
            const double lo = std::max(bx[0], -cell.half_width);
            const double hi = std::min(bx[1], cell.half_width);
            if (!(hi_y > lo_y) || !(hi > lo)) continue;
            m.norm2 += (hi - lo) * (hi_y - lo_y);
            const double y = 0.5 * (cell.y_lower + cell.y_upper);
            const double w = family.weight_y(y);
            for (std::size_t p = 0; p < family.x_count(); ++p) {
                const cplx ix = exp_integral(s * family.frequency_x(p, y), lo, hi);
                for (int k = -ny; k <= ny; ++k) {
                    const cplx iy = exp_integral(s * family.frequency_y(p, k), lo_y, hi_y);
                    m.b(static_cast<Eigen::Index>(family.flat(p, k))) += std::conj(w * ix * iy);
                }
            }
        }
        return m;
    }

    const std::size_t dim = family.size() + 1;
    auto integrand = [&](double y, std::span<cplx> out) {
        const double h = region.half_width(y);
        const double lo = std::max(bx[0], -h);
        const double hi = std::min(bx[1], h);
        if (!(hi > lo)) {
            std::fill(out.begin(), out.end(), cplx{});
            return;
        }
        const double w = family.weight_y(y);
        for (std::size_t p = 0; p < family.x_count(); ++p) {
            const cplx ix = w * exp_integral(s * family.frequency_x(p, y), lo, hi);
            for (int k = -ny; k <= ny; ++k)
                out[family.flat(p, k)] = std::conj(ix * std::polar(1.0, s * family.frequency_y(p, k) * y));
        }
        out[dim - 1] = hi - lo;
    };
    QuadratureOptions qo;
    qo.abs_tol = options.quadrature_tolerance;
    qo.max_panels = options.max_panels;
    double shift = 0.0;
    for (std::size_t p = 0; p < family.x_count(); ++p) shift = std::max(shift, std::abs(family.y_shift(p)));
    qo.initial_panels =
        1 + static_cast<int>(std::ceil(s * (std::abs(family.y_step()) * ny + shift) * (yb - ya) /
                                       std::numbers::pi));
    auto r = integrate(integrand, dim, ya, yb, region.breakpoints(), qo);
    if (!r.converged)
        throw Error(ErrorCode::quadrature, "target moments did not converge: achieved error " +
                                               std::to_string(r.error));
    for (Eigen::Index i = 0; i < n; ++i) m.b(i) = r.values[static_cast<std::size_t>(i)];
    m.norm2 = r.values[dim - 1].real();
    m.error = r.error;
    return m;
}

Target::Moments function_moments(const PlaneFunction& f, const std::vector<double>& y_breaks,
                                 const BasisFamily& family, const GramOptions& options) {
    const Region& region = family.region();
    const bool radial = region.kind() == Region::Kind::radial;
    const std::size_t dim = family.size() + 1;
    const double length = region.y_upper() - region.y_lower();

    QuadratureOptions inner;
    inner.abs_tol = options.quadrature_tolerance / (4.0 * length);
    inner.max_panels = options.max_panels;
    auto integrand = [&](double y, std::span<cplx> out) {
        const double h = region.half_width(y);
        auto fx = [&](double x, std::span<cplx> v) {
            const cplx t = f(x, y);
            const double measure =
                radial ? region.measure_factor() * std::pow(x, region.measure_power()) : 1.0;
            for (std::size_t i = 0; i + 1 < dim; ++i) v[i] = measure * t * std::conj(family(i, x, y));
            v[dim - 1] = measure * std::norm(t);
        };
        auto r = integrate(fx, dim, radial ? 0.0 : -h, h, {}, inner);
        std::copy(r.values.begin(), r.values.end(), out.begin());
    };
    std::vector<double> breaks(region.breakpoints().begin(), region.breakpoints().end());
    breaks.insert(breaks.end(), y_breaks.begin(), y_breaks.end());
    QuadratureOptions outer;
    outer.abs_tol = options.quadrature_tolerance;
    outer.max_panels = options.max_panels;
    auto r = integrate(integrand, dim, region.y_lower(), region.y_upper(), breaks, outer);
    if (!r.converged)
        throw Error(ErrorCode::quadrature, "target moments did not converge: achieved error " +
                                               std::to_string(r.error));
    Target::Moments m;
    m.b = Vector(static_cast<Eigen::Index>(dim - 1));
    for (std::size_t i = 0; i + 1 < dim; ++i) m.b(static_cast<Eigen::Index>(i)) = r.values[i];
    m.norm2 = r.values[dim - 1].real();
    m.error = r.error;
    return m;
}

}  // namespace

Target::Moments Target::moments(const BasisFamily& family, const GramOptions& options) const {
    switch (kind_) {
        case Kind::box: return box_moments(bounds_, family, options);
        case Kind::function: return function_moments(f_, y_breaks_, family, options);
        case Kind::element: {
            if (index_ >= family.size())
                throw Error(ErrorCode::invalid_argument, "target element index out of range");
            Moments m;
            m.b = Vector(static_cast<Eigen::Index>(family.size()));
            for (std::size_t i = 0; i < family.size(); ++i)
                m.b(static_cast<Eigen::Index>(i)) = inner_product(family, index_, family, i, options);
            m.norm2 = inner_product(family, index_, family, index_, options).real();
            return m;
        }
    }
    throw Error(ErrorCode::internal, "unknown target kind");
}

ReconstructionReport reconstruct(const Target& target, const BasisFamily& family,
                                 const GramOptions& options, const GramReport* gram) {
    GramReport local;
    if (!gram) {
        local = gram_matrix(family, options);
        gram = &local;
    }
    if (gram->dimension != family.size())
        throw Error(ErrorCode::invalid_argument, "Gram report does not match the family");
    if (!(gram->condition_number <= options.ill_conditioned_threshold)) {
        std::ostringstream os;
        os << "refusing to solve: condition number " << gram->condition_number << " exceeds "
           << options.ill_conditioned_threshold;
        throw Error(ErrorCode::ill_conditioned, os.str());
    }
    const Matrix& g = gram->matrix;
    const Matrix h = 0.5 * (g + g.adjoint());

    ReconstructionReport r;
    r.target = target.describe();
    r.x_count = family.x_count();
    r.y_truncation = family.y_truncation();
    r.condition_number = gram->condition_number;
    r.quadrature_error = gram->quadrature_error;

    double residual2 = 0.0;
    double norm2 = 0.0;
    if (target.kind() == Target::Kind::element) {
        const auto i = static_cast<Eigen::Index>(target.index());
        if (target.index() >= family.size())
            throw Error(ErrorCode::invalid_argument, "target element index out of range");
        const Vector b = h.col(i);
        r.coefficients = h.ldlt().solve(b);
        Vector d = -r.coefficients;
        d(i) += 1.0;
        residual2 = d.dot(h * d).real();
        norm2 = h(i, i).real();
    } else {
        const Target::Moments m = target.moments(family, options);
        r.coefficients = h.ldlt().solve(m.b);
        residual2 = m.norm2 - 2.0 * r.coefficients.dot(m.b).real() +
                    r.coefficients.dot(h * r.coefficients).real();
        norm2 = m.norm2;
        r.quadrature_error = std::max(r.quadrature_error, m.error);
    }
    if (!(norm2 > 0.0)) throw Error(ErrorCode::invalid_argument, "target has zero norm on the region");
    r.target_norm = std::sqrt(norm2);
    r.relative_residual = std::sqrt(std::max(residual2, 0.0) / norm2);
    return r;
}

}  // namespace expbasis
