#include "expbasis/gram.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "expbasis/error.hpp"
#include "expbasis/parallel.hpp"
#include "expbasis/quadrature.hpp"

namespace expbasis {

const char* verdict_name(GramVerdict v) {
    switch (v) {
        case GramVerdict::identity_within_tol: return "identity_within_tol";
        case GramVerdict::bounded: return "bounded";
        case GramVerdict::ill_conditioned: return "ill_conditioned";
    }
    return "?";
}

const char* finite_section_caveat() {
    return "finite-section evidence only: eigenvalues of a truncated Gram matrix bound the "
           "Riesz constants from inside and cannot prove basis properties";
}

namespace {

// Union-find over matrix indices.
struct Components {
    std::vector<std::size_t> parent;
    explicit Components(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    }
    void join(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

}  // namespace

Spectrum hermitian_spectrum(const Matrix& m, double deflation_tolerance) {
    const auto n = static_cast<std::size_t>(m.rows());
    if (m.rows() != m.cols()) throw Error(ErrorCode::invalid_argument, "matrix is not square");
    const Matrix h = 0.5 * (m + m.adjoint());
    Spectrum s;
    if (n == 0) return s;

    double diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) diag = std::max(diag, std::abs(h(i, i)));
    const double threshold = deflation_tolerance * diag;

    Components comp(n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < j; ++i) {
            if (std::abs(h(i, j)) > threshold) comp.join(i, j);
        }
    }
    std::vector<std::vector<std::size_t>> groups(n);
    for (std::size_t i = 0; i < n; ++i) groups[comp.find(i)].push_back(i);

    double dropped = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < j; ++i) {
            if (comp.find(i) != comp.find(j)) dropped += 2.0 * std::norm(h(i, j));
        }
    }
    s.deflation_bound = std::sqrt(dropped);

    for (const auto& g : groups) {
        if (g.empty()) continue;
        ++s.blocks;
        if (g.size() == 1) {
            s.eigenvalues.push_back(h(g[0], g[0]).real());
            continue;
        }
        const auto k = static_cast<Eigen::Index>(g.size());
        Matrix block(k, k);
        for (Eigen::Index c = 0; c < k; ++c)
            for (Eigen::Index r = 0; r < k; ++r) block(r, c) = h(g[r], g[c]);
        Eigen::SelfAdjointEigenSolver<Matrix> solver(block, Eigen::EigenvaluesOnly);
        if (solver.info() != Eigen::Success)
            throw Error(ErrorCode::internal, "Hermitian eigensolver failed");
        for (Eigen::Index i = 0; i < k; ++i) s.eigenvalues.push_back(solver.eigenvalues()(i));
    }
    std::sort(s.eigenvalues.begin(), s.eigenvalues.end());
    return s;
}

double condition_number(const Matrix& m) {
    const Matrix h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h, Eigen::EigenvaluesOnly);
    const auto& ev = solver.eigenvalues();
    const double lo = ev.minCoeff();
    if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
    return ev.maxCoeff() / lo;
}

GramReport summarize_gram(Matrix matrix, double quadrature_tolerance, const GramOptions& options) {
    GramReport r;
    r.dimension = static_cast<std::size_t>(matrix.rows());
    r.quadrature_tolerance = quadrature_tolerance;
    r.hermitian_deviation = (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
    r.identity_deviation =
        (matrix - Matrix::Identity(matrix.rows(), matrix.cols())).cwiseAbs().maxCoeff();
    Spectrum s = hermitian_spectrum(matrix, options.deflation_tolerance);
    r.eigenvalues = std::move(s.eigenvalues);
    r.deflation_bound = s.deflation_bound;
    r.blocks = s.blocks;
    r.eigen_min = r.eigenvalues.front();
    r.eigen_max = r.eigenvalues.back();
    r.condition_number =
        r.eigen_min > 0.0 ? r.eigen_max / r.eigen_min : std::numeric_limits<double>::infinity();
    if (r.identity_deviation < 10.0 * quadrature_tolerance)
        r.verdict = GramVerdict::identity_within_tol;
    else if (!(r.eigen_min > 0.0) || r.condition_number > options.ill_conditioned_threshold)
        r.verdict = GramVerdict::ill_conditioned;
    else
        r.verdict = GramVerdict::bounded;
    r.matrix = std::move(matrix);
    return r;
}

namespace {

cplx x_integral(const Region& region, double theta, double h, double power) {
    if (region.kind() == Region::Kind::planar) return exp_integral(theta, -h, h);
    return region.measure_factor() * exp_moment_integral(theta, 0.0, h, power);
}

class PairEngine {
public:
    PairEngine(const BasisFamily& a, const BasisFamily& b, const GramOptions& options)
        : a_(a), b_(b), options_(options) {
        if (&a.region() != &b.region())
            throw Error(ErrorCode::invalid_argument, "families live on different regions");
        if (a.convention() != b.convention())
            throw Error(ErrorCode::invalid_argument, "families use different phase conventions");
        if (a.y_step() != b.y_step())
            throw Error(ErrorCode::invalid_argument, "families use different y steps");
        const Region& region = a.region();
        if (region.kind() == Region::Kind::planar &&
            (a.weight_r_power() != 0.0 || b.weight_r_power() != 0.0))
            throw Error(ErrorCode::invalid_argument, "radial weight on a planar region");
        na_ = a.y_truncation();
        nb_ = b.y_truncation();
        phase_ = a.phase();
        power_ = a.weight_r_power() + b.weight_r_power() + region.measure_power();
        closed_ = options.prefer_closed_form && region.cells() != nullptr &&
                  a.freq_x().kind() != XFrequency::Kind::custom &&
                  b.freq_x().kind() != XFrequency::Kind::custom;
    }

    bool closed_form() const { return closed_; }
    std::size_t width() const { return static_cast<std::size_t>(2 * (na_ + nb_) + 1); }

    // out[d] = <b_(q, k'), a_(p, k)> for k' - k = d - (na + nb).
    double pair(std::size_t p, std::size_t q, std::vector<cplx>& out) const {
        const Region& region = a_.region();
        const int span = na_ + nb_;
        const double shift = b_.y_shift(q) - a_.y_shift(p);
        const double step = a_.y_step();
        out.assign(width(), cplx{});

        if (closed_) {
            for (const auto& cell : *region.cells()) {
                const double y = 0.5 * (cell.y_lower + cell.y_upper);
                const double theta = phase_ * (b_.frequency_x(q, y) - a_.frequency_x(p, y));
                const cplx base = a_.weight_y(y) * b_.weight_y(y) *
                                  x_integral(region, theta, cell.half_width, power_);
                for (int d = -span; d <= span; ++d) {
                    out[static_cast<std::size_t>(d + span)] +=
                        base * exp_integral(phase_ * (shift + step * d), cell.y_lower, cell.y_upper);
                }
            }
            return 0.0;
        }

        QuadratureOptions qo;
        qo.abs_tol = options_.quadrature_tolerance;
        qo.max_panels = options_.max_panels;
        const double length = region.y_upper() - region.y_lower();
        const double oscillation = phase_ * (std::abs(step) * span + std::abs(shift)) * length;
        qo.initial_panels = 1 + static_cast<int>(std::ceil(oscillation / std::numbers::pi));

        auto integrand = [&](double y, std::span<cplx> v) {
            const double h = region.half_width(y);
            const double theta = phase_ * (b_.frequency_x(q, y) - a_.frequency_x(p, y));
            const cplx base = a_.weight_y(y) * b_.weight_y(y) * x_integral(region, theta, h, power_);
            for (int d = -span; d <= span; ++d)
                v[static_cast<std::size_t>(d + span)] =
                    base * std::polar(1.0, phase_ * (shift + step * d) * y);
        };
        auto r = integrate(integrand, width(), region.y_lower(), region.y_upper(),
                           region.breakpoints(), qo);
        if (!r.converged) {
            std::ostringstream os;
            os << "quadrature did not converge for x-indices (" << a_.x_index(p) << ", "
               << b_.x_index(q) << "): achieved error " << r.error << " > "
               << options_.quadrature_tolerance << " with " << r.panels << " panels";
            throw Error(ErrorCode::quadrature, os.str());
        }
        out = std::move(r.values);
        return r.error;
    }

private:
    const BasisFamily& a_;
    const BasisFamily& b_;
    const GramOptions& options_;
    int na_ = 0;
    int nb_ = 0;
    double phase_ = 1.0;
    double power_ = 0.0;
    bool closed_ = false;
};

}  // namespace

CrossGram cross_gram(const BasisFamily& a, const BasisFamily& b, const GramOptions& options) {
    PairEngine engine(a, b, options);
    CrossGram c;
    c.matrix = Matrix::Zero(static_cast<Eigen::Index>(a.size()), static_cast<Eigen::Index>(b.size()));
    c.closed_form = engine.closed_form();
    const std::size_t pairs = a.x_count() * b.x_count();
    std::vector<double> errors(pairs, 0.0);
    const int na = a.y_truncation();
    const int nb = b.y_truncation();
    parallel_for(pairs, [&](std::size_t idx) {
        const std::size_t p = idx / b.x_count();
        const std::size_t q = idx % b.x_count();
        std::vector<cplx> v;
        errors[idx] = engine.pair(p, q, v);
        for (int k = -na; k <= na; ++k)
            for (int kk = -nb; kk <= nb; ++kk)
                c.matrix(static_cast<Eigen::Index>(a.flat(p, k)),
                         static_cast<Eigen::Index>(b.flat(q, kk))) =
                    v[static_cast<std::size_t>(kk - k + na + nb)];
    });
    c.error = errors.empty() ? 0.0 : *std::max_element(errors.begin(), errors.end());
    return c;
}

GramReport gram_matrix(const BasisFamily& family, const GramOptions& options) {
    PairEngine engine(family, family, options);
    const auto n = static_cast<Eigen::Index>(family.size());
    Matrix g = Matrix::Zero(n, n);
    const std::size_t xc = family.x_count();
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t p = 0; p < xc; ++p)
        for (std::size_t q = p; q < xc; ++q) pairs.emplace_back(p, q);
    std::vector<double> errors(pairs.size(), 0.0);
    const int ny = family.y_truncation();
    parallel_for(pairs.size(), [&](std::size_t idx) {
        const auto [p, q] = pairs[idx];
        std::vector<cplx> v;
        errors[idx] = engine.pair(p, q, v);
        for (int k = -ny; k <= ny; ++k) {
            for (int kk = -ny; kk <= ny; ++kk) {
                const auto i = static_cast<Eigen::Index>(family.flat(p, k));
                const auto j = static_cast<Eigen::Index>(family.flat(q, kk));
                const cplx value = v[static_cast<std::size_t>(kk - k + 2 * ny)];
                g(i, j) = value;
                if (p != q) g(j, i) = std::conj(value);
            }
        }
    });
    GramReport r = summarize_gram(std::move(g), options.quadrature_tolerance, options);
    r.family = family.name();
    r.x_count = xc;
    r.y_truncation = ny;
    r.closed_form = engine.closed_form();
    r.quadrature_error = errors.empty() ? 0.0 : *std::max_element(errors.begin(), errors.end());
    return r;
}

cplx inner_product(const BasisFamily& a, std::size_t i, const BasisFamily& b, std::size_t j,
                   const GramOptions& options) {
    if (i >= a.size() || j >= b.size()) throw Error(ErrorCode::invalid_argument, "index out of range");
    PairEngine engine(a, b, options);
    std::vector<cplx> v;
    engine.pair(a.position_of(i), b.position_of(j), v);
    const int d = b.k_of(j) - a.k_of(i) + a.y_truncation() + b.y_truncation();
    return std::conj(v[static_cast<std::size_t>(d)]);
}

Matrix cross_gram_1d(const ExpFamily1D& a, const ExpFamily1D& b) {
    if (a.convention != b.convention)
        throw Error(ErrorCode::invalid_argument, "families use different phase conventions");
    const auto sa = a.domain.segments();
    const auto sb = b.domain.segments();
    if (sa.size() != sb.size() ||
        !std::equal(sa.begin(), sa.end(), sb.begin(), [](const Segment& l, const Segment& r) {
            return l.left == r.left && l.right == r.right;
        }))
        throw Error(ErrorCode::invalid_argument, "families live on different domains");
    const double s = phase_factor(a.convention);
    Matrix m(static_cast<Eigen::Index>(a.size()), static_cast<Eigen::Index>(b.size()));
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            const double theta = s * (b.frequencies[j] - a.frequencies[i]);
            cplx sum{};
            for (const auto& seg : sa) sum += exp_integral(theta, seg.left, seg.right);
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = sum;
        }
    }
    return m;
}

Matrix gram_1d(const ExpFamily1D& family) { return cross_gram_1d(family, family); }

Matrix tensor_gram(const TensorFamily& family) {
    const Matrix gv = gram_1d(family.v());
    const auto n = static_cast<Eigen::Index>(family.size());
    Matrix g(n, n);
    const std::size_t positions = family.v().size();
    for (std::size_t p = 0; p < positions; ++p) {
        for (std::size_t q = 0; q < positions; ++q) {
            const Matrix gw = cross_gram_1d(family.w(p), family.w(q));
            const cplx vpq = gv(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q));
            g.block(static_cast<Eigen::Index>(family.offset(p)),
                    static_cast<Eigen::Index>(family.offset(q)), gw.rows(), gw.cols()) = vpq * gw;
        }
    }
    return g;
}

FrameBounds frame_bounds(const GramReport& report) { return {report.eigen_min, report.eigen_max}; }

}  // namespace expbasis
