#include "expbasis/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <queue>

namespace expbasis {

namespace {

// Kronrod abscissae on [0, 1]; odd entries (1, 3, 5) and the centre are the
// 7-point Gauss nodes.
constexpr double xgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

constexpr double wgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

constexpr double wg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a = 0.0;
    double b = 0.0;
    double error = 0.0;
    std::vector<cplx> value;
};

void evaluate_panel(const VectorIntegrand& f, std::size_t dim, Panel& p,
                    std::vector<cplx>& scratch_lo, std::vector<cplx>& scratch_hi,
                    std::vector<cplx>& gauss) {
    const double c = 0.5 * (p.a + p.b);
    const double h = 0.5 * (p.b - p.a);
    p.value.assign(dim, cplx{});
    gauss.assign(dim, cplx{});

    f(c, scratch_lo);
    for (std::size_t d = 0; d < dim; ++d) {
        p.value[d] = wgk[7] * scratch_lo[d];
        gauss[d] = wg[3] * scratch_lo[d];
    }
    for (int j = 0; j < 7; ++j) {
        f(c - h * xgk[j], scratch_lo);
        f(c + h * xgk[j], scratch_hi);
        for (std::size_t d = 0; d < dim; ++d) {
            const cplx sum = scratch_lo[d] + scratch_hi[d];
            p.value[d] += wgk[j] * sum;
            if (j % 2 == 1) gauss[d] += wg[j / 2] * sum;
        }
    }
    double err = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
        p.value[d] *= h;
        err = std::max(err, std::abs(p.value[d] - h * gauss[d]));
    }
    p.error = err;
}

}  // namespace

QuadratureResult integrate(const VectorIntegrand& f, std::size_t dim, double a, double b,
                           std::span<const double> breakpoints,
                           const QuadratureOptions& options) {
    QuadratureResult result;
    result.values.assign(dim, cplx{});
    if (!(b > a) || dim == 0) {
        result.converged = true;
        return result;
    }

    std::vector<double> cuts{a};
    for (double x : breakpoints) {
        if (x > a && x < b) cuts.push_back(x);
    }
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::vector<cplx> lo(dim), hi(dim), gauss(dim);
    std::vector<Panel> panels;
    const int per = std::max(1, options.initial_panels);
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
        const double width = (cuts[s + 1] - cuts[s]) / per;
        for (int i = 0; i < per; ++i) {
            Panel p;
            p.a = cuts[s] + i * width;
            p.b = (i + 1 == per) ? cuts[s + 1] : cuts[s] + (i + 1) * width;
            evaluate_panel(f, dim, p, lo, hi, gauss);
            panels.push_back(std::move(p));
        }
    }

    using Entry = std::pair<double, std::size_t>;
    std::priority_queue<Entry> queue;
    double total = 0.0;
    for (std::size_t i = 0; i < panels.size(); ++i) {
        queue.emplace(panels[i].error, i);
        total += panels[i].error;
    }

    const double min_width = 64.0 * std::numeric_limits<double>::epsilon() * (b - a);
    while (total > options.abs_tol && !queue.empty() &&
           static_cast<int>(panels.size()) < options.max_panels) {
        const auto [err, idx] = queue.top();
        queue.pop();
        Panel& worst = panels[idx];
        if (worst.b - worst.a < min_width) continue;  // stays in the total; cannot refine

        const double mid = 0.5 * (worst.a + worst.b);
        Panel right;
        right.a = mid;
        right.b = worst.b;
        worst.b = mid;
        evaluate_panel(f, dim, worst, lo, hi, gauss);
        evaluate_panel(f, dim, right, lo, hi, gauss);
        total += worst.error + right.error - err;
        queue.emplace(worst.error, idx);
        panels.push_back(std::move(right));
        queue.emplace(panels.back().error, panels.size() - 1);
    }

    std::sort(panels.begin(), panels.end(),
              [](const Panel& l, const Panel& r) { return l.a < r.a; });
    total = 0.0;
    for (const auto& p : panels) {
        for (std::size_t d = 0; d < dim; ++d) result.values[d] += p.value[d];
        total += p.error;
    }
    result.error = total;
    result.panels = static_cast<int>(panels.size());
    result.converged = total <= options.abs_tol;
    return result;
}

cplx integrate_scalar(const std::function<cplx(double)>& f, double a, double b,
                      std::span<const double> breakpoints, const QuadratureOptions& options,
                      double* error) {
    auto r = integrate([&](double y, std::span<cplx> out) { out[0] = f(y); }, 1, a, b,
                       breakpoints, options);
    if (error) *error = r.error;
    return r.values[0];
}

double integrate_real(const std::function<double(double)>& f, double a, double b,
                      std::span<const double> breakpoints, const QuadratureOptions& options) {
    return integrate_scalar([&](double y) { return cplx(f(y), 0.0); }, a, b, breakpoints,
                            options)
        .real();
}

cplx exp_integral(double theta, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double t = theta * half;
    double s;
    if (std::abs(t) < 1e-6) {
        const double t2 = t * t;
        s = half * (1.0 - t2 / 6.0 + t2 * t2 / 120.0);
    } else {
        s = std::sin(t) / theta;
    }
    return std::polar(2.0 * s, theta * mid);
}

cplx exp_moment_integral(double theta, double a, double b, double power) {
    if (power == 0.0) return exp_integral(theta, a, b);
    const bool smooth = power == std::floor(power);
    int n = 12 + static_cast<int>(std::ceil(0.5 * std::abs(theta) * (b - a)));
    n += smooth ? static_cast<int>(std::ceil(0.5 * power)) : 96;
    const GaussRule& rule = gauss_legendre(n);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    cplx sum{};
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double x = mid + half * rule.nodes[i];
        sum += rule.weights[i] * std::pow(x, power) * std::polar(1.0, theta * x);
    }
    return half * sum;
}

const GaussRule& gauss_legendre(int n) {
    static std::mutex mutex;
    static std::map<int, GaussRule> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0, p1 = x;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return cache.emplace(n, std::move(rule)).first->second;
}

}  // namespace expbasis
