#include "expbasis/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "expbasis/error.hpp"
#include "expbasis/parallel.hpp"
#include "expbasis/random.hpp"

namespace expbasis {

const char* kadec_verdict_name(KadecVerdict v) {
    switch (v) {
        case KadecVerdict::certified: return "certified";
        case KadecVerdict::boundary: return "boundary";
        case KadecVerdict::violated: return "violated";
    }
    return "?";
}

namespace {

double grid_sup(const ProfileFunction& f, const PerturbationFamily& g, int n, int grid) {
    double sup = 0.0;
    for (int i = 0; i < grid; ++i) {
        const double y = static_cast<double>(i) / (grid - 1);
        const double gn = g.g(n, y, f);
        if (!std::isfinite(gn) || gn == 0.0)
            throw Error(ErrorCode::admissibility,
                        "g_" + std::to_string(n) + " vanishes at y=" + std::to_string(y));
        sup = std::max(sup, std::abs(f(y) / gn - 1.0));
    }
    return sup;
}

}  // namespace

KadecReport kadec_check(const ProfileFunction& profile, const PerturbationFamily& g, int n_max,
                        int grid) {
    if (n_max < 1) throw Error(ErrorCode::invalid_argument, "n_max must be >= 1");
    if (grid < 2) throw Error(ErrorCode::invalid_argument, "grid must be >= 2");
    KadecReport r;
    r.grid = grid;
    bool boundary = false;
    bool violated = false;
    for (int n = -n_max; n <= n_max; ++n) {
        if (n == 0) continue;
        const double eps = grid_sup(profile, g, n, grid);
        const double refined = grid_sup(profile, g, n, 2 * grid - 1);
        const double scale = std::max(eps, refined);
        if (scale > 0.0) {
            const double change = std::abs(refined - eps) / scale;
            r.refinement_change = std::max(r.refinement_change, change);
            if (change > 1e-3) {
                std::ostringstream os;
                os << "grid " << grid << " too coarse: sup |f/g_" << n << " - 1| moved from "
                   << eps << " to " << refined << " under refinement";
                throw Error(ErrorCode::grid_unstable, os.str());
            }
        }
        const double e = std::max(eps, refined);
        const double threshold = 1.0 / (4.0 * std::abs(n));
        KadecEntry entry{n, e, threshold, e < threshold};
        if (std::abs(e - threshold) < kadec_boundary_tolerance)
            boundary = true;
        else if (e > threshold)
            violated = true;
        r.L = std::max(r.L, std::numbers::pi * std::abs(n) * e);
        r.per_n.push_back(entry);
    }
    r.verdict = violated ? KadecVerdict::violated
                         : (boundary ? KadecVerdict::boundary : KadecVerdict::certified);
    if (r.L < std::numbers::pi / 4.0) r.lambda = pw_bound(r.L);
    return r;
}

double pw_bound(double L) {
    if (!(L >= 0.0) || !(L < std::numbers::pi / 4.0))
        throw Error(ErrorCode::invalid_argument, "pw_bound needs 0 <= L < pi/4");
    return 1.0 - std::cos(L) + std::sin(L);
}

PerturbationFamily ingham_family() {
    return PerturbationFamily::ratio(
        [](int n) { return n - (n > 0 ? 0.25 : -0.25); }, "ingham");
}

PerturbationFamily theta_family(double theta) {
    std::ostringstream os;
    os.precision(17);
    os << "theta(" << theta << ")";
    return PerturbationFamily::ratio([theta](int n) { return n + theta / (4.0 * n); }, os.str());
}

PwInequalityReport pw_inequality_test(const ProfileFunction& profile, const PerturbationFamily& g,
                                      Truncation truncation, const PwOptions& options) {
    if (options.trials < 1) throw Error(ErrorCode::invalid_argument, "trials must be >= 1");
    const KadecReport kadec = kadec_check(profile, g, std::max(1, truncation.nx), options.kadec_grid);
    if (kadec.verdict != KadecVerdict::certified || !kadec.lambda)
        throw Error(ErrorCode::not_certified, std::string("Kadec check is ") +
                                                  kadec_verdict_name(kadec.verdict) +
                                                  ", the Paley-Wiener bound does not apply");

    auto region = std::make_shared<const Region>(Region::rectangle(1.0, 0.0, 1.0));
    BasisFamily::Spec spec;
    spec.convention = PhaseConvention::pi;
    spec.region = region;
    for (int n = -truncation.nx; n <= truncation.nx; ++n) spec.x_indices.push_back(n);
    spec.y_truncation = truncation.ny;
    spec.y_step = 2.0;
    spec.amplitude = 1.0 / std::sqrt(2.0);
    BasisFamily::Spec perturbed = spec;
    spec.name = "rectangle";
    spec.freq_x = XFrequency::constant([](int n) { return static_cast<double>(n); });
    perturbed.name = "rectangle/" + g.name();
    perturbed.freq_x = g.rectangle_frequencies(profile);
    const BasisFamily a(std::move(spec));
    const BasisFamily b(std::move(perturbed));

    const GramReport ga = gram_matrix(a, options.gram);
    const GramReport gb = gram_matrix(b, options.gram);
    const CrossGram c = cross_gram(a, b, options.gram);
    Matrix m = ga.matrix + gb.matrix - c.matrix - c.matrix.adjoint();
    m = 0.5 * (m + m.adjoint());

    PwInequalityReport r;
    r.lambda = *kadec.lambda;
    r.L = kadec.L;
    r.trials = options.trials;
    r.seed = options.seed;
    r.tolerance = options.tolerance;
    r.quadrature_error = std::max({ga.quadrature_error, gb.quadrature_error, c.error});

    auto ratio_of = [&](double lhs) {
        if (r.lambda > 0.0) return lhs / r.lambda;
        return lhs > 1e-12 ? std::numeric_limits<double>::infinity() : 0.0;
    };

    std::vector<double> lhs(static_cast<std::size_t>(options.trials));
    std::vector<Vector> coeffs(lhs.size());
    parallel_for(lhs.size(), [&](std::size_t t) {
        auto rng = trial_stream(options.seed, t);
        coeffs[t] = random_unit_vector(rng, m.rows());
        lhs[t] = std::sqrt(std::max(0.0, coeffs[t].dot(m * coeffs[t]).real()));
    });
    const auto worst = static_cast<std::size_t>(std::max_element(lhs.begin(), lhs.end()) - lhs.begin());
    r.max_lhs = lhs[worst];
    r.max_ratio = ratio_of(r.max_lhs);
    r.worst_coefficients = coeffs[worst];

    const Spectrum spec_m = hermitian_spectrum(m, 0.0);
    r.sup_ratio = ratio_of(std::sqrt(std::max(0.0, spec_m.eigenvalues.back())));
    r.passed = r.max_ratio <= 1.0 + options.tolerance;
    return r;
}

}  // namespace expbasis
