#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "expbasis/bases.hpp"
#include "expbasis/gram.hpp"

namespace expbasis {

enum class KadecVerdict { certified, boundary, violated };
const char* kadec_verdict_name(KadecVerdict v);

struct KadecEntry {
    int n;
    double epsilon;    // grid sup of |f/g_n - 1|
    double threshold;  // 1/(4|n|)
    bool pass;         // epsilon < threshold
};

struct KadecReport {
    std::vector<KadecEntry> per_n;  // n = -n_max..n_max without 0
    double L = 0.0;                 // sup pi |n| epsilon_n
    std::optional<double> lambda;   // 1 - cos L + sin L, only when L < pi/4
    KadecVerdict verdict = KadecVerdict::certified;
    int grid = 0;
    double refinement_change = 0.0;  // largest relative change under one refinement
};

// |epsilon_n - 1/(4|n|)| below this counts as equality.
inline constexpr double kadec_boundary_tolerance = 1e-12;

// Grid sups on y_i = i/(grid-1), repeated on the refined grid of 2 grid - 1
// points; a relative change above 1e-3 raises grid_unstable.
KadecReport kadec_check(const ProfileFunction& profile, const PerturbationFamily& g, int n_max,
                        int grid);

// 1 - cos L + sin L for 0 <= L < pi/4.
double pw_bound(double L);

// g_n = n f / (n - sgn(n)/4), exponents n - sgn(n)/4.
PerturbationFamily ingham_family();
// g_n = f / (1 + theta/(4 n^2)), exponents n + theta/(4 n).
PerturbationFamily theta_family(double theta);

struct PwOptions {
    int trials = 100;
    std::uint64_t seed = 0;
    double tolerance = 1e-9;  // allowed excess of LHS / lambda over 1
    int kadec_grid = 1001;
    GramOptions gram;
};

struct PwInequalityReport {
    double lambda = 0.0;
    double L = 0.0;
    int trials = 0;
    std::uint64_t seed = 0;
    double max_lhs = 0.0;
    double max_ratio = 0.0;    // max over trials of LHS / lambda
    double sup_ratio = 0.0;    // sqrt(largest eigenvalue of the difference form) / lambda
    Vector worst_coefficients;  // trial attaining max_ratio
    bool passed = false;
    double tolerance = 0.0;
    double quadrature_error = 0.0;
};

// Draws unit coefficient vectors c over the truncation and evaluates
// LHS = || sum c_nk (e_nk - e~_nk) ||_{L^2(R)} on R = [-1,1] x [0,1], with
// e_nk = 2^{-1/2} exp(i pi (n x + 2 k y)) and e~_nk the perturbed elements
// transported to R. Requires a certified Kadec report.
PwInequalityReport pw_inequality_test(const ProfileFunction& profile, const PerturbationFamily& g,
                                      Truncation truncation, const PwOptions& options = {});

}  // namespace expbasis
