#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace expbasis {

using cplx = std::complex<double>;

struct QuadratureOptions {
    double abs_tol = 1e-9;
    // Panels per breakpoint interval before adaptive refinement starts.
    int initial_panels = 1;
    int max_panels = 200000;
};

struct QuadratureResult {
    std::vector<cplx> values;
    double error = 0.0;  // sum over panels of the max-component |K15 - G7|
    int panels = 0;
    bool converged = false;
};

// Fills out[0..dim) with the integrand components at y.
using VectorIntegrand = std::function<void(double, std::span<cplx>)>;

// Globally adaptive Gauss-Kronrod 7/15 for a vector of complex integrands
// sharing the same nodes. Breakpoints strictly inside (a, b) are honoured.
QuadratureResult integrate(const VectorIntegrand& f, std::size_t dim, double a, double b,
                           std::span<const double> breakpoints = {},
                           const QuadratureOptions& options = {});

cplx integrate_scalar(const std::function<cplx(double)>& f, double a, double b,
                      std::span<const double> breakpoints = {},
                      const QuadratureOptions& options = {}, double* error = nullptr);

double integrate_real(const std::function<double(double)>& f, double a, double b,
                      std::span<const double> breakpoints = {},
                      const QuadratureOptions& options = {});

// \int_a^b e^{i theta x} dx, stable as theta -> 0.
cplx exp_integral(double theta, double a, double b);

// \int_a^b x^power e^{i theta x} dx for 0 <= a < b and power >= 0.
cplx exp_moment_integral(double theta, double a, double b, double power);

struct GaussRule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

// Gauss-Legendre rule with n points (Newton on the three-term recurrence).
// Rules are cached; the returned reference stays valid.
const GaussRule& gauss_legendre(int n);

}  // namespace expbasis
