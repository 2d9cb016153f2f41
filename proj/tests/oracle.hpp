#pragma once

// Brute-force reference integrators, deliberately independent of the
// library's quadrature.

#include <complex>
#include <functional>

namespace oracle {

using cplx = std::complex<double>;

inline cplx simpson(const std::function<cplx(double)>& f, double a, double b, int panels = 400) {
    const double h = (b - a) / (2 * panels);
    cplx sum = f(a) + f(b);
    for (int i = 1; i < 2 * panels; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return sum * h / 3.0;
}

// \int_{y0}^{y1} \int_{lo(y)}^{hi(y)} f(x, y) dx dy
inline cplx simpson_2d(const std::function<cplx(double, double)>& f, double y0, double y1,
                       const std::function<double(double)>& lo, const std::function<double(double)>& hi,
                       int panels = 200) {
    return simpson(
        [&](double y) { return simpson([&](double x) { return f(x, y); }, lo(y), hi(y), panels); }, y0, y1,
        panels);
}

}  // namespace oracle
