#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "expbasis/error.hpp"
#include "expbasis/expr.hpp"
#include "expbasis/parallel.hpp"
#include "expbasis/quadrature.hpp"
#include "expbasis/random.hpp"

using namespace expbasis;
using std::numbers::pi;

TEST_CASE("gauss-kronrod integrates smooth and kinked functions") {
    CHECK(integrate_real([](double x) { return std::exp(x); }, 0.0, 1.0) ==
          doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-13));
    const double kink = 0.3;
    const std::vector<double> breaks = {kink};
    const double v = integrate_real([&](double x) { return std::abs(x - kink); }, 0.0, 1.0, breaks);
    CHECK(v == doctest::Approx(0.5 * (kink * kink + (1 - kink) * (1 - kink))).epsilon(1e-14));
}

TEST_CASE("vector quadrature shares nodes across components") {
    auto f = [](double x, std::span<cplx> out) {
        for (std::size_t m = 0; m < out.size(); ++m) out[m] = std::polar(1.0, static_cast<double>(m) * x);
    };
    QuadratureOptions o;
    o.abs_tol = 1e-12;
    o.initial_panels = 8;
    const auto r = integrate(f, 6, 0.0, 2.0 * pi, {}, o);
    REQUIRE(r.converged);
    CHECK(std::abs(r.values[0] - cplx(2.0 * pi)) < 1e-12);
    for (std::size_t m = 1; m < 6; ++m) CHECK(std::abs(r.values[m]) < 1e-11);
}

TEST_CASE("exp_integral is stable near zero frequency") {
    // Power series for small theta, where the closed form cancels badly.
    auto series = [](double theta, double a, double b) {
        cplx sum = 0.0, term = 1.0;
        double pa = a, pb = b;
        for (int m = 0; m < 40; ++m) {
            sum += term * (pb - pa) / static_cast<double>(m + 1);
            term *= cplx(0.0, theta) / static_cast<double>(m + 1);
            pa *= a;
            pb *= b;
        }
        return sum;
    };
    for (double theta : {0.0, 1e-14, 1e-9, 1e-4, 0.7})
        CHECK(std::abs(exp_integral(theta, -0.5, 1.0) - series(theta, -0.5, 1.0)) < 1e-15);
    const double theta = 25.0;
    const cplx closed = (std::polar(1.0, theta) - std::polar(1.0, -0.5 * theta)) / cplx(0.0, theta);
    CHECK(std::abs(exp_integral(theta, -0.5, 1.0) - closed) < 1e-15);
}

TEST_CASE("exp_moment_integral matches quadrature") {
    QuadratureOptions o;
    o.abs_tol = 1e-14;
    for (double power : {0.0, 1.0, 2.0, 0.5}) {
        for (double theta : {0.0, 1e-6, 3.0, 40.0}) {
            const cplx q = integrate_scalar(
                [&](double x) { return std::pow(x, power) * std::polar(1.0, theta * x); }, 0.2, 1.3, {}, o);
            CHECK(std::abs(exp_moment_integral(theta, 0.2, 1.3, power) - q) < 1e-11);
        }
    }
}

TEST_CASE("gauss-legendre rules are exact for polynomials") {
    const GaussRule& g = gauss_legendre(10);
    double sum = 0.0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) sum += g.weights[i] * std::pow(g.nodes[i], 18);
    CHECK(sum == doctest::Approx(2.0 / 19.0).epsilon(1e-14));
}

TEST_CASE("expression parser") {
    const Expression e = Expression::parse("1 + y/2", {"y"});
    CHECK(e(0.5) == doctest::Approx(1.25));
    const Expression g = Expression::parse("2^3^2 - -sin(pi/2) + max(n, 3) * step(y - 0.5)", {"n", "y"});
    const double at[] = {5.0, 0.7};
    CHECK(g(at) == doctest::Approx(512.0 + 1.0 + 5.0));
    const double below[] = {5.0, 0.2};
    CHECK(g(below) == doctest::Approx(513.0));
    CHECK_THROWS_AS(Expression::parse("1 +", {"y"}), Error);
    CHECK_THROWS_AS(Expression::parse("system(y)", {"y"}), Error);
    CHECK_THROWS_AS(Expression::parse("z", {"y"}), Error);
}

TEST_CASE("trial streams are reproducible and independent of threads") {
    auto a = trial_stream(7, 3);
    auto b = trial_stream(7, 3);
    auto c = trial_stream(7, 4);
    const auto va = random_unit_vector(a, 50);
    CHECK(va.isApprox(random_unit_vector(b, 50)));
    CHECK(va.norm() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(!va.isApprox(random_unit_vector(c, 50)));

    std::vector<double> serial(64), threaded(64);
    set_thread_count(1);
    parallel_for(serial.size(), [&](std::size_t t) {
        auto r = trial_stream(11, t);
        serial[t] = random_unit_vector(r, 8)(0).real();
    });
    set_thread_count(4);
    parallel_for(threaded.size(), [&](std::size_t t) {
        auto r = trial_stream(11, t);
        threaded[t] = random_unit_vector(r, 8)(0).real();
    });
    set_thread_count(1);
    CHECK(serial == threaded);
}
