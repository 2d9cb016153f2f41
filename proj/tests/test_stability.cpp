#include "doctest.h"

#include <cmath>
#include <numbers>

#include "expbasis/error.hpp"
#include "expbasis/stability.hpp"
#include "oracle.hpp"

using namespace expbasis;
using std::numbers::pi;

namespace {

ProfileFunction linear() {
    return ProfileFunction([](double y) { return 1.0 + 0.5 * y; }, 1.0, 1.5, {}, "1+y/2");
}

}  // namespace

TEST_CASE("unperturbed family is certified with lambda 0") {
    const KadecReport k = kadec_check(linear(), PerturbationFamily::identity(), 10, 1001);
    CHECK(k.verdict == KadecVerdict::certified);
    CHECK(k.L == 0.0);
    REQUIRE(k.lambda);
    CHECK(*k.lambda == 0.0);
    for (const auto& e : k.per_n) CHECK(e.epsilon == 0.0);
}

TEST_CASE("Ingham family sits on the boundary") {
    const KadecReport k = kadec_check(ProfileFunction::constant(1.0), ingham_family(), 20, 1001);
    CHECK(k.verdict == KadecVerdict::boundary);
    CHECK(!k.lambda);
    for (const auto& e : k.per_n) CHECK(e.epsilon * 4 * std::abs(e.n) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("theta family is certified with the closed-form L") {
    const KadecReport k = kadec_check(linear(), theta_family(0.9), 16, 1001);
    CHECK(k.verdict == KadecVerdict::certified);
    for (const auto& e : k.per_n)
        CHECK(e.epsilon == doctest::Approx(0.9 / (4.0 * e.n * e.n)).epsilon(1e-12));
    CHECK(k.L == doctest::Approx(0.9 * pi / 4).epsilon(1e-12));
    REQUIRE(k.lambda);
    CHECK(*k.lambda == doctest::Approx(pw_bound(0.9 * pi / 4)));
}

TEST_CASE("Kadec verdict is invariant under scaling the profile") {
    const KadecReport a = kadec_check(linear(), theta_family(0.5), 8, 501);
    const KadecReport b = kadec_check(linear().scaled(3.7), theta_family(0.5), 8, 501);
    CHECK(a.verdict == b.verdict);
    CHECK(a.L == doctest::Approx(b.L).epsilon(1e-12));
}

TEST_CASE("custom perturbation beyond the quarter is violated") {
    const auto g = PerturbationFamily::custom([](int n, double) { return n / (n - 0.3 * (n > 0 ? 1 : -1)); },
                                              "0.3 shift");
    const KadecReport k = kadec_check(ProfileFunction::constant(1.0), g, 5, 101);
    CHECK(k.verdict == KadecVerdict::violated);
}

TEST_CASE("pw_bound values") {
    CHECK(pw_bound(0.0) == 0.0);
    // 1 - cos(pi/8) + sin(pi/8), evaluated once and frozen.
    CHECK(pw_bound(pi / 8) == doctest::Approx(0.458803899854).epsilon(1e-12));
    CHECK(pw_bound(std::nextafter(pi / 4, 0.0)) == doctest::Approx(1.0).epsilon(1e-12));
    double prev = -1.0;
    for (int i = 0; i < 1000; ++i) {
        const double v = pw_bound(pi / 4 * i / 1000.0);
        CHECK(v > prev);
        prev = v;
    }
    CHECK_THROWS_AS(pw_bound(pi / 4), Error);
    CHECK_THROWS_AS(pw_bound(-0.1), Error);
}

TEST_CASE("PW test of the unperturbed family has zero left-hand side") {
    const PwInequalityReport r = pw_inequality_test(linear(), PerturbationFamily::identity(), {3, 2});
    CHECK(r.max_lhs < 1e-7);
    CHECK(r.passed);
}

TEST_CASE("PW test refuses uncertified families") {
    CHECK_THROWS_AS(pw_inequality_test(ProfileFunction::constant(1.0), ingham_family(), {3, 1}), Error);
}

TEST_CASE("PW single mode against a one-dimensional oracle") {
    // For c_{1,0} = 1 the left-hand side is sqrt(1/2 \int_R |1 - e^{i pi delta x}|^2),
    // delta = 0.9/4 the exponent shift of n = 1.
    const double delta = 0.9 / 4.0;
    const double closed = 2.0 - 2.0 * std::sin(pi * delta) / (pi * delta);
    const double simpson =
        0.5 * oracle::simpson([&](double x) { return cplx(std::norm(1.0 - std::polar(1.0, pi * delta * x))); }, -1.0, 1.0)
                  .real();
    CHECK(closed == doctest::Approx(simpson).epsilon(1e-10));

    PwOptions o;
    o.trials = 50;
    const PwInequalityReport r = pw_inequality_test(linear(), theta_family(0.9), {1, 0}, o);
    // The worst unit vector of a 3-mode problem dominates the single mode.
    CHECK(r.sup_ratio * r.lambda >= std::sqrt(closed) - 1e-9);
    CHECK(r.max_ratio <= r.sup_ratio + 1e-12);
    CHECK(r.passed);
}

TEST_CASE("PW Monte Carlo is reproducible") {
    PwOptions o;
    o.trials = 20;
    o.seed = 42;
    const auto a = pw_inequality_test(linear(), theta_family(0.9), {2, 2}, o);
    const auto b = pw_inequality_test(linear(), theta_family(0.9), {2, 2}, o);
    CHECK(a.max_lhs == b.max_lhs);
    CHECK(a.worst_coefficients == b.worst_coefficients);
}
