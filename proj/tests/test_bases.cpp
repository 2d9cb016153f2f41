#include "doctest.h"

#include <cmath>
#include <numbers>

#include "expbasis/bases.hpp"
#include "expbasis/error.hpp"
#include "expbasis/gram.hpp"
#include "expbasis/stability.hpp"
#include "oracle.hpp"

using namespace expbasis;
using std::numbers::pi;

namespace {

ProfileFunction linear() {
    return ProfileFunction([](double y) { return 1.0 + 0.5 * y; }, 1.0, 1.5, {}, "1+y/2");
}

std::size_t flat_of(const BasisFamily& f, int n, int k) {
    for (std::size_t p = 0; p < f.x_count(); ++p)
        if (f.x_index(p) == n) return f.flat(p, k);
    FAIL("index not in family");
    return 0;
}

}  // namespace

TEST_CASE("unperturbed weighted family on the unit rectangle") {
    const BasisFamily b = trapezoid_basis(ProfileFunction::constant(1.0), std::nullopt, {3, 2}, true);
    CHECK(b.size() == 35);
    for (int n = -3; n <= 3; ++n) {
        for (int k = -2; k <= 2; ++k) {
            const double x = 0.37, y = 0.81;
            const cplx want = std::polar(1.0 / std::sqrt(2.0), pi * (n * x + 2 * k * y));
            CHECK(std::abs(b(flat_of(b, n, k), x, y) - want) < 1e-15);
        }
    }
}

TEST_CASE("frequencies of the trapezoid family") {
    const BasisFamily b = trapezoid_basis(linear(), std::nullopt, {2, 0}, false);
    for (std::size_t p = 0; p < b.x_count(); ++p)
        CHECK(b.frequency_x(p, 0.6) == doctest::Approx(b.x_index(p) / 1.3));

    const BasisFamily ing = trapezoid_basis(ProfileFunction::constant(1.0), ingham_family(), {2, 0}, false);
    CHECK(ing.frequency_x(3, 0.2) == doctest::Approx(0.75));
    CHECK(ing.frequency_x(0, 0.2) == doctest::Approx(-1.75));
    CHECK(ing.frequency_x(2, 0.2) == 0.0);

    const auto g = ingham_family();
    const ProfileFunction f = linear();
    for (double y : {0.0, 0.4, 1.0}) {
        CHECK(g.g(1, y, f) == doctest::Approx(4.0 / 3.0 * f(y)));
        CHECK(f(y) / g.g(1, y, f) - 1.0 == doctest::Approx(-0.25));
    }
}

TEST_CASE("custom perturbations with zeros are rejected") {
    const auto bad = PerturbationFamily::custom([](int, double y) { return y - 0.5; }, "zero at 1/2");
    CHECK_THROWS_AS(trapezoid_basis(linear(), bad, {2, 1}, true), Error);
}

TEST_CASE("rectangle-to-trapezoid map is an isometry") {
    const ProfileFunction f = linear();
    const IsometryMap map = IsometryMap::rectangle_to_trapezoid(f);
    const PlaneFunction u = [](double x, double y) { return cplx(x * x + y, std::sin(3 * x * y)); };
    const PlaneFunction v = [](double x, double y) { return std::polar(std::exp(0.5 * x), 2.0 * y - x); };
    const PlaneFunction lu = lift_by_isometry(map, u);
    const PlaneFunction lv = lift_by_isometry(map, v);
    const auto one = [](double) { return 1.0; };
    const cplx on_r = oracle::simpson_2d([&](double x, double y) { return u(x, y) * std::conj(v(x, y)); }, 0.0, 1.0,
                                         [&](double y) { return -one(y); }, one);
    const cplx on_t = oracle::simpson_2d([&](double x, double y) { return lu(x, y) * std::conj(lv(x, y)); }, 0.0,
                                         1.0, [&](double y) { return -f(y); }, [&](double y) { return f(y); });
    CHECK(std::abs(on_r - on_t) < 1e-9);

    // The weighted family is the image of the rectangle basis.
    const BasisFamily rect = trapezoid_basis(ProfileFunction::constant(1.0), std::nullopt, {2, 2}, true);
    const BasisFamily trap = trapezoid_basis(f, std::nullopt, {2, 2}, true);
    for (std::size_t i = 0; i < rect.size(); ++i) {
        const PlaneFunction li = lift_by_isometry(map, [&](double x, double y) { return rect(i, x, y); });
        CHECK(std::abs(li(-1.1, 0.3) - trap(i, -1.1, 0.3)) < 1e-14);
    }
    CHECK_THROWS_AS(lu(1.6, 0.5), Error);
}

TEST_CASE("identity map on the unit rectangle") {
    const PlaneFunction psi = [](double x, double y) { return cplx(x, y); };
    const PlaneFunction l = lift_by_isometry(IsometryMap::rectangle_to_trapezoid(ProfileFunction::constant(1.0)), psi);
    CHECK(l(0.3, 0.4) == psi(0.3, 0.4));
    const PlaneFunction r = lift_by_isometry(
        IsometryMap::radial(SphericalTrapezoid(ProfileFunction::constant(1.0), 2)), psi);
    CHECK(r(0.3, 0.4) == psi(0.3, 0.4));
}

TEST_CASE("remainder_shift examples") {
    for (int N : {1, 2, 5}) {
        for (long long h : {-2LL, 0LL, 3LL}) {
            const auto r = remainder_shift(0, N, h);
            CHECK(r.remainder == 0);
            CHECK(r.literal == h);
            CHECK(r.scaled_frequency == N * h);
        }
    }
    const auto a = remainder_shift(5, 2, 3);
    CHECK(a.remainder == 1);
    CHECK(a.literal == 4);
    CHECK(a.scaled_frequency == 7);
    CHECK(phase_consistent(5, a.scaled_frequency, 2, 2));
    // The unscaled value breaks the phase identity on the second step.
    CHECK(!phase_consistent(5, a.literal, 2, 2));

    const auto b = remainder_shift(7, 3, 0);
    CHECK(b.remainder == 1);
    CHECK(b.literal == 1);
    for (int j = 1; j <= 3; ++j) CHECK(phase_consistent(7, b.scaled_frequency, 3, j));

    CHECK(remainder_shift(-5, 3, 0).remainder == 1);
}

TEST_CASE("phase identity holds exhaustively") {
    for (int N = 1; N <= 6; ++N)
        for (long long n = -40; n <= 40; ++n)
            for (long long h = -4; h <= 4; ++h) {
                const auto r = remainder_shift(n, N, h);
                for (int j = 1; j <= N; ++j) REQUIRE(phase_consistent(n, r.scaled_frequency, N, j));
            }
}

TEST_CASE("tiling map matches the direct formula on a multi-rectangle") {
    const StepProfile step({1.0, 1.0});
    const int N = step.steps();
    for (long long n : {-3LL, 0LL, 5LL}) {
        for (long long h : {-1LL, 2LL}) {
            const auto r = remainder_shift(n, N, h);
            const PlaneFunction psi = [&](double x, double y) {
                return std::polar(1.0, 2 * pi * (n * x / (2.0 * N) + (static_cast<double>(r.remainder) / N + h) * y));
            };
            const PlaneFunction l = lift_by_isometry(IsometryMap::multirect_tiling(step), psi);
            for (double y : {0.1, 0.45, 0.6, 0.95}) {
                const double x = 0.3 - y;
                const cplx direct = std::sqrt(N) * std::polar(1.0, 2 * pi * (n * x / (2.0 * N) + r.scaled_frequency * y));
                CHECK(std::abs(l(x, y) - direct) < 1e-12);
            }
        }
    }
}

TEST_CASE("tensor Gram is blockwise products of factor Grams") {
    const MultiInterval unit({{0.0, 1.0}});
    const ExpFamily1D v{PhaseConvention::two_pi, {0.0, 0.7, 1.5}, unit};
    const std::vector<ExpFamily1D> ws = {
        {PhaseConvention::two_pi, {-1.0, 0.0, 1.0}, unit},
        {PhaseConvention::two_pi, {-0.5, 0.25, 1.0}, unit},
        {PhaseConvention::two_pi, {0.1, 0.9, 2.3}, unit},
    };
    const TensorFamily t = tensor_basis(v, [&](std::size_t p) { return std::optional(ws[p]); });
    CHECK(!t.selector_independent());
    REQUIRE(t.size() == 9);
    const Matrix g = tensor_gram(t);
    const Matrix gv = gram_1d(v);
    for (std::size_t p = 0; p < 3; ++p) {
        for (std::size_t q = 0; q < 3; ++q) {
            const Matrix gw = cross_gram_1d(ws[p], ws[q]);
            for (int a = 0; a < 3; ++a) {
                for (int b = 0; b < 3; ++b) {
                    const auto i = static_cast<Eigen::Index>(t.offset(p) + a);
                    const auto j = static_cast<Eigen::Index>(t.offset(q) + b);
                    CHECK(std::abs(g(i, j) - gv(p, q) * gw(a, b)) < 1e-14);
                    const cplx direct = oracle::simpson_2d(
                        [&](double x, double y) { return t(t.offset(q) + b, x, y) * std::conj(t(t.offset(p) + a, x, y)); },
                        0.0, 1.0, [](double) { return 0.0; }, [](double) { return 1.0; }, 150);
                    CHECK(std::abs(g(i, j) - direct) < 1e-7);
                }
            }
        }
    }
}

TEST_CASE("standard product basis is orthonormal") {
    const ExpFamily1D v{PhaseConvention::pi, {-2, -1, 0, 1, 2}, MultiInterval({{-1.0, 1.0}})};
    const ExpFamily1D w{PhaseConvention::two_pi, {-1, 0, 1}, MultiInterval({{0.0, 1.0}})};
    const TensorFamily t = tensor_basis(v, [&](std::size_t) { return std::optional(w); });
    CHECK(t.selector_independent());
    const Matrix g = tensor_gram(t);
    CHECK((g - 2.0 * Matrix::Identity(15, 15)).cwiseAbs().maxCoeff() < 1e-15);
    CHECK_THROWS_AS(tensor_basis(v, [](std::size_t p) -> std::optional<ExpFamily1D> {
                        if (p == 3) return std::nullopt;
                        return ExpFamily1D{PhaseConvention::two_pi, {0.0}, MultiInterval({{0.0, 1.0}})};
                    }),
                    Error);
}

TEST_CASE("spherical family weights") {
    const BasisFamily d2 = spherical_basis(SphericalTrapezoid(ProfileFunction::constant(1.0), 2), {1, 1}, true);
    for (std::size_t i = 0; i < d2.size(); ++i) {
        const int n = d2.x_index(d2.position_of(i));
        const int k = d2.k_of(i);
        CHECK(std::abs(d2(i, 0.3, 0.6) - std::polar(1.0, 2 * pi * (n * 0.3 + k * 0.6))) < 1e-14);
    }
    const BasisFamily d3 = spherical_basis(SphericalTrapezoid(ProfileFunction::constant(1.0), 3), {1, 1}, true);
    const std::size_t zero = d3.flat(1, 0);
    CHECK(std::abs(d3(zero, 0.25, 0.5) - cplx(1.0 / std::sqrt(2 * pi * 0.25))) < 1e-14);
}
