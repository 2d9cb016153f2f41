#include "doctest.h"

#include <cmath>
#include <numbers>

#include "expbasis/domains.hpp"
#include "expbasis/error.hpp"

using namespace expbasis;

namespace {

ProfileFunction linear() {
    return ProfileFunction([](double y) { return 1.0 + 0.5 * y; }, 0.9, 1.6, {}, "1+y/2");
}

}  // namespace

TEST_CASE("validate_profile examples") {
    const auto c = validate_profile(ProfileFunction([](double) { return 1.0; }, 0.5, 2.0), 1001);
    CHECK(c.ok());
    CHECK(c.min == 1.0);
    CHECK(c.max == 1.0);

    const auto l = validate_profile(linear(), 1001);
    CHECK(l.ok());
    CHECK(l.min == doctest::Approx(1.0));
    CHECK(l.max == doctest::Approx(1.5));

    // f(y) = y touches zero, which is not admissible at all.
    CHECK_THROWS_AS(validate_profile(ProfileFunction([](double y) { return y; }, 0.1, 1.0), 1001), Error);

    const auto v = validate_profile(ProfileFunction([](double y) { return 0.05 + y; }, 0.1, 2.0), 1001);
    REQUIRE(!v.ok());
    CHECK(v.violations.front() == doctest::Approx(0.0));
}

TEST_CASE("approximate_profile of a constant needs one cell") {
    for (int n : {1, 7, 64}) {
        const auto a = approximate_profile(ProfileFunction::constant(2.5), n);
        CHECK(a.partitions == 1);
        CHECK(a.step.value(0) == 2.5);
    }
}

// Partition counts from an independent grid scan over N = 1, 2, 4, ... on a
// 10^4-point grid with s_n taken at left cell endpoints.
TEST_CASE("approximate_profile matches the grid-scan oracle") {
    const int expected[][2] = {{1, 4}, {2, 8}, {4, 16}, {8, 32}, {16, 64}};
    int previous = 0;
    for (const auto& [n, N] : expected) {
        const auto a = approximate_profile(linear(), n);
        CHECK(a.partitions == N);
        CHECK(a.inverse_error < 1.0 / (4 * n));
        CHECK(a.uniform_error < 1.0 / (4 * n));
        CHECK(a.partitions >= previous);
        previous = a.partitions;
        CHECK(a.step.value(0) == doctest::Approx(1.0));
    }
}

TEST_CASE("approximate_profile puts declared jumps on the grid") {
    const ProfileFunction f([](double y) { return y < 1.0 / 3.0 ? 1.0 : 0.5; }, 0.5, 1.0, {1.0 / 3.0});
    const auto a = approximate_profile(f, 4);
    CHECK(a.partitions % 3 == 0);
    CHECK(a.inverse_error < 1.0 / 16.0);
}

TEST_CASE("multi-interval examples") {
    const auto one = build_multiinterval(StepProfile({1.0}));
    REQUIRE(one.segments().size() == 1);
    CHECK(one.segments()[0].left == -1.0);
    CHECK(one.segments()[0].right == 1.0);

    const auto two = build_multiinterval(StepProfile({1.0, 0.5}));
    CHECK(two.segments()[1].left == 1.5);
    CHECK(two.segments()[1].right == 2.5);
    CHECK(two.total_length() == 3.0);

    const auto three = build_multiinterval(StepProfile({1.0, 1.0, 1.0}));
    CHECK(three.segments()[1].left == 1.0);
    CHECK(three.segments()[2].right == 5.0);
    CHECK(!three.contains(1.0));
    CHECK(!three.contains(3.0));
    CHECK(three.contains(2.0));

    CHECK_THROWS_AS(build_multiinterval(StepProfile({1.0, 1.2})), Error);
}

TEST_CASE("multi-intervals are disjoint for every admissible step profile") {
    for (int N = 1; N <= 6; ++N) {
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<double> b;
            for (int j = 0; j < N; ++j) b.push_back(0.05 + 0.95 * std::fmod(0.618034 * (trial * N + j + 1), 1.0));
            const auto I = build_multiinterval(StepProfile(b));
            for (int j = 0; j + 1 < N; ++j) CHECK(I.segments()[j].right <= I.segments()[j + 1].left);
        }
    }
}

TEST_CASE("translation plan") {
    const auto p1 = translation_plan(StepProfile({1.0}));
    REQUIRE(p1.size() == 1);
    CHECK((p1[0].dx == 0 && p1[0].dy == 0));

    const StepProfile s({1.0, 0.7, 0.4});
    const auto p = translation_plan(s);
    const int want[][2] = {{0, 0}, {2, -1}, {4, -2}};
    const auto I = build_multiinterval(s);
    for (int j = 0; j < 3; ++j) {
        CHECK(p[j].dx == want[j][0]);
        CHECK(p[j].dy == want[j][1]);
        // R_j = (-b_j, b_j) x (j-1, j) moves onto the j-th segment times (0, 1).
        CHECK(-s.value(j) + p[j].dx == I.segments()[j].left);
        CHECK(s.value(j) + p[j].dx == I.segments()[j].right);
        CHECK(j + p[j].dy == 0);
    }
}

TEST_CASE("step profiles use half-open cells") {
    const StepProfile s({3.0, 2.0, 1.0, 4.0});
    CHECK(s(0.0) == 3.0);
    CHECK(s(0.25) == 2.0);
    CHECK(s(0.7499) == 1.0);
    CHECK(s(1.0) == 4.0);
}

TEST_CASE("spherical trapezoid volumes") {
    CHECK(unit_sphere_measure(2) == 1.0);
    CHECK(unit_sphere_measure(3) == doctest::Approx(2.0 * std::numbers::pi));
    CHECK(unit_sphere_measure(4) == doctest::Approx(4.0 * std::numbers::pi));
    // Cone frustum of radii 1 and 1.5 and height 1.
    const SphericalTrapezoid t(linear(), 3);
    CHECK(t.volume() == doctest::Approx(std::numbers::pi * (1.0 + 1.5 + 2.25) / 3.0));
}
