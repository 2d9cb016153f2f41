#include "doctest.h"

#include <cmath>
#include <numbers>
#include <sstream>

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

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("inner products of single elements") {
    const BasisFamily u = trapezoid_basis(linear(), std::nullopt, {2, 1}, false);
    const std::size_t i = u.flat(3, 1);
    CHECK(inner_product(u, i, u, i).real() == doctest::Approx(2.5).epsilon(1e-12));

    const BasisFamily rect = trapezoid_basis(ProfileFunction::constant(1.0), std::nullopt, {2, 2}, true);
    CHECK(std::abs(inner_product(rect, rect.flat(0, 1), rect, rect.flat(3, -2))) < 1e-15);

    // (1,0) against (2,0) of the weighted family, against brute-force Simpson.
    const BasisFamily w = trapezoid_basis(linear(), std::nullopt, {2, 0}, true);
    const cplx ip = inner_product(w, w.flat(3, 0), w, w.flat(4, 0));
    CHECK(std::abs(ip) < 1e-8);
    const ProfileFunction f = linear();
    const cplx ref = oracle::simpson_2d(
        [&](double x, double y) { return w(w.flat(3, 0), x, y) * std::conj(w(w.flat(4, 0), x, y)); }, 0.0, 1.0,
        [&](double y) { return -f(y); }, [&](double y) { return f(y); });
    CHECK(std::abs(ip - ref) < 1e-8);
}

TEST_CASE("weighted family on the rectangle has identity Gram") {
    const GramReport g = gram_matrix(trapezoid_basis(ProfileFunction::constant(1.0), std::nullopt, {4, 4}, true));
    CHECK(g.dimension == 81);
    CHECK(g.identity_deviation < 1e-15);
    CHECK(g.verdict == GramVerdict::identity_within_tol);
    const FrameBounds b = frame_bounds(g);
    CHECK(b.lower == doctest::Approx(1.0));
    CHECK(b.upper == doctest::Approx(1.0));
}

TEST_CASE("weighted family on a trapezoid is orthonormal") {
    const GramReport g = gram_matrix(trapezoid_basis(linear(), std::nullopt, {4, 4}, true));
    CHECK(g.identity_deviation < 1e-6);
    CHECK(g.hermitian_deviation < 1e-12);
}

TEST_CASE("closed-form and quadrature Gram paths agree") {
    const auto step = ProfileFunction::from_step(StepProfile({1.0, 0.6, 0.8}));
    const BasisFamily fam = trapezoid_basis(step, theta_family(0.9), {3, 2}, true);
    GramOptions closed;
    GramOptions quad;
    quad.prefer_closed_form = false;
    quad.quadrature_tolerance = 1e-12;
    const GramReport a = gram_matrix(fam, closed);
    const GramReport b = gram_matrix(fam, quad);
    CHECK(a.closed_form);
    CHECK(!b.closed_form);
    CHECK(max_abs(a.matrix - b.matrix) < 1e-10);
}

TEST_CASE("Gram matrices are Hermitian and positive semidefinite") {
    for (int t : {2, 4}) {
        const GramReport g = gram_matrix(trapezoid_basis(linear(), ingham_family(), {t, t}, false));
        CHECK(g.hermitian_deviation < 1e-12);
        CHECK(g.eigen_min >= -1e-10);
    }
}

TEST_CASE("finite sections interlace") {
    // Deleting rows and columns of a Hermitian matrix cannot widen its spectrum.
    const BasisFamily big = trapezoid_basis(ProfileFunction::constant(1.0), ingham_family(), {6, 0}, true);
    const BasisFamily small = trapezoid_basis(ProfileFunction::constant(1.0), ingham_family(), {3, 0}, true);
    const GramReport gb = gram_matrix(big);
    const GramReport gs = gram_matrix(small);
    CHECK(gs.eigen_min >= gb.eigen_min - 1e-12);
    CHECK(gs.eigen_max <= gb.eigen_max + 1e-12);
}

TEST_CASE("Ingham family degrades with truncation") {
    double previous = 2.0;
    for (int t : {4, 8, 16}) {
        const GramReport g = gram_matrix(trapezoid_basis(ProfileFunction::constant(1.0), ingham_family(), {t, t}, true));
        CHECK(g.eigen_min < previous);
        previous = g.eigen_min;
    }
}

TEST_CASE("block deflation matches the dense spectrum") {
    Matrix m = Matrix::Zero(6, 6);
    m.block(0, 0, 3, 3) << 2, cplx(0, 1), 0, cplx(0, -1), 2, 0.5, 0, 0.5, 3;
    m.block(3, 3, 3, 3) = Matrix::Identity(3, 3) * 0.25;
    m(4, 5) = m(5, 4) = 0.1;
    const Spectrum s = hermitian_spectrum(m, 1e-13);
    CHECK(s.blocks >= 2);
    Eigen::SelfAdjointEigenSolver<Matrix> dense(m);
    for (int i = 0; i < 6; ++i) CHECK(s.eigenvalues[i] == doctest::Approx(dense.eigenvalues()(i)).epsilon(1e-12));
}

TEST_CASE("reconstruction of an element is exact") {
    const BasisFamily fam = trapezoid_basis(linear(), std::nullopt, {3, 3}, true);
    const std::size_t idx = fam.flat(2, -1);
    const ReconstructionReport r = reconstruct(Target::element(idx), fam);
    CHECK(r.relative_residual < 1e-8);
    for (Eigen::Index i = 0; i < r.coefficients.size(); ++i)
        CHECK(std::abs(r.coefficients(i) - (static_cast<std::size_t>(i) == idx ? 1.0 : 0.0)) < 1e-6);
}

TEST_CASE("reconstruction residual decreases with truncation") {
    const Target box = Target::box(-0.5, 0.5, 0.0, 0.5);
    const ReconstructionReport r4 = reconstruct(box, trapezoid_basis(linear(), std::nullopt, {4, 4}, true));
    const ReconstructionReport r8 = reconstruct(box, trapezoid_basis(linear(), std::nullopt, {8, 8}, true));
    CHECK(r8.relative_residual < r4.relative_residual);
    CHECK(r4.target_norm == doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("box moments agree between closed form and quadrature") {
    const BasisFamily fam =
        trapezoid_basis(ProfileFunction::from_step(StepProfile({1.0, 0.5})), std::nullopt, {2, 2}, true);
    const Target box = Target::box(-0.3, 0.7, 0.2, 0.9);
    GramOptions quad;
    quad.prefer_closed_form = false;
    quad.quadrature_tolerance = 1e-12;
    const auto a = box.moments(fam, {});
    const auto b = box.moments(fam, quad);
    CHECK((a.b - b.b).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(a.norm2 == doctest::Approx(b.norm2).epsilon(1e-10));
}

TEST_CASE("ill-conditioned systems are refused") {
    GramOptions o;
    o.ill_conditioned_threshold = 1.5;
    const BasisFamily fam = trapezoid_basis(linear(), ingham_family(), {3, 1}, true);
    CHECK_THROWS_AS(reconstruct(Target::box(-1, 1, 0, 1), fam, o), Error);
}

TEST_CASE("restricted harmonic frame") {
    const double a = pi;
    auto box = std::make_shared<const Region>(Region::rectangle(a, -a, a));
    const FrameProbe tight = restricted_frame_check(box, a, 3, 20, 1);
    CHECK(tight.min_ratio == doctest::Approx(4 * pi * pi).epsilon(1e-9));
    CHECK(tight.max_ratio == doctest::Approx(4 * pi * pi).epsilon(1e-9));

    auto trap = std::make_shared<const Region>(Region::trapezoid(linear()));
    const FrameProbe p = restricted_frame_check(trap, a, 3, 20, 1);
    CHECK(p.min_ratio > 0.0);
    CHECK(p.max_ratio <= p.tight_constant + 1e-6);
    CHECK(p.gram.eigen_max <= 4 * pi * pi + 1e-6);
    // The same indicator ratio from the Gram column and from direct moments.
    CHECK(p.indicator_ratio == doctest::Approx(p.indicator_ratio_direct).epsilon(1e-8));
}

TEST_CASE("Gram files round-trip") {
    const GramReport g = gram_matrix(trapezoid_basis(linear(), theta_family(0.9), {2, 1}, true));
    std::stringstream wide;
    write_gram_binary(wide, g.matrix, true);
    CHECK(read_gram_binary(wide) == g.matrix);

    std::stringstream narrow;
    write_gram_binary(narrow, g.matrix);
    CHECK(max_abs(read_gram_binary(narrow) - g.matrix) < 1e-6);
    CHECK(narrow.str().size() == 16 + 8 * g.matrix.size());

    std::stringstream csv;
    write_gram_csv(csv, g.matrix);
    std::string line;
    std::getline(csv, line);
    CHECK(std::count(line.begin(), line.end(), ',') == 2 * g.matrix.cols() - 1);

    std::stringstream junk("GRAX");
    CHECK_THROWS_AS(read_gram_binary(junk), Error);
}

TEST_CASE("radial family is orthonormal under the radial measure") {
    const GramReport g =
        gram_matrix(spherical_basis(SphericalTrapezoid(linear(), 3), {3, 3}, true));
    CHECK(g.identity_deviation < 1e-5);
    const GramReport flat =
        gram_matrix(spherical_basis(SphericalTrapezoid(ProfileFunction::constant(1.0), 2), {3, 3}, true));
    CHECK(flat.identity_deviation < 1e-12);
}
