#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "expbasis/bases.hpp"

namespace expbasis {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

struct GramOptions {
    double quadrature_tolerance = 1e-9;  // absolute, per entry
    bool prefer_closed_form = true;
    // Entries with |G_ij| <= deflation_tolerance * max|G_ii| are dropped when
    // splitting the eigenproblem into connected blocks.
    double deflation_tolerance = 1e-13;
    double ill_conditioned_threshold = 1e10;
    int max_panels = 200000;
};

enum class GramVerdict { identity_within_tol, bounded, ill_conditioned };
const char* verdict_name(GramVerdict v);

// Stamped into every Gram and reconstruction report.
const char* finite_section_caveat();

struct Spectrum {
    std::vector<double> eigenvalues;  // ascending
    double deflation_bound = 0.0;     // Frobenius norm of the dropped entries (Weyl)
    std::size_t blocks = 0;
};

// Eigenvalues of the Hermitian part of m, solved blockwise over the
// connected components of its significant entries.
Spectrum hermitian_spectrum(const Matrix& m, double deflation_tolerance = 1e-13);

// eigen_max / eigen_min of a small Hermitian matrix (no deflation); +inf when
// eigen_min <= 0.
double condition_number(const Matrix& m);

struct GramReport {
    std::string family;
    std::size_t x_count = 0;
    int y_truncation = 0;
    std::size_t dimension = 0;
    Matrix matrix;  // G(i, j) = <e_j, e_i>, rows in (n, k) order, n outer
    std::vector<double> eigenvalues;
    double eigen_min = 0.0;
    double eigen_max = 0.0;
    double condition_number = 0.0;
    double quadrature_tolerance = 0.0;
    double quadrature_error = 0.0;  // largest per-entry error estimate
    double identity_deviation = 0.0;
    double hermitian_deviation = 0.0;
    double deflation_bound = 0.0;
    std::size_t blocks = 0;
    bool closed_form = false;
    GramVerdict verdict = GramVerdict::bounded;
};

// Fills the matrix-derived fields (spectrum, deviations, verdict).
GramReport summarize_gram(Matrix matrix, double quadrature_tolerance, const GramOptions& options);

struct CrossGram {
    Matrix matrix;  // C(i, j) = <b_j, a_i>
    double error = 0.0;
    bool closed_form = false;
};

// Families must share the region object, the phase convention and the y step.
CrossGram cross_gram(const BasisFamily& a, const BasisFamily& b, const GramOptions& options = {});

GramReport gram_matrix(const BasisFamily& family, const GramOptions& options = {});

// <a_i, b_j> for single elements.
cplx inner_product(const BasisFamily& a, std::size_t i, const BasisFamily& b, std::size_t j,
                   const GramOptions& options = {});

// Closed-form Grams of one-dimensional exponential families and their tensor
// products.
Matrix cross_gram_1d(const ExpFamily1D& a, const ExpFamily1D& b);
Matrix gram_1d(const ExpFamily1D& family);
Matrix tensor_gram(const TensorFamily& family);

struct FrameBounds {
    double lower;  // eigen_min, an upper estimate of the true lower bound A
    double upper;  // eigen_max, a lower estimate of the true upper bound B
};
FrameBounds frame_bounds(const GramReport& report);

// Reconstruction targets on the family's region.
class Target {
public:
    enum class Kind { box, element, function };

    // Indicator of [x0, x1] x [y0, y1] (clipped to the region; infinite
    // bounds are allowed).
    static Target box(double x0, double x1, double y0, double y1);
    static Target element(std::size_t flat_index);
    static Target function(PlaneFunction f, std::vector<double> y_breaks, std::string description);

    Kind kind() const { return kind_; }
    std::size_t index() const { return index_; }
    const std::vector<double>& bounds() const { return bounds_; }
    std::string describe() const;

    // b_i = <t, e_i> and ||t||^2 on the family's region.
    struct Moments {
        Vector b;
        double norm2 = 0.0;
        double error = 0.0;
    };
    Moments moments(const BasisFamily& family, const GramOptions& options) const;

private:
    Kind kind_ = Kind::box;
    std::vector<double> bounds_;
    std::size_t index_ = 0;
    PlaneFunction f_;
    std::vector<double> y_breaks_;
    std::string description_;
};

struct ReconstructionReport {
    std::string target;
    std::size_t x_count = 0;
    int y_truncation = 0;
    Vector coefficients;
    double relative_residual = 0.0;
    double target_norm = 0.0;
    double condition_number = 0.0;
    double quadrature_error = 0.0;
};

// Solves G c = b. Refuses (ill_conditioned) when cond(G) exceeds the
// configured threshold. A precomputed Gram of the same family may be passed.
ReconstructionReport reconstruct(const Target& target, const BasisFamily& family,
                                 const GramOptions& options = {},
                                 const GramReport* gram = nullptr);

struct FrameProbe {
    double box_half_width = 0.0;
    double tight_constant = 0.0;  // area of the box
    int trials = 0;
    std::uint64_t seed = 0;
    double min_ratio = 0.0;
    double max_ratio = 0.0;
    double indicator_ratio = 0.0;         // from the Gram column of the constant element
    double indicator_ratio_direct = 0.0;  // from box-indicator moments
    GramReport gram;
    std::string warning;
};

// Harmonic family exp(i(n x + m y)), |n|, |m| <= truncation, of the box
// [-a, a]^2 restricted to domain. Random test functions are drawn from the
// span of the restricted family.
FrameProbe restricted_frame_check(std::shared_ptr<const Region> domain, double box_half_width,
                                  int truncation, int trials, std::uint64_t seed,
                                  const GramOptions& options = {});

// Binary layout: "GRAM", u32 dim, u32 flags (bit 0: float64 entries),
// u32 reserved; then row-major (re, im) pairs, little-endian.
void write_gram_binary(std::ostream& out, const Matrix& m, bool double_precision = false);
Matrix read_gram_binary(std::istream& in);
// One row per line: re,im,re,im,...
void write_gram_csv(std::ostream& out, const Matrix& m);

}  // namespace expbasis
