#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "expbasis/bases.hpp"
#include "expbasis/domains.hpp"
#include "expbasis/gram.hpp"

namespace expbasis {

struct SearchOptions {
    int seeds = 8;  // restart 0 is pure greedy, the others start from a random subset
    int max_swap_passes = 50;
    std::uint64_t seed = 0;
    // Frequencies live on n / (2 L); defaults to half the hull length of I.
    std::optional<double> half_width;
};

struct BasisSelection {
    MultiInterval interval;
    double half_width = 0.0;
    int window = 0;
    std::size_t cardinality = 0;  // round(|I| / (2 L) * (2 window + 1))
    std::vector<int> indices;     // n_k, increasing
    std::vector<double> frequencies;
    double max_cond = 0.0;
    double condition_number = 0.0;
    bool certified = false;  // condition_number <= max_cond
    int best_seed = 0;
    std::vector<double> seed_conditions;
    GramReport certificate;
};

// Condition-number driven subset search over {n / (2 L) : |n| <= window}.
// A miss is returned with certified = false.
BasisSelection search_interval_basis(const MultiInterval& interval, int window, double max_cond,
                                     const SearchOptions& options = {});

struct MultirectBasis {
    StepProfile step;
    BasisSelection selection;
    int y_window = 0;
    std::vector<int> remainders;  // n_k mod N per selected frequency
    // exp(2 pi i (n_k x / (2N) + (r_k + N h) y)) on the multi-rectangle.
    BasisFamily final_family;
    // The same elements scaled by sqrt(N): the image of the tensor family under
    // the tiling isometry (dilation Jacobian included).
    BasisFamily lifted_family;
    TensorFamily tensor;
    GramReport final_gram;
    GramReport lifted_gram;
    GramReport tensor_gram;
    double isometry_deviation = 0.0;  // max |G_lifted - G_tensor|
    double condition_gap = 0.0;       // |cond_lifted - cond_tensor| / cond_tensor
    bool phase_identity = false;
    long long phase_checks = 0;
    double evaluator_deviation = 0.0;  // lifted evaluator vs direct formula on random points
    double selector_eigen_min = 0.0;
    double selector_eigen_max = 0.0;
    bool selector_uniform = false;
};

// Requires a selection built on build_multiinterval(step) with half width N.
MultirectBasis build_multirect_basis(const StepProfile& step, const BasisSelection& selection,
                                     int y_window, std::uint64_t seed = 0,
                                     const GramOptions& options = {});

}  // namespace expbasis
