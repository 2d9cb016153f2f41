#include <algorithm>
#include <cmath>
#include <limits>

#include "expbasis/error.hpp"
#include "expbasis/gram.hpp"
#include "expbasis/random.hpp"

namespace expbasis {

FrameProbe restricted_frame_check(std::shared_ptr<const Region> domain, double box_half_width,
                                  int truncation, int trials, std::uint64_t seed,
                                  const GramOptions& options) {
    if (!domain) throw Error(ErrorCode::invalid_argument, "missing domain");
    if (truncation < 0 || trials < 1)
        throw Error(ErrorCode::invalid_argument, "truncation >= 0 and trials >= 1 are required");
    if (domain->kind() != Region::Kind::planar)
        throw Error(ErrorCode::invalid_argument, "restricted frames need a planar domain");
    const double a = box_half_width;
    if (domain->y_lower() < -a || domain->y_upper() > a)
        throw Error(ErrorCode::invalid_argument, "domain leaves the bounding box in y");
    constexpr int probes = 1001;
    for (int i = 0; i < probes; ++i) {
        const double y = domain->y_lower() + (domain->y_upper() - domain->y_lower()) * i / (probes - 1);
        if (domain->half_width(y) > a)
            throw Error(ErrorCode::invalid_argument, "domain leaves the bounding box in x");
    }

    BasisFamily::Spec spec;
    spec.name = "restricted_harmonic";
    spec.convention = PhaseConvention::unit;
    spec.region = domain;
    for (int n = -truncation; n <= truncation; ++n) spec.x_indices.push_back(n);
    spec.y_truncation = truncation;
    spec.y_step = 1.0;
    const BasisFamily family(std::move(spec));

    FrameProbe probe;
    probe.box_half_width = a;
    probe.tight_constant = 4.0 * a * a;
    probe.trials = trials;
    probe.seed = seed;
    probe.gram = gram_matrix(family, options);
    const Matrix& g = probe.gram.matrix;
    const Matrix g2 = g * g;

    probe.min_ratio = std::numeric_limits<double>::infinity();
    probe.max_ratio = 0.0;
    for (int t = 0; t < trials; ++t) {
        auto rng = trial_stream(seed, static_cast<std::uint64_t>(t));
        const Vector c = random_unit_vector(rng, g.rows());
        const double ratio = c.dot(g2 * c).real() / c.dot(g * c).real();
        probe.min_ratio = std::min(probe.min_ratio, ratio);
        probe.max_ratio = std::max(probe.max_ratio, ratio);
    }

    // The (0, 0) element is the constant 1, i.e. the indicator of the domain.
    const auto i0 = static_cast<Eigen::Index>(family.flat(static_cast<std::size_t>(truncation), 0));
    probe.indicator_ratio = g.col(i0).squaredNorm() / g(i0, i0).real();
    const double inf = std::numeric_limits<double>::infinity();
    const Target::Moments m = Target::box(-inf, inf, -inf, inf).moments(family, options);
    probe.indicator_ratio_direct = m.b.squaredNorm() / m.norm2;

    probe.warning =
        "truncated probe: the observed minimum ratio only estimates the lower frame bound";
    return probe;
}

}  // namespace expbasis
