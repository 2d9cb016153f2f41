#include "expbasis/multirect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "expbasis/error.hpp"
#include "expbasis/parallel.hpp"
#include "expbasis/random.hpp"

namespace expbasis {

namespace {

// Closed-form Grams have no quadrature error; this only sets the identity test.
constexpr double closed_form_tolerance = 1e-14;

class SubsetSearch {
public:
    SubsetSearch(const Matrix& full, std::vector<int> candidates, std::size_t cardinality,
                 int max_swap_passes)
        : full_(full),
          candidates_(std::move(candidates)),
          cardinality_(cardinality),
          max_swap_passes_(max_swap_passes) {
        // Preference order for ties: low |n| first, then low n.
        order_.resize(candidates_.size());
        std::iota(order_.begin(), order_.end(), 0);
        std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
            const int na = candidates_[a], nb = candidates_[b];
            return std::abs(na) != std::abs(nb) ? std::abs(na) < std::abs(nb) : na < nb;
        });
    }

    double cond(const std::vector<std::size_t>& subset) const {
        const auto k = static_cast<Eigen::Index>(subset.size());
        Matrix g(k, k);
        for (Eigen::Index c = 0; c < k; ++c)
            for (Eigen::Index r = 0; r < k; ++r)
                g(r, c) = full_(static_cast<Eigen::Index>(subset[r]),
                                static_cast<Eigen::Index>(subset[c]));
        return condition_number(g);
    }

    // Greedy completion followed by best-improvement swaps.
    double run(std::vector<std::size_t>& subset) const {
        std::vector<bool> used(candidates_.size(), false);
        for (auto i : subset) used[i] = true;
        double current = subset.empty() ? 1.0 : cond(subset);
        while (subset.size() < cardinality_) {
            double best = std::numeric_limits<double>::infinity();
            std::size_t pick = candidates_.size();
            for (auto c : order_) {
                if (used[c]) continue;
                subset.push_back(c);
                const double value = cond(subset);
                subset.pop_back();
                if (better(value, best)) {
                    best = value;
                    pick = c;
                }
            }
            if (pick == candidates_.size())
                pick = *std::find_if(order_.begin(), order_.end(), [&](std::size_t c) { return !used[c]; });
            subset.push_back(pick);
            used[pick] = true;
            current = best;
        }
        for (int pass = 0; pass < max_swap_passes_; ++pass) {
            double best = current;
            std::size_t out = subset.size(), in = candidates_.size();
            for (std::size_t s = 0; s < subset.size(); ++s) {
                const std::size_t old = subset[s];
                for (auto c : order_) {
                    if (used[c]) continue;
                    subset[s] = c;
                    const double value = cond(subset);
                    if (better(value, best)) {
                        best = value;
                        out = s;
                        in = c;
                    }
                }
                subset[s] = old;
            }
            if (out == subset.size()) break;
            used[subset[out]] = false;
            used[in] = true;
            subset[out] = in;
            current = best;
        }
        return current;
    }

    std::size_t candidate_count() const { return candidates_.size(); }

private:
    static bool better(double value, double best) {
        if (!std::isfinite(best)) return value < best;
        return value < best * (1.0 - 1e-12);
    }

    const Matrix& full_;
    std::vector<int> candidates_;
    std::vector<std::size_t> order_;
    std::size_t cardinality_;
    int max_swap_passes_;
};

}  // namespace

BasisSelection search_interval_basis(const MultiInterval& interval, int window, double max_cond,
                                     const SearchOptions& options) {
    if (window < 0) throw Error(ErrorCode::invalid_argument, "window must be >= 0");
    if (!(max_cond >= 1.0)) throw Error(ErrorCode::invalid_argument, "max_cond must be >= 1");
    if (options.seeds < 1) throw Error(ErrorCode::invalid_argument, "seeds must be >= 1");
    const Segment hull = interval.hull();
    const double L = options.half_width.value_or(0.5 * hull.length());
    if (!(L > 0.0) || 2.0 * L < hull.length() * (1.0 - 1e-12))
        throw Error(ErrorCode::invalid_argument, "half width too small to contain the interval");

    const std::size_t total = static_cast<std::size_t>(2 * window + 1);
    const double density = interval.total_length() / (2.0 * L);
    const auto cardinality = static_cast<std::size_t>(
        std::clamp<long long>(std::llround(density * static_cast<double>(total)), 1,
                              static_cast<long long>(total)));

    std::vector<int> candidates;
    ExpFamily1D all{PhaseConvention::two_pi, {}, interval};
    for (int n = -window; n <= window; ++n) {
        candidates.push_back(n);
        all.frequencies.push_back(n / (2.0 * L));
    }
    const Matrix full = gram_1d(all);
    const SubsetSearch search(full, candidates, cardinality, options.max_swap_passes);

    std::vector<std::vector<std::size_t>> subsets(static_cast<std::size_t>(options.seeds));
    std::vector<double> conds(subsets.size());
    parallel_for(subsets.size(), [&](std::size_t s) {
        auto& subset = subsets[s];
        if (s > 0) {
            auto rng = trial_stream(options.seed, s);
            std::vector<std::size_t> pool(total);
            std::iota(pool.begin(), pool.end(), 0);
            // Fisher-Yates on raw draws keeps the permutation library-independent.
            for (std::size_t i = pool.size() - 1; i > 0; --i)
                std::swap(pool[i], pool[static_cast<std::size_t>(rng() % (i + 1))]);
            subset.assign(pool.begin(),
                          pool.begin() + static_cast<long>(std::max<std::size_t>(1, cardinality / 4)));
        }
        conds[s] = search.run(subset);
    });

    std::size_t best = 0;
    for (std::size_t s = 1; s < conds.size(); ++s) {
        if (conds[s] < conds[best]) best = s;
    }
    std::vector<std::size_t> chosen = subsets[best];
    std::sort(chosen.begin(), chosen.end());

    BasisSelection sel{interval, L, window, cardinality, {}, {}, max_cond, 0.0, false, 0, {}, {}};
    for (auto i : chosen) {
        sel.indices.push_back(candidates[i]);
        sel.frequencies.push_back(all.frequencies[i]);
    }
    sel.seed_conditions = conds;
    sel.best_seed = static_cast<int>(best);
    const auto k = static_cast<Eigen::Index>(chosen.size());
    Matrix g(k, k);
    for (Eigen::Index c = 0; c < k; ++c)
        for (Eigen::Index r = 0; r < k; ++r)
            g(r, c) = full(static_cast<Eigen::Index>(chosen[r]), static_cast<Eigen::Index>(chosen[c]));
    GramOptions go;
    go.deflation_tolerance = 0.0;
    sel.certificate = summarize_gram(std::move(g), closed_form_tolerance, go);
    sel.certificate.family = "multi_interval_exponentials";
    sel.certificate.x_count = chosen.size();
    sel.certificate.closed_form = true;
    sel.condition_number = sel.certificate.condition_number;
    sel.certified = sel.condition_number <= max_cond;
    return sel;
}

namespace {

bool same_segments(const MultiInterval& a, const MultiInterval& b) {
    const auto sa = a.segments();
    const auto sb = b.segments();
    if (sa.size() != sb.size()) return false;
    for (std::size_t i = 0; i < sa.size(); ++i) {
        if (std::abs(sa[i].left - sb[i].left) > 1e-15 || std::abs(sa[i].right - sb[i].right) > 1e-15)
            return false;
    }
    return true;
}

}  // namespace

MultirectBasis build_multirect_basis(const StepProfile& step, const BasisSelection& selection,
                                     int y_window, std::uint64_t seed, const GramOptions& options) {
    if (y_window < 0) throw Error(ErrorCode::invalid_argument, "y window must be >= 0");
    const int N = step.steps();
    const MultiInterval I = build_multiinterval(step);
    if (!same_segments(I, selection.interval) || selection.half_width != static_cast<double>(N))
        throw Error(ErrorCode::invalid_argument,
                    "selection was not built on the multi-interval of this step profile with "
                    "half width N");
    if (selection.indices.empty()) throw Error(ErrorCode::invalid_argument, "empty selection");

    std::vector<int> remainders;
    std::vector<double> shifts;
    for (int n : selection.indices) {
        const RemainderShift rs = remainder_shift(n, N, 0);
        remainders.push_back(rs.remainder);
        shifts.push_back(rs.remainder);
    }

    BasisFamily::Spec spec;
    spec.name = "multirect";
    spec.convention = PhaseConvention::two_pi;
    spec.region = std::make_shared<const Region>(Region::trapezoid(ProfileFunction::from_step(step)));
    spec.x_indices = selection.indices;
    spec.y_truncation = y_window;
    spec.freq_x = XFrequency::constant([N](int n) { return n / (2.0 * N); });
    spec.y_shifts = shifts;
    spec.y_step = N;
    const BasisFamily final_family(spec);
    BasisFamily lifted_family = final_family.with_amplitude(std::sqrt(static_cast<double>(N)));

    ExpFamily1D v{PhaseConvention::two_pi, selection.frequencies, I};
    const MultiInterval unit({{0.0, 1.0}});
    std::vector<ExpFamily1D> w;
    for (int r : remainders) {
        ExpFamily1D wr{PhaseConvention::two_pi, {}, unit};
        for (int h = -y_window; h <= y_window; ++h) wr.frequencies.push_back(static_cast<double>(r) / N + h);
        w.push_back(std::move(wr));
    }
    TensorFamily tensor(v, w);

    GramReport final_gram = gram_matrix(final_family, options);
    GramReport lifted_gram = gram_matrix(lifted_family, options);
    final_gram.family = "multirect";
    lifted_gram.family = "multirect_lifted";
    GramReport tensor_report = summarize_gram(tensor_gram(tensor), closed_form_tolerance, options);
    tensor_report.family = "tensor";
    tensor_report.x_count = selection.indices.size();
    tensor_report.y_truncation = y_window;
    tensor_report.closed_form = true;

    const double iso = (lifted_gram.matrix - tensor_report.matrix).cwiseAbs().maxCoeff();
    const double gap = std::abs(lifted_gram.condition_number - tensor_report.condition_number) /
                       tensor_report.condition_number;

    bool phase_ok = true;
    long long checks = 0;
    for (std::size_t p = 0; p < selection.indices.size(); ++p) {
        for (int h = -y_window; h <= y_window; ++h) {
            const long long M = remainders[p] + static_cast<long long>(N) * h;
            for (int j = 1; j <= N; ++j) {
                phase_ok = phase_ok && phase_consistent(selection.indices[p], M, N, j);
                ++checks;
            }
        }
    }

    // Lifted evaluator against the direct formula at random points of each cell.
    const IsometryMap tiling = IsometryMap::multirect_tiling(step);
    double eval_dev = 0.0;
    auto rng = trial_stream(seed, 0);
    auto uniform = [&rng] { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; };
    constexpr int points_per_cell = 4;
    std::vector<std::pair<double, double>> points;
    for (int j = 0; j < N; ++j) {
        for (int t = 0; t < points_per_cell; ++t) {
            const double b = step.value(j);
            points.emplace_back(b * (2.0 * uniform() - 1.0), (j + uniform()) / N);
        }
    }
    for (std::size_t i = 0; i < tensor.size(); ++i) {
        const PlaneFunction lifted =
            lift_by_isometry(tiling, [&tensor, i](double x, double y) { return tensor(i, x, y); });
        for (const auto& [x, y] : points)
            eval_dev = std::max(eval_dev, std::abs(lifted(x, y) - lifted_family(i, x, y)));
    }

    double sel_min = std::numeric_limits<double>::infinity();
    double sel_max = 0.0;
    std::vector<int> distinct = remainders;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    for (int r : distinct) {
        const auto it = std::find(remainders.begin(), remainders.end(), r);
        const Spectrum s = hermitian_spectrum(gram_1d(w[static_cast<std::size_t>(it - remainders.begin())]), 0.0);
        sel_min = std::min(sel_min, s.eigenvalues.front());
        sel_max = std::max(sel_max, s.eigenvalues.back());
    }

    return MultirectBasis{step,
                          selection,
                          y_window,
                          remainders,
                          final_family,
                          lifted_family,
                          tensor,
                          std::move(final_gram),
                          std::move(lifted_gram),
                          std::move(tensor_report),
                          iso,
                          gap,
                          phase_ok,
                          checks,
                          eval_dev,
                          sel_min,
                          sel_max,
                          sel_max - sel_min <= 1e-10 * sel_max};
}

}  // namespace expbasis
