#include "expbasis/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "expbasis/expr.hpp"
#include "expbasis/multirect.hpp"
#include "expbasis/parallel.hpp"
#include "expbasis/stability.hpp"

namespace expbasis {

const char* outcome_name(Outcome o) {
    switch (o) {
        case Outcome::pass: return "pass";
        case Outcome::negative: return "negative";
        case Outcome::error: return "error";
    }
    return "?";
}

const std::vector<std::string>& experiment_kinds() {
    static const std::vector<std::string> kinds = {"validate", "approximate", "stability",
                                                   "gram",     "reconstruct", "multirect",
                                                   "spherical", "frame",      "eval"};
    return kinds;
}

namespace {

[[noreturn]] void schema_error(const std::string& what) { throw Error(ErrorCode::schema, what); }

const Json& require(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) schema_error(std::string("missing key '") + key + "'");
    return j.at(key);
}

double number(const Json& v, const std::string& key) {
    if (!v.is_number()) schema_error("'" + key + "' must be a number");
    return v.get<double>();
}

double number_or(const Json& j, const char* key, double fallback) {
    return j.contains(key) ? number(j.at(key), key) : fallback;
}

long long integer(const Json& v, const std::string& key) {
    if (!v.is_number_integer()) schema_error("'" + key + "' must be an integer");
    return v.get<long long>();
}

int int_or(const Json& j, const char* key, int fallback) {
    if (!j.contains(key)) return fallback;
    const long long v = integer(j.at(key), key);
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
        schema_error(std::string("'") + key + "' is out of range");
    return static_cast<int>(v);
}

bool bool_or(const Json& j, const char* key, bool fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_boolean()) schema_error(std::string("'") + key + "' must be a boolean");
    return j.at(key).get<bool>();
}

std::string string_of(const Json& v, const std::string& key) {
    if (!v.is_string()) schema_error("'" + key + "' must be a string");
    return v.get<std::string>();
}

std::vector<double> numbers(const Json& v, const std::string& key) {
    if (!v.is_array()) schema_error("'" + key + "' must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) out.push_back(number(e, key));
    return out;
}

void only_keys(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) schema_error(where + " must be an object");
    for (const auto& [key, value] : j.items()) {
        if (!allowed.count(key)) schema_error("unknown key '" + key + "' in " + where);
    }
}

// Non-finite values are written as strings so that reports stay valid JSON.
Json real(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_table(std::uint64_t seed, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
    std::string out = "# seed=" + std::to_string(seed) + "\n";
    for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
    out += "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + g17(row[i]);
        out += "\n";
    }
    return out;
}

std::string plot_data(std::uint64_t seed, const std::string& x, const std::string& y,
                      const std::vector<std::pair<double, double>>& points) {
    std::string out = "# seed=" + std::to_string(seed) + "\n# " + x + " " + y + "\n";
    for (const auto& [a, b] : points) out += g17(a) + " " + g17(b) + "\n";
    return out;
}

std::vector<Truncation> truncations_of(const Json& config) {
    auto one = [](const Json& v, const std::string& key) {
        if (v.is_object()) {
            only_keys(v, {"nx", "ny"}, key);
            return Truncation{static_cast<int>(integer(require(v, "nx"), "nx")),
                              static_cast<int>(integer(require(v, "ny"), "ny"))};
        }
        const int t = static_cast<int>(integer(v, key));
        return Truncation{t, t};
    };
    std::vector<Truncation> out;
    if (config.contains("truncations")) {
        const Json& list = config.at("truncations");
        if (!list.is_array() || list.empty()) schema_error("'truncations' must be a non-empty array");
        for (const auto& v : list) out.push_back(one(v, "truncations"));
    } else {
        out.push_back(one(require(config, "truncation"), "truncation"));
    }
    for (const auto& t : out) {
        if (t.nx < 0 || t.ny < 0) schema_error("truncations must be >= 0");
    }
    return out;
}

BasisFamily family_for(const Json& config, Truncation t) {
    const ProfileFunction profile = profile_from_json(require(config, "profile"));
    const bool weighted = bool_or(config, "weighted", true);
    if (config.contains("dimension")) {
        if (config.contains("perturbation") && !config.at("perturbation").is_null())
            schema_error("spherical families take no perturbation");
        const int d = static_cast<int>(integer(config.at("dimension"), "dimension"));
        return spherical_basis(SphericalTrapezoid(profile, d), t, weighted);
    }
    const Json none;
    return trapezoid_basis(profile,
                           perturbation_from_json(config.contains("perturbation")
                                                      ? config.at("perturbation")
                                                      : none,
                                                  profile),
                           t, weighted);
}

StepProfile steps_of(const Json& v) {
    if (v.is_string()) {
        std::vector<double> values;
        std::stringstream ss(v.get<std::string>());
        std::string item;
        while (std::getline(ss, item, ',')) {
            try {
                std::size_t used = 0;
                values.push_back(std::stod(item, &used));
                if (item.find_first_not_of(" \t", used) != std::string::npos) throw 0;
            } catch (...) {
                schema_error("'steps' entry '" + item + "' is not a number");
            }
        }
        return StepProfile(values);
    }
    return StepProfile(numbers(v, "steps"));
}

struct Context {
    std::uint64_t seed = 0;
    GramOptions gram;
    double pw_tolerance = 1e-9;
    double frame_tolerance = 1e-6;
    double isometry_tolerance = 1e-12;
    std::vector<Artifact> artifacts;
};

std::string gram_binary(const Matrix& m) {
    std::ostringstream os(std::ios::binary);
    write_gram_binary(os, m);
    return os.str();
}

std::string gram_csv(const Matrix& m) {
    std::ostringstream os;
    write_gram_csv(os, m);
    return os.str();
}

std::string truncation_tag(Truncation t) {
    return std::to_string(t.nx) + "x" + std::to_string(t.ny);
}

Json kadec_to_json(const KadecReport& k) {
    Json per = Json::array();
    for (const auto& e : k.per_n)
        per.push_back({{"n", e.n},
                       {"epsilon", e.epsilon},
                       {"threshold", e.threshold},
                       {"epsilon_times_4n", e.epsilon * 4.0 * std::abs(e.n)},
                       {"pass", e.pass}});
    Json j = {{"verdict", kadec_verdict_name(k.verdict)},
              {"L", k.L},
              {"lambda", k.lambda ? Json(*k.lambda) : Json(nullptr)},
              {"lambda_applicable", k.lambda.has_value()},
              {"grid", k.grid},
              {"refined_grid", 2 * k.grid - 1},
              {"refinement_change", k.refinement_change},
              {"per_n", per}};
    return j;
}

Json coefficients_json(const Vector& c) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < c.size(); ++i) out.push_back({c(i).real(), c(i).imag()});
    return out;
}

// --- experiments -----------------------------------------------------------

Outcome run_validate(const Json& config, Context&, Json& result) {
    const ProfileFunction profile = profile_from_json(require(config, "profile"));
    const int grid = int_or(config, "grid", 1001);
    const ProfileValidation v = validate_profile(profile, grid);
    Json violations = Json::array();
    for (std::size_t i = 0; i < v.violations.size() && i < 100; ++i) violations.push_back(v.violations[i]);
    Json jumps = Json::array();
    for (double j : profile.jumps()) jumps.push_back(j);
    result = {{"profile", profile.description()},
              {"lower_bound", profile.lower_bound()},
              {"upper_bound", profile.upper_bound()},
              {"continuity", profile.continuity() == Continuity::continuous ? "continuous"
                                                                            : "piecewise_continuous"},
              {"jumps", jumps},
              {"grid_size", v.grid_size},
              {"min", v.min},
              {"max", v.max},
              {"violation_count", v.violations.size()},
              {"violations", violations}};
    return v.ok() ? Outcome::pass : Outcome::negative;
}

Outcome run_approximate(const Json& config, Context& ctx, Json& result) {
    const ProfileFunction profile = profile_from_json(require(config, "profile"));
    std::vector<int> ns;
    if (!config.contains("n")) {
        ns = {1, 2, 4, 8, 16};
    } else if (config.at("n").is_array()) {
        for (const auto& v : config.at("n")) ns.push_back(static_cast<int>(integer(v, "n")));
    } else {
        ns.push_back(static_cast<int>(integer(config.at("n"), "n")));
    }
    ApproximationOptions opts;
    opts.audit_grid = int_or(config, "audit_grid", opts.audit_grid);
    opts.max_partitions = int_or(config, "max_partitions", opts.max_partitions);

    Json list = Json::array();
    std::vector<std::vector<double>> rows;
    std::vector<std::pair<double, double>> plot;
    for (int n : ns) {
        const StepApproximation a = approximate_profile(profile, n, opts);
        const double bound = 1.0 / (4.0 * n);
        Json entry = {{"n", n},
                      {"partitions", a.partitions},
                      {"scale", a.scale},
                      {"inverse_error", a.inverse_error},
                      {"uniform_error", a.uniform_error},
                      {"bound", bound},
                      {"audit_grid", a.audit_grid},
                      {"schedule", a.schedule}};
        if (a.partitions <= 1024) {
            std::vector<double> values(a.step.values().begin(), a.step.values().end());
            entry["values"] = values;
        }
        list.push_back(entry);
        rows.push_back({static_cast<double>(n), static_cast<double>(a.partitions), a.inverse_error,
                        a.uniform_error, bound});
        plot.emplace_back(n, a.uniform_error);
    }
    result = {{"profile", profile.description()}, {"normalized_scale", true}, {"approximations", list}};
    ctx.artifacts.push_back({"approximation.csv",
                             csv_table(ctx.seed, {"n", "partitions", "inverse_error", "uniform_error", "bound"},
                                       rows)});
    ctx.artifacts.push_back({"uniform_error.dat", plot_data(ctx.seed, "n", "uniform_error", plot)});
    return Outcome::pass;
}

Json pw_to_json(const PwInequalityReport& r) {
    return {{"trials", r.trials},
            {"seed", r.seed},
            {"lambda", r.lambda},
            {"L", r.L},
            {"max_lhs", r.max_lhs},
            {"max_ratio", real(r.max_ratio)},
            {"spectral_sup_ratio", real(r.sup_ratio)},
            {"tolerance", r.tolerance},
            {"quadrature_error", r.quadrature_error},
            {"passed", r.passed},
            {"worst_coefficients", coefficients_json(r.worst_coefficients)}};
}

Outcome run_stability(const Json& config, Context& ctx, Json& result) {
    const ProfileFunction profile = profile_from_json(require(config, "profile"));
    const auto g = perturbation_from_json(
        config.contains("perturbation") ? config.at("perturbation") : Json(), profile);
    const PerturbationFamily family = g.value_or(PerturbationFamily::identity());
    const int n_max = int_or(config, "n_max", 8);
    const int grid = int_or(config, "grid", 1001);
    const KadecReport k = kadec_check(profile, family, n_max, grid);
    result = kadec_to_json(k);
    result["perturbation"] = family.name();

    std::vector<std::vector<double>> rows;
    std::vector<std::pair<double, double>> plot;
    for (const auto& e : k.per_n) {
        rows.push_back({static_cast<double>(e.n), e.epsilon, e.threshold, e.epsilon * 4.0 * std::abs(e.n)});
        plot.emplace_back(e.n, e.epsilon * 4.0 * std::abs(e.n));
    }
    ctx.artifacts.push_back(
        {"stability.csv", csv_table(ctx.seed, {"n", "epsilon", "threshold", "epsilon_times_4n"}, rows)});
    ctx.artifacts.push_back({"epsilon_times_4n.dat", plot_data(ctx.seed, "n", "epsilon_times_4n", plot)});

    Outcome outcome = k.verdict == KadecVerdict::certified ? Outcome::pass : Outcome::negative;
    if (config.contains("trials") && outcome == Outcome::pass) {
        PwOptions o;
        o.trials = int_or(config, "trials", 100);
        o.seed = ctx.seed;
        o.tolerance = ctx.pw_tolerance;
        o.kadec_grid = grid;
        o.gram = ctx.gram;
        const auto ts = config.contains("truncation") ? truncations_of(config)
                                                      : std::vector<Truncation>{{n_max, n_max}};
        const PwInequalityReport pw = pw_inequality_test(profile, family, ts.front(), o);
        result["pw_inequality"] = pw_to_json(pw);
        result["pw_inequality"]["truncation"] = {ts.front().nx, ts.front().ny};
        if (!pw.passed) outcome = Outcome::negative;
    }
    return outcome;
}

Outcome run_gram(const Json& config, Context& ctx, Json& result) {
    std::set<std::string> exports = {"binary"};
    if (config.contains("export")) {
        exports.clear();
        const Json& e = config.at("export");
        if (!e.is_array()) schema_error("'export' must be an array");
        for (const auto& v : e) {
            const std::string s = string_of(v, "export");
            if (s != "binary" && s != "csv") schema_error("unknown export format '" + s + "'");
            exports.insert(s);
        }
    }
    Json list = Json::array();
    std::vector<std::vector<double>> rows;
    std::vector<std::pair<double, double>> plot;
    Outcome outcome = Outcome::pass;
    double prev_min = std::numeric_limits<double>::infinity();
    double prev_max = 0.0;
    bool interlacing = true;
    for (const Truncation t : truncations_of(config)) {
        const BasisFamily family = family_for(config, t);
        const GramReport g = gram_matrix(family, ctx.gram);
        Json j = gram_to_json(g);
        j["truncation"] = {t.nx, t.ny};
        list.push_back(j);
        rows.push_back({static_cast<double>(t.nx), static_cast<double>(t.ny),
                        static_cast<double>(g.dimension), g.eigen_min, g.eigen_max, g.condition_number,
                        g.identity_deviation});
        plot.emplace_back(t.nx, g.eigen_min);
        interlacing = interlacing && g.eigen_min <= prev_min && g.eigen_max >= prev_max;
        prev_min = g.eigen_min;
        prev_max = g.eigen_max;
        if (g.verdict == GramVerdict::ill_conditioned) outcome = Outcome::negative;
        if (exports.count("binary"))
            ctx.artifacts.push_back({"gram_" + truncation_tag(t) + ".bin", gram_binary(g.matrix)});
        if (exports.count("csv"))
            ctx.artifacts.push_back({"gram_" + truncation_tag(t) + ".csv", gram_csv(g.matrix)});
    }
    result = {{"family", family_to_json(family_for(config, truncations_of(config).front()))},
              {"grams", list},
              {"nested_eigen_bounds_monotone", interlacing},
              {"caveat", finite_section_caveat()}};
    ctx.artifacts.push_back(
        {"gram_sweep.csv",
         csv_table(ctx.seed,
                   {"nx", "ny", "dimension", "eigen_min", "eigen_max", "condition_number",
                    "identity_deviation"},
                   rows)});
    ctx.artifacts.push_back({"eigen_min.dat", plot_data(ctx.seed, "truncation", "eigen_min", plot)});
    return outcome;
}

Target target_of(const Json& j, const BasisFamily& family) {
    const std::string kind = string_of(require(j, "kind"), "target.kind");
    const double inf = std::numeric_limits<double>::infinity();
    if (kind == "box") {
        only_keys(j, {"kind", "x", "y"}, "target");
        auto range = [&](const char* key) {
            if (!j.contains(key)) return std::pair{-inf, inf};
            const auto v = numbers(j.at(key), key);
            if (v.size() != 2) schema_error(std::string("target '") + key + "' needs two numbers");
            return std::pair{v[0], v[1]};
        };
        const auto [x0, x1] = range("x");
        const auto [y0, y1] = range("y");
        return Target::box(x0, x1, y0, y1);
    }
    if (kind == "element") {
        only_keys(j, {"kind", "n", "k"}, "target");
        const int n = static_cast<int>(integer(require(j, "n"), "n"));
        const int k = static_cast<int>(integer(require(j, "k"), "k"));
        const auto idx = family.x_indices();
        const auto it = std::find(idx.begin(), idx.end(), n);
        if (it == idx.end() || std::abs(k) > family.y_truncation())
            schema_error("target element lies outside the truncation");
        return Target::element(family.flat(static_cast<std::size_t>(it - idx.begin()), k));
    }
    if (kind == "expr") {
        only_keys(j, {"kind", "expr", "y_breaks"}, "target");
        const Expression e = Expression::parse(string_of(require(j, "expr"), "expr"), {"x", "y"});
        std::vector<double> breaks;
        if (j.contains("y_breaks")) breaks = numbers(j.at("y_breaks"), "y_breaks");
        return Target::function(
            [e](double x, double y) {
                const double v[2] = {x, y};
                return cplx(e(std::span<const double>(v, 2)), 0.0);
            },
            breaks, e.source());
    }
    schema_error("unknown target kind '" + kind + "'");
}

Outcome run_reconstruct(const Json& config, Context& ctx, Json& result) {
    const Json& target_json = require(config, "target");
    std::optional<BasisSelection> selection;
    std::optional<StepProfile> step;
    if (config.contains("steps")) {
        step = steps_of(config.at("steps"));
        SearchOptions so;
        so.seeds = int_or(config, "seeds", so.seeds);
        so.seed = ctx.seed;
        so.half_width = step->steps();
        selection = search_interval_basis(build_multiinterval(*step), int_or(config, "window", 24),
                                          number_or(config, "max_cond", 50.0), so);
        if (!selection->certified) {
            result = {{"selection_condition_number", selection->condition_number},
                      {"message", "no certified multi-interval selection"}};
            return Outcome::negative;
        }
    }
    Json list = Json::array();
    std::vector<std::vector<double>> rows;
    std::vector<std::pair<double, double>> plot;
    double prev = std::numeric_limits<double>::infinity();
    bool monotone = true;
    std::string description;
    for (const Truncation t : truncations_of(config)) {
        // For multi-rectangles the truncation is the y window of the lifted family.
        const BasisFamily family = step ? build_multirect_basis(*step, *selection, t.ny, ctx.seed, ctx.gram).final_family
                                        : family_for(config, t);
        const Target target = target_of(target_json, family);
        description = target.describe();
        const ReconstructionReport r = reconstruct(target, family, ctx.gram);
        list.push_back({{"truncation", {t.nx, t.ny}},
                        {"dimension", family.size()},
                        {"relative_residual", r.relative_residual},
                        {"target_norm", r.target_norm},
                        {"condition_number", real(r.condition_number)},
                        {"quadrature_error", r.quadrature_error}});
        rows.push_back({static_cast<double>(t.nx), static_cast<double>(t.ny), r.relative_residual});
        plot.emplace_back(step ? t.ny : t.nx, r.relative_residual);
        monotone = monotone && r.relative_residual <= prev;
        prev = r.relative_residual;

        std::vector<std::vector<double>> coeffs;
        for (std::size_t i = 0; i < family.size(); ++i) {
            coeffs.push_back({static_cast<double>(family.x_index(family.position_of(i))),
                              static_cast<double>(family.k_of(i)),
                              r.coefficients(static_cast<Eigen::Index>(i)).real(),
                              r.coefficients(static_cast<Eigen::Index>(i)).imag()});
        }
        ctx.artifacts.push_back({"coefficients_" + truncation_tag(t) + ".csv",
                                 csv_table(ctx.seed, {"n", "k", "re", "im"}, coeffs)});
    }
    result = {{"target", description},
              {"reconstructions", list},
              {"residual_nonincreasing", monotone},
              {"caveat", finite_section_caveat()}};
    if (selection) result["selection_indices"] = selection->indices;
    ctx.artifacts.push_back(
        {"residuals.csv", csv_table(ctx.seed, {"nx", "ny", "relative_residual"}, rows)});
    ctx.artifacts.push_back({"residual.dat", plot_data(ctx.seed, "truncation", "relative_residual", plot)});
    return monotone ? Outcome::pass : Outcome::negative;
}

Json selection_to_json(const BasisSelection& s) {
    Json segs = Json::array();
    for (const auto& seg : s.interval.segments()) segs.push_back({seg.left, seg.right});
    Json conds = Json::array();
    for (double c : s.seed_conditions) conds.push_back(real(c));
    return {{"interval", segs},
            {"half_width", s.half_width},
            {"window", s.window},
            {"cardinality", s.cardinality},
            {"indices", s.indices},
            {"frequencies", s.frequencies},
            {"max_cond", s.max_cond},
            {"condition_number", real(s.condition_number)},
            {"certified", s.certified},
            {"best_seed", s.best_seed},
            {"seed_conditions", conds},
            {"certificate", gram_to_json(s.certificate)}};
}

Outcome run_multirect(const Json& config, Context& ctx, Json& result) {
    const StepProfile step = steps_of(require(config, "steps"));
    SearchOptions so;
    so.seeds = int_or(config, "seeds", so.seeds);
    so.seed = ctx.seed;
    so.half_width = step.steps();
    const int window = int_or(config, "window", 24);
    const double max_cond = number_or(config, "max_cond", 50.0);
    const BasisSelection sel = search_interval_basis(build_multiinterval(step), window, max_cond, so);
    std::vector<double> values(step.values().begin(), step.values().end());
    result = {{"steps", values}, {"selection", selection_to_json(sel)}};

    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < sel.indices.size(); ++k) {
        const int n = sel.indices[k];
        rows.push_back({static_cast<double>(k), static_cast<double>(n), sel.frequencies[k],
                        static_cast<double>(remainder_shift(n, step.steps(), 0).remainder)});
    }
    ctx.artifacts.push_back(
        {"selection.csv", csv_table(ctx.seed, {"k", "n_k", "lambda_k", "remainder"}, rows)});
    if (!sel.certified) {
        result["message"] = "search missed max_cond; best condition number reported";
        return Outcome::negative;
    }

    const int y_window = int_or(config, "y_window", 4);
    const MultirectBasis mb = build_multirect_basis(step, sel, y_window, ctx.seed, ctx.gram);
    result["pipeline"] = {{"y_window", y_window},
                          {"remainders", mb.remainders},
                          {"isometry_deviation", mb.isometry_deviation},
                          {"isometry_tolerance", ctx.isometry_tolerance},
                          {"condition_gap", mb.condition_gap},
                          {"phase_identity", mb.phase_identity},
                          {"phase_checks", mb.phase_checks},
                          {"evaluator_deviation", mb.evaluator_deviation},
                          {"selector_eigen_min", mb.selector_eigen_min},
                          {"selector_eigen_max", mb.selector_eigen_max},
                          {"selector_uniform", mb.selector_uniform},
                          {"dilation_jacobian", step.steps()},
                          {"family", family_to_json(mb.final_family)},
                          {"final_gram", gram_to_json(mb.final_gram)},
                          {"lifted_gram", gram_to_json(mb.lifted_gram)},
                          {"tensor_gram", gram_to_json(mb.tensor_gram)}};
    result["caveat"] = finite_section_caveat();
    ctx.artifacts.push_back({"gram_lifted.bin", gram_binary(mb.lifted_gram.matrix)});
    const bool ok = mb.isometry_deviation < ctx.isometry_tolerance && mb.phase_identity &&
                    mb.condition_gap < 1e-10;
    return ok ? Outcome::pass : Outcome::negative;
}

Outcome run_frame(const Json& config, Context& ctx, Json& result) {
    const std::string domain = config.contains("domain") ? string_of(config.at("domain"), "domain") : "trapezoid";
    const double a = number_or(config, "box_half_width", std::numbers::pi);
    std::shared_ptr<const Region> region;
    if (domain == "box") {
        region = std::make_shared<const Region>(Region::rectangle(a, -a, a));
    } else if (domain == "trapezoid") {
        region = std::make_shared<const Region>(Region::trapezoid(profile_from_json(require(config, "profile"))));
    } else {
        schema_error("unknown frame domain '" + domain + "'");
    }
    const auto ts = truncations_of(config);
    if (ts.size() != 1 || ts.front().nx != ts.front().ny)
        schema_error("frame probes take a single square truncation");
    const FrameProbe p = restricted_frame_check(region, a, ts.front().nx, int_or(config, "trials", 100),
                                                ctx.seed, ctx.gram);
    result = {{"domain", region->describe()},
              {"box_half_width", p.box_half_width},
              {"tight_constant", p.tight_constant},
              {"trials", p.trials},
              {"min_ratio", p.min_ratio},
              {"max_ratio", p.max_ratio},
              {"indicator_ratio", p.indicator_ratio},
              {"indicator_ratio_direct", p.indicator_ratio_direct},
              {"frame_tolerance", ctx.frame_tolerance},
              {"warning", p.warning},
              {"gram", gram_to_json(p.gram)},
              {"caveat", finite_section_caveat()}};
    const bool ok = p.min_ratio > 0.0 && p.max_ratio <= p.tight_constant + ctx.frame_tolerance &&
                    std::abs(p.indicator_ratio - p.indicator_ratio_direct) <=
                        ctx.frame_tolerance * p.tight_constant;
    return ok ? Outcome::pass : Outcome::negative;
}

Outcome run_eval(const Json& config, Context& ctx, Json& result) {
    const auto ts = truncations_of(config);
    const BasisFamily family = family_for(config, ts.front());
    const Json& points = require(config, "points");
    const Json& elements = require(config, "elements");
    if (!points.is_array() || !elements.is_array()) schema_error("'points' and 'elements' must be arrays");
    Json values = Json::array();
    std::vector<std::vector<double>> rows;
    for (const auto& e : elements) {
        const auto nk = numbers(e, "elements");
        if (nk.size() != 2) schema_error("each element is [n, k]");
        const auto idx = family.x_indices();
        const auto it = std::find(idx.begin(), idx.end(), static_cast<int>(nk[0]));
        const int k = static_cast<int>(nk[1]);
        if (it == idx.end() || std::abs(k) > family.y_truncation())
            schema_error("element outside the truncation");
        const auto pos = static_cast<std::size_t>(it - idx.begin());
        for (const auto& p : points) {
            const auto xy = numbers(p, "points");
            if (xy.size() != 2) schema_error("each point is [x, y]");
            const cplx v = family.evaluate(pos, k, xy[0], xy[1]);
            values.push_back({{"n", nk[0]}, {"k", k}, {"x", xy[0]}, {"y", xy[1]},
                              {"re", v.real()}, {"im", v.imag()}});
            rows.push_back({nk[0], static_cast<double>(k), xy[0], xy[1], v.real(), v.imag()});
        }
    }
    result = {{"family", family_to_json(family)}, {"values", values}};
    ctx.artifacts.push_back({"values.csv", csv_table(ctx.seed, {"n", "k", "x", "y", "re", "im"}, rows)});
    return Outcome::pass;
}

const std::map<std::string, std::set<std::string>>& config_keys() {
    static const std::map<std::string, std::set<std::string>> keys = {
        {"validate", {"profile", "grid"}},
        {"approximate", {"profile", "n", "audit_grid", "max_partitions"}},
        {"stability", {"profile", "perturbation", "n_max", "grid", "trials", "truncation"}},
        {"gram", {"profile", "perturbation", "truncation", "truncations", "weighted", "export", "dimension"}},
        {"spherical", {"profile", "dimension", "truncation", "truncations", "weighted", "export"}},
        {"reconstruct", {"profile", "perturbation", "truncation", "truncations", "weighted", "target",
                         "steps", "window", "max_cond", "seeds"}},
        {"multirect", {"steps", "window", "max_cond", "y_window", "seeds"}},
        {"frame", {"profile", "domain", "box_half_width", "truncation", "trials"}},
        {"eval", {"profile", "perturbation", "truncation", "weighted", "dimension", "points", "elements"}},
    };
    return keys;
}

const std::set<std::string>& tolerance_keys() {
    static const std::set<std::string> keys = {"quadrature", "deflation", "ill_conditioned",
                                               "pw",         "frame",     "isometry"};
    return keys;
}

void apply_tolerances(const Json& t, Context& ctx) {
    only_keys(t, tolerance_keys(), "tolerances");
    ctx.gram.quadrature_tolerance = number_or(t, "quadrature", ctx.gram.quadrature_tolerance);
    ctx.gram.deflation_tolerance = number_or(t, "deflation", ctx.gram.deflation_tolerance);
    ctx.gram.ill_conditioned_threshold = number_or(t, "ill_conditioned", ctx.gram.ill_conditioned_threshold);
    ctx.pw_tolerance = number_or(t, "pw", ctx.pw_tolerance);
    ctx.frame_tolerance = number_or(t, "frame", ctx.frame_tolerance);
    ctx.isometry_tolerance = number_or(t, "isometry", ctx.isometry_tolerance);
    if (!(ctx.gram.quadrature_tolerance > 0.0)) schema_error("quadrature tolerance must be positive");
}

}  // namespace

ProfileFunction profile_from_json(const Json& j) {
    const std::string kind = string_of(require(j, "kind"), "profile.kind");
    if (kind == "closed_form") {
        only_keys(j, {"kind", "expr", "lower", "upper", "jumps"}, "profile");
        const Expression e = Expression::parse(string_of(require(j, "expr"), "expr"), {"y"});
        std::vector<double> jumps;
        if (j.contains("jumps")) jumps = numbers(j.at("jumps"), "jumps");
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        if (!j.contains("lower") || !j.contains("upper")) {
            // Undeclared bounds default to the empirical range on a fine grid.
            constexpr int grid = 10001;
            for (int i = 0; i < grid; ++i) {
                const double v = e(static_cast<double>(i) / (grid - 1));
                if (!std::isfinite(v)) throw Error(ErrorCode::admissibility, "profile is not finite");
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        }
        lo = number_or(j, "lower", lo);
        hi = number_or(j, "upper", hi);
        return ProfileFunction([e](double y) { return e(y); }, lo, hi, std::move(jumps), e.source());
    }
    if (kind == "step") {
        only_keys(j, {"kind", "values"}, "profile");
        return ProfileFunction::from_step(StepProfile(numbers(require(j, "values"), "values")));
    }
    if (kind == "samples") {
        only_keys(j, {"kind", "ys", "fs"}, "profile");
        return ProfileFunction::from_samples(numbers(require(j, "ys"), "ys"), numbers(require(j, "fs"), "fs"));
    }
    if (kind == "constant") {
        only_keys(j, {"kind", "value"}, "profile");
        return ProfileFunction::constant(number(require(j, "value"), "value"));
    }
    schema_error("unknown profile kind '" + kind + "'");
}

std::optional<PerturbationFamily> perturbation_from_json(const Json& j, const ProfileFunction& f) {
    if (j.is_null()) return std::nullopt;
    const std::string kind = string_of(require(j, "kind"), "perturbation.kind");
    if (kind == "identity") {
        only_keys(j, {"kind"}, "perturbation");
        return std::nullopt;
    }
    if (kind == "ingham") {
        only_keys(j, {"kind"}, "perturbation");
        return ingham_family();
    }
    if (kind == "theta") {
        only_keys(j, {"kind", "theta"}, "perturbation");
        return theta_family(number(require(j, "theta"), "theta"));
    }
    if (kind == "custom") {
        only_keys(j, {"kind", "expr"}, "perturbation");
        const Expression e = Expression::parse(string_of(require(j, "expr"), "expr"), {"n", "y", "f"});
        return PerturbationFamily::custom(
            [e, f](int n, double y) {
                const double v[3] = {static_cast<double>(n), y, f(y)};
                return e(std::span<const double>(v, 3));
            },
            "custom(" + e.source() + ")");
    }
    schema_error("unknown perturbation kind '" + kind + "'");
}

BasisFamily family_from_config(const Json& config) {
    return family_for(config, truncations_of(config).front());
}

Json family_to_json(const BasisFamily& family, int samples) {
    const Region& region = family.region();
    std::vector<double> ys;
    for (int i = 0; i < samples; ++i)
        ys.push_back(region.y_lower() + (region.y_upper() - region.y_lower()) * i / std::max(1, samples - 1));
    Json table = Json::array();
    for (std::size_t p = 0; p < family.x_count(); ++p) {
        std::vector<double> freq;
        for (double y : ys) freq.push_back(family.frequency_x(p, y));
        table.push_back({{"n", family.x_index(p)}, {"freq_x", freq}});
    }
    const char* weight = family.weight() == WeightKind::none ? "none"
                         : family.weight() == WeightKind::trapezoid_orthonormal ? "trapezoid_orthonormal"
                                                                                 : "radial_orthonormal";
    std::vector<int> idx(family.x_indices().begin(), family.x_indices().end());
    std::vector<double> shifts;
    for (std::size_t p = 0; p < family.x_count(); ++p) shifts.push_back(family.y_shift(p));
    return {{"name", family.name()},
            {"convention", convention_name(family.convention())},
            {"region", region.describe()},
            {"region_measure", region.measure()},
            {"x_indices", idx},
            {"y_truncation", family.y_truncation()},
            {"y_step", family.y_step()},
            {"y_shifts", shifts},
            {"weight", weight},
            {"amplitude", family.amplitude()},
            {"size", family.size()},
            {"ordering", "lexicographic (n, k), n outer"},
            {"frequency_table", {{"ys", ys}, {"rows", table}}}};
}

Json gram_to_json(const GramReport& r) {
    return {{"family", r.family},
            {"x_count", r.x_count},
            {"y_truncation", r.y_truncation},
            {"dimension", r.dimension},
            {"eigen_min", r.eigen_min},
            {"eigen_max", r.eigen_max},
            {"condition_number", real(r.condition_number)},
            {"frame_bounds", {r.eigen_min, r.eigen_max}},
            {"quadrature_tolerance", r.quadrature_tolerance},
            {"quadrature_error", r.quadrature_error},
            {"identity_deviation", r.identity_deviation},
            {"hermitian_deviation", r.hermitian_deviation},
            {"deflation_bound", r.deflation_bound},
            {"blocks", r.blocks},
            {"closed_form", r.closed_form},
            {"verdict", verdict_name(r.verdict)}};
}

void validate_config(const Json& config, const std::string& kind) {
    const auto& table = config_keys();
    const auto it = table.find(kind);
    if (it == table.end()) schema_error("unknown experiment kind '" + kind + "'");
    if (!config.is_object()) schema_error("config must be an object");
    const Json& version = require(config, "schema_version");
    if (!version.is_number_integer() || version.get<int>() != config_schema_version)
        schema_error("unsupported schema_version (expected 1)");
    std::set<std::string> allowed = it->second;
    allowed.insert({"schema_version", "description", "tolerances"});
    only_keys(config, allowed, "config");
    if (config.contains("tolerances")) only_keys(config.at("tolerances"), tolerance_keys(), "tolerances");
    if (kind == "spherical" && !config.contains("dimension")) schema_error("missing key 'dimension'");
}

void validate_report(const Json& r) {
    only_keys(r, {"schema_version", "experiment", "seed", "threads", "output", "outcome", "exit_code",
                  "config", "result", "artifacts", "error"},
              "report");
    if (integer(require(r, "schema_version"), "schema_version") != config_schema_version)
        schema_error("report schema_version mismatch");
    const std::string kind = string_of(require(r, "experiment"), "experiment");
    const auto& kinds = experiment_kinds();
    if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end() && kind != "unknown")
        schema_error("report names an unknown experiment");
    integer(require(r, "seed"), "seed");
    const std::string outcome = string_of(require(r, "outcome"), "outcome");
    const long long code = integer(require(r, "exit_code"), "exit_code");
    const std::map<std::string, long long> codes = {{"pass", 0}, {"error", 1}, {"negative", 2}};
    const auto c = codes.find(outcome);
    if (c == codes.end() || c->second != code) schema_error("report outcome and exit code disagree");
    if (outcome == "error") {
        const Json& e = require(r, "error");
        string_of(require(e, "code"), "error.code");
        string_of(require(e, "message"), "error.message");
        integer(require(e, "numeric_code"), "error.numeric_code");
    } else {
        if (!require(r, "result").is_object()) schema_error("'result' must be an object");
        const Json& a = require(r, "artifacts");
        if (!a.is_array()) schema_error("'artifacts' must be an array");
        for (const auto& name : a) string_of(name, "artifacts");
    }
}

RunResult run_manifest(const std::string& manifest_json) {
    RunResult out;
    Json report = {{"schema_version", config_schema_version}, {"experiment", "unknown"}, {"seed", 0}};
    Context ctx;
    try {
        Json manifest;
        try {
            manifest = Json::parse(manifest_json);
        } catch (const Json::parse_error& e) {
            schema_error(std::string("manifest is not valid JSON: ") + e.what());
        }
        only_keys(manifest, {"experiment", "config", "config_path", "output", "seed", "threads", "tolerances"},
                  "manifest");
        std::string kind = string_of(require(manifest, "experiment"), "experiment");
        if (kind == "restricted-frame") kind = "frame";
        report["experiment"] = kind;
        if (manifest.contains("seed")) {
            const long long s = integer(manifest.at("seed"), "seed");
            if (s < 0) schema_error("'seed' must be >= 0");
            ctx.seed = static_cast<std::uint64_t>(s);
        }
        report["seed"] = ctx.seed;
        const int threads = int_or(manifest, "threads", thread_count());
        set_thread_count(threads);
        report["threads"] = thread_count();
        if (manifest.contains("output")) report["output"] = string_of(manifest.at("output"), "output");

        Json config;
        if (manifest.contains("config")) {
            config = manifest.at("config");
        } else {
            const std::string path = string_of(require(manifest, "config_path"), "config_path");
            std::ifstream in(path);
            if (!in) throw Error(ErrorCode::io, "cannot read config '" + path + "'");
            try {
                config = Json::parse(in);
            } catch (const Json::parse_error& e) {
                schema_error("config '" + path + "' is not valid JSON: " + std::string(e.what()));
            }
        }
        validate_config(config, kind);
        report["config"] = config;
        if (config.contains("tolerances")) apply_tolerances(config.at("tolerances"), ctx);
        if (manifest.contains("tolerances")) apply_tolerances(manifest.at("tolerances"), ctx);

        Json result;
        Outcome outcome = Outcome::pass;
        try {
            if (kind == "validate") outcome = run_validate(config, ctx, result);
            else if (kind == "approximate") outcome = run_approximate(config, ctx, result);
            else if (kind == "stability") outcome = run_stability(config, ctx, result);
            else if (kind == "gram" || kind == "spherical") outcome = run_gram(config, ctx, result);
            else if (kind == "reconstruct") outcome = run_reconstruct(config, ctx, result);
            else if (kind == "multirect") outcome = run_multirect(config, ctx, result);
            else if (kind == "frame") outcome = run_frame(config, ctx, result);
            else outcome = run_eval(config, ctx, result);
        } catch (const Error& e) {
            // Certification misses and refused solves are mathematical outcomes.
            if (e.code() != ErrorCode::not_certified && e.code() != ErrorCode::ill_conditioned) throw;
            result = {{"code", error_code_name(e.code())}, {"message", e.what()}};
            outcome = Outcome::negative;
        }
        report["outcome"] = outcome_name(outcome);
        report["exit_code"] = static_cast<int>(outcome);
        report["result"] = result;
        Json names = Json::array();
        for (const auto& a : ctx.artifacts) names.push_back(a.name);
        report["artifacts"] = names;
        out.outcome = outcome;
        out.artifacts = std::move(ctx.artifacts);
    } catch (const Error& e) {
        report["outcome"] = "error";
        report["exit_code"] = 1;
        report["error"] = {{"code", error_code_name(e.code())},
                           {"numeric_code", static_cast<int>(e.code())},
                           {"message", e.what()}};
        out.outcome = Outcome::error;
        out.artifacts.clear();
    } catch (const std::exception& e) {
        report["outcome"] = "error";
        report["exit_code"] = 1;
        report["error"] = {{"code", error_code_name(ErrorCode::internal)},
                           {"numeric_code", static_cast<int>(ErrorCode::internal)},
                           {"message", e.what()}};
        out.outcome = Outcome::error;
        out.artifacts.clear();
    }
    out.report = report.dump(2) + "\n";
    return out;
}

}  // namespace expbasis
