#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "expbasis/expbasis.h"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

struct Options {
    std::string config_path;
    std::string out;
    std::optional<long long> seed;
    std::optional<int> threads;
    std::vector<std::string> tol;
    std::vector<std::string> set;
    std::string manifest_path;

    std::vector<int> truncation;
    std::optional<int> dimension;
    std::optional<int> nmax;
    std::optional<int> grid;
    std::optional<int> trials;
    std::optional<int> n;
    std::string steps;
    std::optional<int> window;
    std::optional<double> max_cond;
    std::optional<int> y_window;
    std::optional<int> seeds;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw UsageError("'" + path + "' is not valid JSON: " + e.what());
    }
}

// Bare values are parsed as JSON when possible and kept as strings otherwise.
Json loose_value(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error&) {
        return text;
    }
}

Json tolerances(const std::vector<std::string>& items) {
    Json t = Json::object();
    for (const auto& item : items) {
        const auto eq = item.find('=');
        const std::string key = eq == std::string::npos ? "quadrature" : item.substr(0, eq);
        const std::string value = eq == std::string::npos ? item : item.substr(eq + 1);
        try {
            std::size_t used = 0;
            t[key] = std::stod(value, &used);
            if (used != value.size()) throw std::invalid_argument(value);
        } catch (const std::exception&) {
            throw UsageError("--tol expects a number or name=number, got '" + item + "'");
        }
    }
    return t;
}

Json build_config(const Options& o) {
    Json config = o.config_path.empty() ? Json{{"schema_version", 1}} : read_json(o.config_path);
    if (!config.is_object()) throw UsageError("config must be a JSON object");
    if (o.truncation.size() == 1) {
        config.erase("truncations");
        config["truncation"] = o.truncation.front();
    } else if (o.truncation.size() > 1) {
        config.erase("truncation");
        config["truncations"] = o.truncation;
    }
    if (o.dimension) config["dimension"] = *o.dimension;
    if (o.nmax) config["n_max"] = *o.nmax;
    if (o.grid) config["grid"] = *o.grid;
    if (o.trials) config["trials"] = *o.trials;
    if (o.n) config["n"] = *o.n;
    if (!o.steps.empty()) config["steps"] = o.steps;
    if (o.window) config["window"] = *o.window;
    if (o.max_cond) config["max_cond"] = *o.max_cond;
    if (o.y_window) config["y_window"] = *o.y_window;
    if (o.seeds) config["seeds"] = *o.seeds;
    for (const auto& item : o.set) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) throw UsageError("--set expects key=value, got '" + item + "'");
        config[item.substr(0, eq)] = loose_value(item.substr(eq + 1));
    }
    return config;
}

// Report file and artifact directory for --out: a path ending in .json names
// the report and artifacts go beside it; anything else is a directory.
std::pair<fs::path, fs::path> output_paths(const std::string& out) {
    const fs::path p(out);
    if (p.extension() == ".json") {
        const fs::path dir = p.has_parent_path() ? p.parent_path() : fs::path(".");
        return {p, dir};
    }
    return {p / "report.json", p};
}

int write_outputs(const eb_result* r, const std::string& out) {
    if (out.empty()) {
        std::cout << eb_result_report(r);
        return 0;
    }
    const auto [report_path, dir] = output_paths(out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        std::cerr << "error: cannot create '" << dir.string() << "': " << ec.message() << "\n";
        return 1;
    }
    for (std::size_t i = 0; i < eb_result_artifact_count(r); ++i) {
        std::size_t size = 0;
        const char* data = eb_result_artifact_data(r, i, &size);
        const fs::path path = dir / eb_result_artifact_name(r, i);
        std::ofstream os(path, std::ios::binary);
        os.write(data, static_cast<std::streamsize>(size));
        if (!os) {
            std::cerr << "error: cannot write '" << path.string() << "'\n";
            return 1;
        }
    }
    std::ofstream os(report_path, std::ios::binary);
    os << eb_result_report(r);
    if (!os) {
        std::cerr << "error: cannot write '" << report_path.string() << "'\n";
        return 1;
    }
    return 0;
}

int execute(Json manifest, const Options& o) {
    if (o.seed) manifest["seed"] = *o.seed;
    if (o.threads) manifest["threads"] = *o.threads;
    if (!o.tol.empty()) {
        Json t = manifest.contains("tolerances") ? manifest["tolerances"] : Json::object();
        for (const auto& [k, v] : tolerances(o.tol).items()) t[k] = v;
        manifest["tolerances"] = t;
    }
    std::string out = o.out;
    if (out.empty() && manifest.contains("output") && manifest["output"].is_string())
        out = manifest["output"].get<std::string>();
    if (!out.empty()) manifest["output"] = out;

    eb_result* r = nullptr;
    if (eb_run(manifest.dump().c_str(), &r) != EB_OK) {
        std::cerr << "error: " << eb_last_error() << "\n";
        return 1;
    }
    const eb_outcome outcome = eb_result_outcome(r);
    int status = write_outputs(r, out);
    if (outcome == EB_ERROR) {
        const Json report = Json::parse(eb_result_report(r));
        std::cerr << "error [" << report["error"]["code"].get<std::string>()
                  << "]: " << report["error"]["message"].get<std::string>() << "\n";
    }
    eb_result_free(r);
    if (status != 0) return status;
    return static_cast<int>(outcome);
}

int run_manifest_file(const Options& o) {
    Json manifest = read_json(o.manifest_path);
    if (manifest.is_object() && manifest.contains("config_path") && manifest["config_path"].is_string()) {
        // Relative config paths are resolved against the manifest's directory.
        const fs::path cfg(manifest["config_path"].get<std::string>());
        if (cfg.is_relative())
            manifest["config_path"] = (fs::path(o.manifest_path).parent_path() / cfg).string();
    }
    return execute(manifest, o);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exponential Riesz bases on trapezoids: construction and numerical certification"};
    app.set_version_flag("--version", std::string(eb_version()));
    app.require_subcommand(1);
    app.fallthrough();

    Options o;
    app.add_option("--config", o.config_path, "Experiment config (JSON)");
    app.add_option("--out", o.out, "Report file (*.json) or output directory");
    app.add_option("--seed", o.seed, "Random seed")->check(CLI::NonNegativeNumber);
    app.add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
    app.add_option("--tol", o.tol, "Tolerance override: number (quadrature) or name=number");
    app.add_option("--set", o.set, "Config override key=value (value parsed as JSON)");

    struct Kind {
        const char* name;
        const char* help;
    };
    const std::vector<Kind> kinds = {
        {"validate", "Check profile admissibility"},
        {"approximate", "Step approximation of a profile"},
        {"stability", "Kadec certificate and Paley-Wiener test of a perturbation"},
        {"gram", "Truncated Gram matrices of a trapezoid family"},
        {"reconstruct", "Dual-frame reconstruction of a target"},
        {"multirect", "Basis construction on a multi-rectangle"},
        {"spherical", "Radial family on a spherical trapezoid"},
        {"frame", "Restricted frame probe"},
        {"eval", "Point evaluation of family elements"},
    };
    std::string chosen;
    for (const auto& k : kinds) {
        CLI::App* sub = app.add_subcommand(k.name, k.help);
        sub->fallthrough();
        sub->callback([&chosen, name = std::string(k.name)] { chosen = name; });
        const std::string name = k.name;
        if (name == "gram" || name == "reconstruct" || name == "spherical" || name == "frame" ||
            name == "eval" || name == "stability")
            sub->add_option("--truncation", o.truncation, "Truncation(s)");
        if (name == "gram" || name == "spherical" || name == "eval")
            sub->add_option("--dimension", o.dimension, "Ambient dimension of a spherical trapezoid");
        if (name == "stability") {
            sub->add_option("--nmax", o.nmax, "Largest |n| checked");
            sub->add_option("--trials", o.trials, "Monte Carlo trials");
            sub->add_subcommand("check", "Run the stability certificate")->fallthrough();
        }
        if (name == "validate" || name == "stability") sub->add_option("--grid", o.grid, "Audit grid size");
        if (name == "frame") sub->add_option("--trials", o.trials, "Random test functions");
        if (name == "approximate") sub->add_option("--n", o.n, "Number of steps");
        if (name == "multirect" || name == "reconstruct") {
            sub->add_option("--steps", o.steps, "Step values, comma separated");
            sub->add_option("--window", o.window, "Candidate window");
            sub->add_option("--max-cond", o.max_cond, "Certification threshold");
            sub->add_option("--seeds", o.seeds, "Search restarts");
        }
        if (name == "multirect") {
            sub->add_option("--y-window", o.y_window, "y truncation of the lifted family");
            sub->add_subcommand("build", "Search, lift and certify")->fallthrough();
        }
    }
    CLI::App* run = app.add_subcommand("run", "Run an experiment manifest");
    run->fallthrough();
    run->add_option("--manifest", o.manifest_path, "Manifest (JSON)")->required();
    run->callback([&chosen] { chosen = "run"; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    if (o.threads) eb_set_threads(*o.threads);

    try {
        if (chosen == "run") return run_manifest_file(o);
        Json manifest = {{"experiment", chosen}, {"config", build_config(o)}};
        if (o.seed) manifest["seed"] = *o.seed;
        return execute(manifest, o);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
