#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "expbasis/bases.hpp"
#include "expbasis/domains.hpp"
#include "expbasis/error.hpp"
#include "expbasis/gram.hpp"

namespace expbasis {

using Json = nlohmann::ordered_json;

inline constexpr int config_schema_version = 1;

enum class Outcome { pass = 0, error = 1, negative = 2 };
const char* outcome_name(Outcome o);

struct Artifact {
    std::string name;
    std::string content;
};

struct RunResult {
    Outcome outcome = Outcome::error;
    std::string report;  // JSON
    std::vector<Artifact> artifacts;
};

// validate, approximate, stability, gram, reconstruct, multirect, spherical,
// frame, eval
const std::vector<std::string>& experiment_kinds();

// Parses and runs a manifest:
//   {"experiment": kind, "config": {...} | "config_path": path, "output": dir,
//    "seed": int, "threads": int, "tolerances": {...}}
// Never throws; failures become an error outcome with a machine-readable code.
RunResult run_manifest(const std::string& manifest_json);

// Config pieces shared with the C API.
ProfileFunction profile_from_json(const Json& j);
// Absent or null means unperturbed. Custom expressions see n, y and f = f(y).
std::optional<PerturbationFamily> perturbation_from_json(const Json& j, const ProfileFunction& f);
// Trapezoid family, or spherical when the config names a dimension.
BasisFamily family_from_config(const Json& config);
Json family_to_json(const BasisFamily& family, int samples = 11);
Json gram_to_json(const GramReport& report);

// Throws schema errors. validate_config checks one experiment's config.
void validate_config(const Json& config, const std::string& kind);
void validate_report(const Json& report);

}  // namespace expbasis
