#include "expbasis/expbasis.h"

#include <cstring>
#include <fstream>
#include <new>
#include <string>

#include "expbasis/experiment.hpp"
#include "expbasis/parallel.hpp"
#include "expbasis/stability.hpp"

using namespace expbasis;

struct eb_profile {
    ProfileFunction f;
};

struct eb_family {
    BasisFamily family;
};

struct eb_gram {
    GramReport report;
};

struct eb_result {
    RunResult run;
};

namespace {

thread_local std::string last_error;

eb_status fail(eb_status s, const std::string& message) {
    last_error = message;
    return s;
}

// Runs body and maps exceptions onto status codes.
template <class Body>
eb_status guarded(Body&& body) {
    try {
        body();
        last_error.clear();
        return EB_OK;
    } catch (const Error& e) {
        return fail(static_cast<eb_status>(e.code()), e.what());
    } catch (const Json::exception& e) {
        return fail(EB_SCHEMA, e.what());
    } catch (const std::bad_alloc&) {
        return fail(EB_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(EB_INTERNAL, e.what());
    }
}

char* copy_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

Json parse(const char* text) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw Error(ErrorCode::schema, std::string("invalid JSON: ") + e.what());
    }
}

}  // namespace

extern "C" {

const char* eb_version(void) { return EXPBASIS_VERSION; }

const char* eb_status_name(eb_status status) {
    if (status == EB_OK) return "ok";
    return error_code_name(static_cast<ErrorCode>(status));
}

const char* eb_last_error(void) { return last_error.c_str(); }

void eb_set_threads(int threads) { set_thread_count(threads); }

int eb_threads(void) { return thread_count(); }

void eb_string_free(char* s) { delete[] s; }

eb_status eb_profile_from_json(const char* json, eb_profile** out) {
    if (!json || !out) return fail(EB_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] { *out = new eb_profile{profile_from_json(parse(json))}; });
}

eb_status eb_profile_eval(const eb_profile* p, double y, double* out) {
    if (!p || !out) return fail(EB_INVALID_ARGUMENT, "null argument");
    return guarded([&] { *out = p->f(y); });
}

void eb_profile_free(eb_profile* p) { delete p; }

eb_status eb_pw_bound(double L, double* out) {
    if (!out) return fail(EB_INVALID_ARGUMENT, "null argument");
    return guarded([&] { *out = pw_bound(L); });
}

eb_status eb_remainder_shift(long long n_k, int steps, long long h, int* remainder, long long* scaled) {
    if (!remainder || !scaled) return fail(EB_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        const RemainderShift r = remainder_shift(n_k, steps, h);
        *remainder = r.remainder;
        *scaled = r.scaled_frequency;
    });
}

eb_status eb_family_from_json(const char* config_json, eb_family** out) {
    if (!config_json || !out) return fail(EB_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] { *out = new eb_family{family_from_config(parse(config_json))}; });
}

size_t eb_family_size(const eb_family* f) { return f ? f->family.size() : 0; }

eb_status eb_family_eval(const eb_family* f, size_t index, double x, double y, double* re, double* im) {
    if (!f || !re || !im) return fail(EB_INVALID_ARGUMENT, "null argument");
    if (index >= f->family.size()) return fail(EB_INVALID_ARGUMENT, "element index out of range");
    return guarded([&] {
        const cplx v = f->family(index, x, y);
        *re = v.real();
        *im = v.imag();
    });
}

eb_status eb_family_to_json(const eb_family* f, char** out) {
    if (!f || !out) return fail(EB_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] { *out = copy_string(family_to_json(f->family).dump(2)); });
}

void eb_family_free(eb_family* f) { delete f; }

eb_status eb_gram_new(const eb_family* f, double quadrature_tolerance, eb_gram** out) {
    if (!f || !out) return fail(EB_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] {
        GramOptions options;
        if (quadrature_tolerance > 0.0) options.quadrature_tolerance = quadrature_tolerance;
        *out = new eb_gram{gram_matrix(f->family, options)};
    });
}

size_t eb_gram_dimension(const eb_gram* g) { return g ? g->report.dimension : 0; }

eb_status eb_gram_entry(const eb_gram* g, size_t i, size_t j, double* re, double* im) {
    if (!g || !re || !im) return fail(EB_INVALID_ARGUMENT, "null argument");
    if (i >= g->report.dimension || j >= g->report.dimension)
        return fail(EB_INVALID_ARGUMENT, "Gram index out of range");
    const cplx v = g->report.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    *re = v.real();
    *im = v.imag();
    last_error.clear();
    return EB_OK;
}

eb_status eb_gram_summary_json(const eb_gram* g, char** out) {
    if (!g || !out) return fail(EB_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] { *out = copy_string(gram_to_json(g->report).dump(2)); });
}

eb_status eb_gram_write_binary(const eb_gram* g, const char* path, int double_precision) {
    if (!g || !path) return fail(EB_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        std::ofstream os(path, std::ios::binary);
        if (!os) throw Error(ErrorCode::io, std::string("cannot open '") + path + "'");
        write_gram_binary(os, g->report.matrix, double_precision != 0);
        if (!os) throw Error(ErrorCode::io, std::string("write failed for '") + path + "'");
    });
}

eb_status eb_gram_write_csv(const eb_gram* g, const char* path) {
    if (!g || !path) return fail(EB_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        std::ofstream os(path);
        if (!os) throw Error(ErrorCode::io, std::string("cannot open '") + path + "'");
        write_gram_csv(os, g->report.matrix);
        if (!os) throw Error(ErrorCode::io, std::string("write failed for '") + path + "'");
    });
}

void eb_gram_free(eb_gram* g) { delete g; }

eb_status eb_run(const char* manifest_json, eb_result** out) {
    if (!manifest_json || !out) return fail(EB_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] { *out = new eb_result{run_manifest(manifest_json)}; });
}

eb_outcome eb_result_outcome(const eb_result* r) {
    return r ? static_cast<eb_outcome>(r->run.outcome) : EB_ERROR;
}

const char* eb_result_report(const eb_result* r) { return r ? r->run.report.c_str() : ""; }

size_t eb_result_artifact_count(const eb_result* r) { return r ? r->run.artifacts.size() : 0; }

const char* eb_result_artifact_name(const eb_result* r, size_t i) {
    if (!r || i >= r->run.artifacts.size()) return nullptr;
    return r->run.artifacts[i].name.c_str();
}

const char* eb_result_artifact_data(const eb_result* r, size_t i, size_t* size) {
    if (!r || i >= r->run.artifacts.size()) {
        if (size) *size = 0;
        return nullptr;
    }
    if (size) *size = r->run.artifacts[i].content.size();
    return r->run.artifacts[i].content.data();
}

void eb_result_free(eb_result* r) { delete r; }

}  // extern "C"
