#ifndef EXPBASIS_H
#define EXPBASIS_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(EXPBASIS_BUILDING)
#    define EB_API __declspec(dllexport)
#  else
#    define EB_API __declspec(dllimport)
#  endif
#else
#  define EB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum eb_status {
    EB_OK = 0,
    EB_INVALID_ARGUMENT = 1,
    EB_SCHEMA = 2,
    EB_ADMISSIBILITY = 3,
    EB_QUADRATURE = 4,
    EB_NOT_CERTIFIED = 5,
    EB_ILL_CONDITIONED = 6,
    EB_GRID_UNSTABLE = 7,
    EB_IO = 8,
    EB_INTERNAL = 99
} eb_status;

typedef enum eb_outcome { EB_PASS = 0, EB_ERROR = 1, EB_NEGATIVE = 2 } eb_outcome;

typedef struct eb_profile eb_profile;
typedef struct eb_family eb_family;
typedef struct eb_gram eb_gram;
typedef struct eb_result eb_result;

EB_API const char* eb_version(void);
EB_API const char* eb_status_name(eb_status status);
/* Message of the last failing call on this thread; empty after success. */
EB_API const char* eb_last_error(void);
EB_API void eb_set_threads(int threads);
EB_API int eb_threads(void);
/* Strings returned through char** out-parameters are freed with this. */
EB_API void eb_string_free(char* s);

/* Profiles: the "profile" object of an experiment config. */
EB_API eb_status eb_profile_from_json(const char* json, eb_profile** out);
EB_API eb_status eb_profile_eval(const eb_profile* p, double y, double* out);
EB_API void eb_profile_free(eb_profile* p);

EB_API eb_status eb_pw_bound(double L, double* out);
/* scaled = remainder + steps * h. */
EB_API eb_status eb_remainder_shift(long long n_k, int steps, long long h, int* remainder,
                                    long long* scaled);

/* Families: an experiment config with profile, perturbation, truncation,
   weighted and (for spherical families) dimension. */
EB_API eb_status eb_family_from_json(const char* config_json, eb_family** out);
EB_API size_t eb_family_size(const eb_family* f);
EB_API eb_status eb_family_eval(const eb_family* f, size_t index, double x, double y, double* re,
                                double* im);
EB_API eb_status eb_family_to_json(const eb_family* f, char** out);
EB_API void eb_family_free(eb_family* f);

/* Gram matrices: G(i, j) = <e_j, e_i>. quadrature_tolerance <= 0 keeps the default. */
EB_API eb_status eb_gram_new(const eb_family* f, double quadrature_tolerance, eb_gram** out);
EB_API size_t eb_gram_dimension(const eb_gram* g);
EB_API eb_status eb_gram_entry(const eb_gram* g, size_t i, size_t j, double* re, double* im);
EB_API eb_status eb_gram_summary_json(const eb_gram* g, char** out);
EB_API eb_status eb_gram_write_binary(const eb_gram* g, const char* path, int double_precision);
EB_API eb_status eb_gram_write_csv(const eb_gram* g, const char* path);
EB_API void eb_gram_free(eb_gram* g);

/* Experiments. The call fails only on a null argument or allocation failure;
   experiment failures are reported through the result's outcome and report. */
EB_API eb_status eb_run(const char* manifest_json, eb_result** out);
EB_API eb_outcome eb_result_outcome(const eb_result* r);
EB_API const char* eb_result_report(const eb_result* r);
EB_API size_t eb_result_artifact_count(const eb_result* r);
EB_API const char* eb_result_artifact_name(const eb_result* r, size_t i);
EB_API const char* eb_result_artifact_data(const eb_result* r, size_t i, size_t* size);
EB_API void eb_result_free(eb_result* r);

#ifdef __cplusplus
}
#endif

#endif
