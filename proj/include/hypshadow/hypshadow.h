#ifndef HYPSHADOW_H
#define HYPSHADOW_H

/* C interface to libhypshadow. Every call returns an hs_status; on failure
 * hs_last_error() holds a JSON payload {"schema","error","message",...} for
 * the calling thread. Strings handed out by the library are released with
 * hs_free_string. */

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(HYPSHADOW_BUILD)
#define HS_API __attribute__((visibility("default")))
#else
#define HS_API
#endif

typedef enum {
  HS_OK = 0,
  HS_E_USAGE = 1,
  HS_E_PARSE = 2,
  HS_E_DIMENSION = 3,
  HS_E_DOMAIN = 4,
  HS_E_HYPOTHESIS = 5,
  HS_E_NUMERIC = 6,
  HS_E_IO = 7,
  HS_E_INTERNAL = 8
} hs_status;

typedef struct hs_poly hs_poly;
typedef struct hs_shadow hs_shadow;

typedef enum { HS_MEMBER = 0, HS_NON_MEMBER = 1, HS_INCONCLUSIVE = 2 } hs_verdict;

HS_API const char* hs_version(void);
HS_API const char* hs_status_name(hs_status status);
/* Empty string when the last call on this thread succeeded. */
HS_API const char* hs_last_error(void);
HS_API void hs_free_string(char* s);

/* Runs a CLI subcommand. `request_json` is an object whose keys mirror the
 * long options (e.g. {"poly": "<file text>", "e": "1,1,1", "a": "0,0,1"});
 * on success *report receives the JSON report. */
HS_API hs_status hs_run(const char* command, const char* request_json, char** report);

/* .poly file contents ("vars:" header, optional "factor:" lines). */
HS_API hs_status hs_poly_parse_file(const char* text, hs_poly** out);
/* Bare polynomial over comma separated variable names. */
HS_API hs_status hs_poly_parse(const char* text, const char* vars, hs_poly** out);
HS_API void hs_poly_free(hs_poly* p);
HS_API size_t hs_poly_nvars(const hs_poly* p);
HS_API hs_status hs_poly_format(const hs_poly* p, char** out);
/* Exact p(point); `point` is comma separated rationals, *value is "p/q". */
HS_API hs_status hs_poly_evaluate(const hs_poly* p, const char* point, char** value);

HS_API hs_status hs_shadow_from_json(const char* json, hs_shadow** out);
HS_API hs_status hs_shadow_to_json(const hs_shadow* s, char** out);
HS_API void hs_shadow_free(hs_shadow* s);
HS_API size_t hs_shadow_ambient(const hs_shadow* s);
/* `x` has hs_shadow_ambient(s) entries; slack may be NULL. */
HS_API hs_status hs_shadow_membership(const hs_shadow* s, const double* x, size_t n, double tol, hs_verdict* verdict,
                                      double* slack);

#ifdef __cplusplus
}
#endif

#endif
