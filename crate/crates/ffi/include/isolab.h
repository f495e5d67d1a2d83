#ifndef ISOLAB_H
#define ISOLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Residual classes as integers.
typedef enum {
  ISOLAB_CLASS_FD = 0,
  ISOLAB_CLASS_ODE = 1,
  ISOLAB_CLASS_ALGEBRAIC = 2,
} IsolabClass;

// Result codes. Anything other than `Ok` leaves a message for
// [`isolab_last_error`].
typedef enum {
  ISOLAB_STATUS_OK = 0,
  ISOLAB_STATUS_NULL_POINTER = 1,
  ISOLAB_STATUS_INVALID_UTF8 = 2,
  ISOLAB_STATUS_SYNTAX = 3,
  ISOLAB_STATUS_POLE = 4,
  ISOLAB_STATUS_INVALID_PARAMETER = 5,
  ISOLAB_STATUS_CONFIG = 6,
  ISOLAB_STATUS_NUMERICAL = 7,
  ISOLAB_STATUS_IO = 8,
  ISOLAB_STATUS_OUT_OF_RANGE = 9,
  ISOLAB_STATUS_PANIC = 10,
} IsolabStatus;

// A validated run configuration.
typedef struct IsolabConfig IsolabConfig;

// A parsed holomorphic expression in `z`.
typedef struct IsolabExpr IsolabExpr;

// Results of a run with report names kept alive for C callers.
typedef struct IsolabRun IsolabRun;

// One judged residual. `order_estimate` is NaN when only one grid level ran.
typedef struct {
  IsolabClass kind;
  double max;
  double mean;
  double spacing;
  double order_estimate;
  double tolerance;
  bool pass;
} IsolabReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or null. Valid until the
// next failing call on the same thread.
const char *isolab_last_error(void);

// Library version as a static nul-terminated string.
const char *isolab_version(void);

// # Safety
// `text` must be a nul-terminated string and `out` a valid pointer.
IsolabStatus isolab_expr_parse(const char *text, IsolabExpr **out);

// # Safety
// `expr` must come from this library; the outputs must be valid pointers.
IsolabStatus isolab_expr_eval(const IsolabExpr *expr,
                              double re,
                              double im,
                              double *out_re,
                              double *out_im);

// Symbolic derivative `d/dz` as a new handle.
//
// # Safety
// `expr` must come from this library and `out` be a valid pointer.
IsolabStatus isolab_expr_derivative(const IsolabExpr *expr, IsolabExpr **out);

// # Safety
// `expr` must come from this library or be null; it is invalid afterwards.
void isolab_expr_free(IsolabExpr *expr);

// Applies `x ↦ (a x + b)(c x + d)⁻¹` to an imaginary quaternion.
// `coefficients` holds `a, b, c, d` as `[w, x, y, z]` each. A point sent
// to infinity yields `IsolabStatus::Pole`.
//
// # Safety
// `coefficients` must point to 16 doubles, `point` and `out` to 3.
IsolabStatus isolab_mobius_apply(const double *coefficients, const double *point, double *out);

// # Safety
// `json` must be a nul-terminated string and `out` a valid pointer.
IsolabStatus isolab_config_parse(const char *json, IsolabConfig **out);

// # Safety
// `path` must be a nul-terminated string and `out` a valid pointer.
IsolabStatus isolab_config_load(const char *path, IsolabConfig **out);

// # Safety
// `config` must come from this library or be null.
void isolab_config_free(IsolabConfig *config);

// Runs the configured pipeline. Tolerance failures are not errors; check
// [`isolab_run_passed`].
//
// # Safety
// `config` must come from this library and `out` be a valid pointer.
IsolabStatus isolab_run(const IsolabConfig *config, IsolabRun **out);

// Writes the OBJ and CSV outputs requested by `config`.
//
// # Safety
// Both handles must come from this library.
IsolabStatus isolab_run_write_outputs(const IsolabConfig *config, const IsolabRun *run);

// True when every report is within tolerance. False for a null handle.
//
// # Safety
// `run` must come from this library or be null.
bool isolab_run_passed(const IsolabRun *run);

// # Safety
// `run` must come from this library or be null.
size_t isolab_run_report_count(const IsolabRun *run);

// Copies report `index` into `out`.
//
// # Safety
// `run` must come from this library and `out` be a valid pointer.
IsolabStatus isolab_run_report(const IsolabRun *run, size_t index, IsolabReport *out);

// Name of report `index`, owned by `run`; null if out of range.
//
// # Safety
// `run` must come from this library or be null.
const char *isolab_run_report_name(const IsolabRun *run, size_t index);

// Copies the named surface as `3 * nu * nv` doubles in row-major node
// order. With `buffer` null only the required length is stored in `len`.
//
// # Safety
// `run` must come from this library, `name` be nul-terminated, `len`
// valid, and `buffer` hold `*len` doubles when non-null.
IsolabStatus isolab_run_surface(const IsolabRun *run,
                                const char *name,
                                double *buffer,
                                size_t *len);

// # Safety
// `run` must come from this library or be null.
void isolab_run_free(IsolabRun *run);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ISOLAB_H */
