#ifndef GPLAB_H
#define GPLAB_H

/* Generated by cbindgen from gplab-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Status codes returned by fallible entry points.
 */
typedef enum GplabStatus {
  GplabStatus_Ok = 0,
  /*
   Malformed input text (syntax error, unknown variable, bad shape).
   */
  GplabStatus_InvalidInput = 1,
  /*
   A floor or comparison stayed undecided at the precision cap.
   */
  GplabStatus_Indeterminate = 2,
  /*
   Domain error (division by zero, premise violation, ...).
   */
  GplabStatus_Domain = 3,
  /*
   A required pointer argument was null or not valid UTF-8.
   */
  GplabStatus_NullArgument = 4,
  /*
   Internal panic caught at the boundary.
   */
  GplabStatus_Panic = 5,
} GplabStatus;

/*
 Opaque generalised-polynomial expression handle.
 */
typedef struct GplabExpr GplabExpr;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the most recent failure on this thread, or null.
 The pointer stays valid until the next failing call on the same thread.
 */
const char *gplab_last_error(void);

/*
 Library version as a static string.
 */
const char *gplab_version(void);

/*
 Parse an expression in the DSL (`frac`, `floor`, `sqrt`, `n`, `x_i`, ...).
 Returns null on error.

 # Safety
 `text` must be a valid NUL-terminated string.
 */
struct GplabExpr *gplab_expr_parse(const char *text);

/*
 Release an expression handle. Null is ignored.

 # Safety
 `expr` must come from this library and not be freed twice.
 */
void gplab_expr_free(struct GplabExpr *expr);

/*
 Release a string returned by this library. Null is ignored.

 # Safety
 `s` must come from this library and not be freed twice.
 */
void gplab_string_free(char *s);

/*
 Render an expression back to DSL text (reparses to an equal expression).

 # Safety
 `expr` must be a live handle from this library.
 */
char *gplab_expr_unparse(const struct GplabExpr *expr);

/*
 Number of variables the expression uses.

 # Safety
 `expr` must be a live handle from this library.
 */
uintptr_t gplab_expr_arity(const struct GplabExpr *expr);

/*
 Evaluate at an exact point given as comma-separated scalar literals
 (e.g. "7" or "1/2,sqrt(2)"). On success `*out` holds the exact value as
 text.

 # Safety
 All pointers must be valid; `out` must point to a writable pointer slot.
 */
enum GplabStatus gplab_expr_eval(const struct GplabExpr *expr,
                                 const char *point,
                                 uint32_t max_bits,
                                 char **out);

/*
 Indicator of g(n) >= 0 on the positive integers, as a new expression.

 # Safety
 `expr` must be a live handle from this library.
 */
struct GplabExpr *gplab_expr_indicator_ge0(const struct GplabExpr *expr);

/*
 Indicator of g(n) = 0 on the positive integers, as a new expression.

 # Safety
 `expr` must be a live handle from this library.
 */
struct GplabExpr *gplab_expr_indicator_zero(const struct GplabExpr *expr);

/*
 Indicator of a <= g(n) < b, with a and b exact scalar literals.

 # Safety
 `expr` must be a live handle; `a`, `b` valid NUL-terminated strings.
 */
struct GplabExpr *gplab_expr_indicator_interval(const struct GplabExpr *expr,
                                                const char *a,
                                                const char *b);

/*
 Torus orbit ({k^n x})_{n=0..n_steps} as CSV text with exact entries.
 `x` is a comma-separated list of exact coordinates.

 # Safety
 All pointers must be valid; `out` must point to a writable pointer slot.
 */
enum GplabStatus gplab_torus_orbit_csv(const char *x,
                                       uint64_t k,
                                       uintptr_t n_steps,
                                       uint32_t max_bits,
                                       char **out);

/*
 Exact membership of a point in a semialgebraic set given as a spec string
 (pieces `|`, conjuncts `;`, comparisons `<`, `>`, `==`, chains allowed).
 Writes 1 or 0 into `*out_member`.

 # Safety
 All pointers must be valid; `out_member` must be writable.
 */
enum GplabStatus gplab_set_member(const char *set_spec,
                                  const char *point,
                                  uint32_t max_bits,
                                  int32_t *out_member);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* GPLAB_H */
