#ifndef PDLA_H
#define PDLA_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum PdlaStatus {
  PDLA_STATUS_OK = 0,
  // Null pointer, invalid UTF-8 or a buffer of the wrong length.
  PDLA_STATUS_INVALID_ARGUMENT = 1,
  // The constraints cannot be satisfied.
  PDLA_STATUS_INFEASIBLE = 2,
  // Overflow, non-convergence or another numerical failure.
  PDLA_STATUS_NUMERIC = 3,
  // Malformed instance, advice or matrix.
  PDLA_STATUS_BAD_INPUT = 4,
  // A Rust panic was caught at the boundary.
  PDLA_STATUS_PANIC = 5,
} PdlaStatus;

// Opaque online covering LP solver.
typedef struct PdlaLpSolver PdlaLpSolver;

// Opaque online covering SDP solver.
typedef struct PdlaSdpSolver PdlaSdpSolver;

// Per-round summary filled by the `process` calls.
typedef struct PdlaStepReport {
  size_t round;
  // Phase restarts triggered during this round.
  size_t phases_entered;
  size_t iterations;
  // Row value `a·x` for LPs, `λ_min(Σ A_j x_j − B)` for SDPs.
  double final_value;
  double cost;
} PdlaStepReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null if none. The
// pointer stays valid until the next failing call on the same thread.
const char *pdla_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *pdla_version(void);

// Creates an LP solver for `n` variables with costs `c`. `advice_x` may be
// null for zero advice; otherwise it must hold `n` entries.
//
// # Safety
// `c` must point to `n` doubles, `advice_x` to `n` doubles or be null, and
// `out` must be writable.
enum PdlaStatus pdla_lp_new(const double *c,
                            size_t n,
                            bool boxed,
                            const double *advice_x,
                            double lambda,
                            struct PdlaLpSolver **out);

// Reveals one covering row given as `len` (column, value) pairs.
// `report` may be null.
//
// # Safety
// `solver` must come from [`pdla_lp_new`]; `cols` and `vals` must point to
// `len` elements; `report` must be writable or null.
enum PdlaStatus pdla_lp_process_row(struct PdlaLpSolver *solver,
                                    const size_t *cols,
                                    const double *vals,
                                    size_t len,
                                    struct PdlaStepReport *report);

// Number of variables.
//
// # Safety
// `solver` must be a live handle or null (returns 0).
size_t pdla_lp_num_vars(const struct PdlaLpSolver *solver);

// Copies the current solution into `out`, which must hold exactly `len`
// equal to the number of variables.
//
// # Safety
// `out` must point to `len` writable doubles.
enum PdlaStatus pdla_lp_solution(const struct PdlaLpSolver *solver, double *out, size_t len);

// Writes `c·x` of the current solution to `out`.
//
// # Safety
// `out` must be writable.
enum PdlaStatus pdla_lp_cost(const struct PdlaLpSolver *solver, double *out);

// Phase restarts so far.
//
// # Safety
// `solver` must be a live handle or null (returns 0).
size_t pdla_lp_phases(const struct PdlaLpSolver *solver);

// Releases an LP solver. Null is ignored.
//
// # Safety
// `solver` must come from [`pdla_lp_new`] and not be used afterwards.
void pdla_lp_free(struct PdlaLpSolver *solver);

// Solves a JSON LP instance, revealing rows in order. `advice_json` may be
// null for zero advice with `lambda = 1`. On success `*out_json` receives a
// result document to release with [`pdla_string_free`].
//
// # Safety
// Both strings must be NUL-terminated; `out_json` must be writable.
enum PdlaStatus pdla_lp_solve_json(const char *instance_json,
                                   const char *advice_json,
                                   char **out_json);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not be used afterwards.
void pdla_string_free(char *s);

// Creates an SDP solver with `n` constraint matrices of size `d × d`, stored
// row-major and back to back in `a` (`n·d·d` doubles). `advice_x` may be null.
//
// # Safety
// `c` must point to `n` doubles, `a` to `n·d·d` doubles, `advice_x` to `n`
// doubles or be null, and `out` must be writable.
enum PdlaStatus pdla_sdp_new(const double *c,
                             size_t n,
                             const double *a,
                             size_t d,
                             bool boxed,
                             const double *advice_x,
                             double lambda,
                             struct PdlaSdpSolver **out);

// Reveals the next lower-bound matrix (`d·d` doubles, row-major). It must
// be PSD and dominate the previous one. `report` may be null.
//
// # Safety
// `solver` must come from [`pdla_sdp_new`]; `b` must point to `d·d`
// doubles; `report` must be writable or null.
enum PdlaStatus pdla_sdp_process_matrix(struct PdlaSdpSolver *solver,
                                        const double *b,
                                        struct PdlaStepReport *report);

// Copies the current SDP solution into `out` (`len` must equal `n`).
//
// # Safety
// `out` must point to `len` writable doubles.
enum PdlaStatus pdla_sdp_solution(const struct PdlaSdpSolver *solver, double *out, size_t len);

// Writes `c·x` of the current SDP solution to `out`.
//
// # Safety
// `out` must be writable.
enum PdlaStatus pdla_sdp_cost(const struct PdlaSdpSolver *solver, double *out);

// Phase restarts so far.
//
// # Safety
// `solver` must be a live handle or null (returns 0).
size_t pdla_sdp_phases(const struct PdlaSdpSolver *solver);

// Releases an SDP solver. Null is ignored.
//
// # Safety
// `solver` must come from [`pdla_sdp_new`] and not be used afterwards.
void pdla_sdp_free(struct PdlaSdpSolver *solver);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PDLA_H */
