/* C interface for the coin-flip stopping-game solver.
 *
 * The solver computes certified lower and upper bounds on the value of the
 * game "flip a fair coin as long as you like, cash out the fraction of
 * heads", by backward induction with directed rounding over the truncated
 * box n <= horizon, |2a - n| <= band. Every returned enclosure is rigorous:
 * the exact value lies inside it, and every STOP/CONTINUE verdict is a
 * machine-checked inequality against the exact stop payoff.
 *
 * All functions return CR_OK on success; on failure cr_last_error() gives a
 * message for the calling thread. No call throws, no call aborts.
 */

#ifndef CHOWROBBINS_H
#define CHOWROBBINS_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#ifndef CR_API
#if defined(__GNUC__)
#define CR_API __attribute__((visibility("default")))
#else
#define CR_API
#endif
#endif

typedef enum cr_status {
    CR_OK = 0,
    CR_ERR_ARGUMENT = 1,        /* null pointer or malformed call */
    CR_ERR_DOMAIN = 2,          /* value outside its documented range */
    CR_ERR_IO = 3,              /* file could not be read or written */
    CR_ERR_FORMAT = 4,          /* file content malformed or corrupt */
    CR_ERR_CONFIG_MISMATCH = 5, /* checkpoint belongs to another config */
    CR_ERR_VERIFY = 6,          /* a verification suite found a failure */
    CR_ERR_INTERNAL = 7         /* unexpected condition */
} cr_status;

typedef enum cr_decision {
    CR_DECISION_STOP = 0,     /* stopping is certified optimal */
    CR_DECISION_CONTINUE = 1, /* continuing is certified strictly better */
    CR_DECISION_UNKNOWN = 2   /* the enclosure straddles the payoff */
} cr_decision;

typedef struct cr_config {
    int64_t horizon;      /* box depth N, in [1, 1e9] */
    int64_t band;         /* box height h; 0 derives it from the horizon */
    int64_t record_limit; /* keep every in-band position with n <= this */
    int32_t workers;      /* parallel chunks per row; 0 means 1 */
    int32_t resume;       /* nonzero: continue from checkpoint_path */
    const char* checkpoint_path; /* may be NULL when unused */
    int64_t checkpoint_every;    /* snapshot row cadence; 0 disables */
} cr_config;

typedef struct cr_report {
    int64_t heads;
    int64_t flips;
    double value_lower; /* enclosure of the position value */
    double value_upper;
    double cont_lower;  /* enclosure of the value of flipping once more */
    double cont_upper;
    cr_decision decision;
    int32_t seed_only;  /* nonzero: closed-form bounds, no induction */
    int64_t payoff_num; /* stop payoff heads/flips; 0/0 at the root */
    int64_t payoff_den;
} cr_report;

typedef struct cr_solver cr_solver;

typedef void (*cr_progress_fn)(int64_t row, int64_t horizon, void* ctx);
typedef void (*cr_line_fn)(const char* line, void* ctx);

/* Message for the most recent failing call on this thread ("" if none). */
CR_API const char* cr_last_error(void);

/* Stable identifier for a status code, e.g. "CR_ERR_DOMAIN". */
CR_API const char* cr_status_name(cr_status status);

/* Box height floor((2/sqrt(pi)) * sqrt(horizon)) used when band is 0. */
CR_API cr_status cr_default_band(int64_t horizon, int64_t* band);

/* Closed-form bounds max(a/n, 1/2) <= V <= that + min excess term, without
 * running any induction. */
CR_API cr_status cr_seed_bounds(int64_t heads, int64_t flips, double* lower,
                                double* upper);

/* Verdict for a position given an enclosure of its continuation value.
 * Fills every cr_report field except the value enclosure, which is set to
 * the continuation capped below by the stop payoff. */
CR_API cr_status cr_classify(int64_t heads, int64_t flips, double cont_lower,
                             double cont_upper, cr_report* report);

/* Fixed-notation decimal with `digits` significant digits, rounded toward
 * minus infinity when round_up is zero and toward plus infinity otherwise,
 * so printed bounds remain bounds. Needs buffer space for the digits, a
 * possible sign and point, and the terminator; fails with CR_ERR_ARGUMENT
 * when size is too small. */
CR_API cr_status cr_format_bound(double value, int round_up, int digits,
                                 char* buffer, size_t size);

/* Solver lifecycle: create with a config, run once, query at will, destroy.
 * run() performs the whole sweep; with config.resume nonzero it first loads
 * the checkpoint and continues from the row stored there. progress may be
 * NULL; it is invoked from the run thread every 65536 rows. */
CR_API cr_status cr_solver_create(const cr_config* config, cr_solver** solver);
CR_API cr_status cr_solver_run(cr_solver* solver, cr_progress_fn progress,
                               void* ctx);

/* Report for one position. In-band positions with flips <= record_limit
 * come from the induction; positions outside the box are answered from the
 * closed-form seeds with seed_only set; in-band positions deeper than
 * record_limit are refused with CR_ERR_DOMAIN. */
CR_API cr_status cr_solver_query(const cr_solver* solver, int64_t heads,
                                 int64_t flips, cr_report* report);
CR_API void cr_solver_destroy(cr_solver* solver);

/* One row of the opening table: the column of positions with fixed
 * difference heads - tails, scanned for n <= max_flips. */
typedef struct cr_table_row {
    int64_t difference;
    int32_t has_last_stop;      /* deepest certified STOP */
    int32_t has_first_continue; /* start of the trailing CONTINUE run */
    int64_t last_stop_heads;
    int64_t last_stop_tails;
    int64_t first_continue_heads;
    int64_t first_continue_tails;
    const int64_t* unresolved; /* heads,tails pairs; 2*unresolved_count */
    size_t unresolved_count;
} cr_table_row;

typedef void (*cr_table_row_fn)(const cr_table_row* row, void* ctx);

/* Emits rows for differences 1..max_difference in order. Cells the sweep
 * recorded use certified verdicts; other cells fall back to the seeds. */
CR_API cr_status cr_table_emit(const cr_solver* solver, int64_t max_flips,
                               int64_t max_difference, cr_table_row_fn emit,
                               void* ctx);

/* Counts certified STOP cells lying deeper in a column than a certified
 * CONTINUE, which would contradict the threshold structure. */
CR_API cr_status cr_monotone_check(const cr_solver* solver, int64_t max_flips,
                                   int64_t max_difference,
                                   int64_t* violations);

/* Knobs for cr_verify. Zero means "suite default" everywhere. */
typedef struct cr_verify_options {
    uint64_t seed;    /* simulation seed (0 is a valid seed) */
    int64_t trials;   /* Monte Carlo trials per check */
    int64_t cap;      /* Monte Carlo path length cap in flips */
    int64_t depth;    /* lookahead / exact-exploration depth */
    int64_t horizon;  /* oracle suite: exact-induction box depth */
} cr_verify_options;

/* Self-contained verification suites cross-checking the solver's bounds
 * against independent oracles: "exceedance" (tail-probability bound vs
 * exact enumeration and Monte Carlo), "oracle" (float sweep vs exact
 * rational induction), "clairvoyant" (closed-form upper bound vs exact
 * prophet values). Emits one line per check through `line` (may be NULL).
 * options may be NULL for all defaults; out-of-range knobs are
 * CR_ERR_DOMAIN. Returns CR_ERR_VERIFY if any check fails, CR_ERR_DOMAIN
 * for an unknown suite name. */
CR_API cr_status cr_verify(const char* suite, const cr_verify_options* options,
                           cr_line_fn line, void* ctx);

#ifdef __cplusplus
}
#endif

#endif
