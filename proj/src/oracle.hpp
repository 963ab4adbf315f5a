#pragma once

#include <cstdint>
#include <map>
#include <utility>

#include <gmpxx.h>

#include "bounds.hpp"
#include "directed.hpp"

namespace chowrobbins {

// Exact target proportion num/den.
struct Ratio {
    std::int64_t num = 1;
    std::int64_t den = 2;
};

struct RequiredFlips {
    std::int64_t k_star = 1;
};

// Smallest number of consecutive heads from (heads, flips) after which the
// running proportion strictly exceeds the target; equivalently one past the
// largest j with (heads+j)/(flips+j) <= target. Needs flips >= 1 and
// max(heads/flips, 1/2) <= target < 1.
RequiredFlips required_flips(Position p, Ratio target);

// The probability that a fair-coin continuation ever pushes the proportion
// strictly above the target is at most (2*target)^-k when k consecutive
// heads are still required; returns that bound rounded up. Needs
// 1/2 <= target <= 1 and k >= 0.
double exceedance_bound(Ratio target, std::int64_t k);

struct McEstimate {
    std::int64_t successes = 0;
    std::int64_t trials = 0;
    double estimate() const;
    double std_error() const;
};

// Fair-coin simulation of the exceedance event from p, truncated after
// `cap` additional flips per trial. Truncation can only lose successes, so
// the estimate is biased downward. Reproducible for a fixed seed; trials
// draw independent generators split deterministically by trial index.
McEstimate mc_exceed_probability(Position p, Ratio target,
                                 std::int64_t trials, std::int64_t cap,
                                 std::uint64_t seed);

// Exact decomposition of the exceedance probability at a small cap.
// `succeeded` is the mass that exceeds the target within cap flips, `alive`
// the mass still undecided at the cap, and `upper` adds to `succeeded`
// each alive state's own exceedance bound, so the true probability lies in
// [succeeded, upper]. succeeded + alive == 1.
struct ExceedSplit {
    mpq_class succeeded;
    mpq_class alive;
    mpq_class upper;
};
ExceedSplit exceed_probability_exact(Position p, Ratio target, int cap);

// Exact expected maximum of the running proportion over the next `depth`
// flips (the current proportion competes too, once flips >= 1), by
// enumerating all 2^depth continuations. A lower bound on the value
// against a prophet. depth <= 22.
mpq_class clairvoyant_finite(Position p, int depth);

// The seed bounds in exact rational arithmetic: same formulas as the
// floating versions, but with a fixed 50-digit rational over-approximation
// of pi and an integer-square-root upper bracket (128 fractional bits).
mpq_class rational_trivial_lower(Position p);
mpq_class rational_clairvoyant_upper(Position p);

struct RationalEnclosure {
    mpq_class lower;
    mpq_class upper;
};

// Backward induction in exact rational arithmetic over the same truncated
// box as the floating engine (horizon row and band edges hold seeds, the
// root takes the continuation alone). Ground truth for small horizons;
// returns rows with flips <= record_limit keyed by (heads, flips).
// horizon <= 2000.
std::map<std::pair<std::int64_t, std::int64_t>, RationalEnclosure>
exact_small_solver(std::int64_t horizon, std::int64_t band,
                   std::int64_t record_limit);

// Nearest double on the chosen side of an exact rational.
double to_double(const mpq_class& v, Direction d);

}
