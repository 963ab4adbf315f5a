#pragma once

// Backward-induction engine over the truncated box {(a,n): n <= N, |2a-n| <= h}.
//
// The horizon row and the band edges |2a-n| = h hold the closed-form seed
// bounds; every interior position averages its two children with outward
// rounding, takes the max with the stop payoff, and finally caps the upper
// bound at the closed-form upper bound (the raw average can drift above it
// near the horizon, and both are valid upper bounds, so the min is too).
// Rows are processed from n = N down to n = 0 with only two rows alive.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bounds.hpp"

namespace chowrobbins {

struct BoxConfig {
    std::int64_t horizon = 0;
    std::int64_t band = 0;  // 0: derive from the horizon via default_band()
};

// floor((2/sqrt(pi)) * sqrt(N)): the height at which the band-edge seed error
// 1/(2h) matches the horizon seed error 0.25*sqrt(pi/N) at the far corners.
std::int64_t default_band(std::int64_t horizon);

struct Decision {
    enum class Kind { stop, cont, unknown };
    Kind kind = Kind::unknown;
    Enclosure continuation;
    // The stop payoff a/n kept as integers; 0/0 at the root, where stopping
    // is not available.
    std::int64_t stop_payoff_num = 0;
    std::int64_t stop_payoff_den = 0;
};

const char* to_string(Decision::Kind k);  // "STOP" / "CONTINUE" / "UNKNOWN"

// Certified classification against the stop payoff. CONTINUE requires
// continuation.lower * n > a after rounding the product down; STOP requires
// continuation.upper * n <= a after rounding it up. The right side stays an
// integer, so a/n is never materialized as a rounded scalar.
Decision classify(Position p, Enclosure continuation);

struct PositionRecord {
    Position pos;
    Enclosure value;
    Decision decision;
    // True when value comes from the closed-form seeds alone (band edge,
    // horizon row, or a query outside the box).
    bool seed_only = false;
};

// One dense induction row: values[i] belongs to difference d = d_min + 2i,
// i.e. to position a = (n + d)/2.
struct BoundRow {
    std::int64_t n = 0;
    std::int64_t d_min = 0;
    std::vector<Enclosure> values;
};

// Single recurrence step from row n+1 to row n, exactly as written: every
// in-band position gets the averaged continuation (children outside the box
// are fetched from seed_bounds) and, for n >= 1, the max with the stop
// payoff. No seeding and no upper-bound cap happen here; the full sweep
// seeds the band edges and caps instead. With next identically [1,1] the
// output is [1,1] on any row whose children stay in the band.
BoundRow step_back(const BoundRow& next, std::int64_t n, const BoxConfig& cfg);

struct SweepProgress {
    std::int64_t row = 0;
    std::int64_t horizon = 0;
};

struct SweepOptions {
    // All in-band positions with n <= record_limit are recorded. Row 0 is
    // always recorded, so the result always carries the root enclosure.
    std::int64_t record_limit = 0;
    // Extra positions to answer. In-band queries must satisfy
    // n <= record_limit; positions outside the box are answered from the
    // closed-form seeds and flagged seed_only.
    std::vector<Position> queries;
    // Row entries are split into this many contiguous chunks computed by
    // parallel threads; the result is bit-identical for any worker count.
    int workers = 1;
    // Row snapshots for resuming long runs. Written every checkpoint_every
    // rows while n is still above record_limit (recorded rows are cheap to
    // recompute and are not snapshotted).
    std::string checkpoint_path;
    std::int64_t checkpoint_every = 0;
    bool resume = false;
    std::function<void(SweepProgress)> progress;
};

struct SweepResult {
    BoxConfig config;  // band resolved to the value actually used
    std::int64_t record_limit = 0;
    // In-band records ordered by n descending, then a ascending.
    std::vector<PositionRecord> records;
    // Seed-only answers for queries outside the box, in query order.
    std::vector<PositionRecord> extras;

    const PositionRecord* find(Position p) const;
    // find(), falling back to a fresh seed-only answer for positions the
    // sweep did not cover.
    PositionRecord query(Position p) const;
};

SweepResult sweep(const BoxConfig& cfg, const SweepOptions& opt = {});

}
