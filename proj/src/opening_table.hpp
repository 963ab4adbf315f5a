#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sweep.hpp"

namespace chowrobbins {

// One difference column d = heads - tails of the opening table.
struct ThresholdRow {
    std::int64_t difference = 0;
    // Deepest cell certified STOP, if any.
    std::optional<Position> last_stop;
    // First cell of the trailing run of certified CONTINUEs reaching
    // max_flips, if the column ends in one.
    std::optional<Position> first_continue;
    // Every UNKNOWN cell in the column, shallowest first.
    std::vector<Position> unresolved;
};

// Classifies the cells a = (n + d)/2 for n = d, d+2, ..., max_flips in each
// column d = 1..max_difference with result.query(), so cells the sweep did
// not record are answered from the closed-form seeds (and typically come
// back UNKNOWN).
std::vector<ThresholdRow> build_opening_table(const SweepResult& result,
                                              std::int64_t max_flips = 1000,
                                              std::int64_t max_difference = 26);

// A certified STOP deeper in a column than a certified CONTINUE would
// contradict the single-threshold structure of the stopping region; returns
// every such STOP cell (UNKNOWN cells make no claim and are skipped).
std::vector<Position> monotone_consistency_check(
    const SweepResult& result, std::int64_t max_flips = 1000,
    std::int64_t max_difference = 26);

}
