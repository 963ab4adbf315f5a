#include "opening_table.hpp"

#include <stdexcept>

namespace chowrobbins {

namespace {

void require_table_args(std::int64_t max_flips, std::int64_t max_difference) {
    if (max_flips < 1 || max_difference < 1)
        throw std::domain_error(
            "opening table: max_flips and max_difference must be positive");
}

template <typename Cell>
void scan_columns(const SweepResult& result, std::int64_t max_flips,
                  std::int64_t max_difference, Cell&& cell) {
    for (std::int64_t d = 1; d <= max_difference; ++d) {
        for (std::int64_t n = d; n <= max_flips; n += 2) {
            Position p{(n + d) / 2, n};
            cell(d, p, result.query(p).decision.kind);
        }
    }
}

}  // namespace

std::vector<ThresholdRow> build_opening_table(const SweepResult& result,
                                              std::int64_t max_flips,
                                              std::int64_t max_difference) {
    require_table_args(max_flips, max_difference);
    std::vector<ThresholdRow> rows(static_cast<std::size_t>(max_difference));
    for (std::int64_t d = 1; d <= max_difference; ++d)
        rows[std::size_t(d - 1)].difference = d;
    scan_columns(result, max_flips, max_difference,
                 [&](std::int64_t d, Position p, Decision::Kind kind) {
                     ThresholdRow& row = rows[std::size_t(d - 1)];
                     switch (kind) {
                         case Decision::Kind::stop:
                             row.last_stop = p;
                             row.first_continue.reset();
                             break;
                         case Decision::Kind::cont:
                             if (!row.first_continue) row.first_continue = p;
                             break;
                         default:
                             row.unresolved.push_back(p);
                             row.first_continue.reset();
                             break;
                     }
                 });
    return rows;
}

std::vector<Position> monotone_consistency_check(const SweepResult& result,
                                                 std::int64_t max_flips,
                                                 std::int64_t max_difference) {
    require_table_args(max_flips, max_difference);
    std::vector<Position> violations;
    std::int64_t continue_seen_for = 0;
    scan_columns(result, max_flips, max_difference,
                 [&](std::int64_t d, Position p, Decision::Kind kind) {
                     if (kind == Decision::Kind::cont)
                         continue_seen_for = d;
                     else if (kind == Decision::Kind::stop &&
                              continue_seen_for == d)
                         violations.push_back(p);
                 });
    return violations;
}

}
