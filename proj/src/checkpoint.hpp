#pragma once

// Resume support for long sweeps: a snapshot of one fully computed row plus
// the box geometry it belongs to, stored as a small versioned binary file.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace chowrobbins {

struct RowSnapshot {
    std::int64_t horizon = 0;
    std::int64_t band = 0;
    std::int64_t row = 0;    // flip count n of the stored row
    std::int64_t d_min = 0;  // difference 2a-n of lower[0]; entries step by 2
    std::vector<double> lower;
    std::vector<double> upper;
};

// File could not be read or written.
struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// File exists but is not a valid snapshot (bad magic, version, or checksum).
struct format_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Snapshot is valid but belongs to a different run configuration.
struct config_mismatch_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Writes atomically: a temp file in the same directory is renamed over the
// target, so a crash never leaves a half-written snapshot behind.
void write_row_snapshot(const std::string& path, const RowSnapshot& s);

RowSnapshot read_row_snapshot(const std::string& path);

}
