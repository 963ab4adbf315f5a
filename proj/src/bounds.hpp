#pragma once

#include <cstdint>

namespace chowrobbins {

// A game state: `heads` successes seen in `flips` tosses so far.
struct Position {
    std::int64_t heads = 0;
    std::int64_t flips = 0;
};

// A certified bracket around the true value of a position.
struct Enclosure {
    double lower = 0.0;
    double upper = 1.0;
};

// max(heads/flips, 1/2), rounded down. Stopping now pays heads/flips, and
// flipping until the running ratio next touches 1/2 (an almost-sure event)
// pays at least 1/2. flips == 0 means stopping is not yet allowed.
double trivial_lower(Position p);

// Value against a prophet who sees the whole coin sequence in advance,
// rounded up: max(heads/flips, 1/2) plus an excess term that shrinks with
// the flip count and with the lead |2*heads - flips|, clamped to 1.
double clairvoyant_upper(Position p);

// Bracket assigned to positions outside the computed box.
Enclosure seed_bounds(Position p);

}
