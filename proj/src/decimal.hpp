#pragma once

#include <string>

#include "directed.hpp"

namespace chowrobbins {

// Fixed-notation decimal with exactly `digits` significant digits, rounded
// toward the requested side of the exact binary value, so printed lower
// bounds stay lower bounds and printed upper bounds stay upper bounds.
// Needs a finite v and 1 <= digits <= 50.
std::string format_bound(double v, Direction dir, int digits = 14);

}
