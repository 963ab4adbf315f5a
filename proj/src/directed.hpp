#pragma once

// Directed-rounding scalar operations on IEEE doubles.
//
// Strategy: compute in round-to-nearest, recover the exact rounding error with
// an error-free transformation (TwoSum for +, fma residuals for *, /, sqrt),
// and step one ulp outward only when the nearest result lies on the wrong
// side.  The returned value is the correctly rounded directed result, so
// up - down is at most 1 ulp and exactly representable results pass through
// untouched.  No FP environment state is read or written; every op is a pure
// function and safe to call from any thread.
//
// Where the residual theorems do not apply (overflow, results in the
// subnormal range) we fall back to an unconditional one-ulp outward step,
// which still brackets the exact value and stays within the 2-ulp contract.

#include <cmath>
#include <cstdint>
#include <limits>

namespace chowrobbins {

enum class Direction { down, up };

namespace detail {

inline double next_up(double x) noexcept {
    return std::nextafter(x, std::numeric_limits<double>::infinity());
}

inline double next_down(double x) noexcept {
    return std::nextafter(x, -std::numeric_limits<double>::infinity());
}

// Round-to-nearest overflowed to +-inf; pull the directed result back to the
// correct side (the exact value is beyond the largest finite double).
inline double saturate(double s, bool up) noexcept {
    if (s == std::numeric_limits<double>::infinity())
        return up ? s : std::numeric_limits<double>::max();
    return up ? std::numeric_limits<double>::lowest() : s;
}

// Zone where the fma residual of a product/quotient/square is guaranteed
// representable (operand last-place scales stay above 2^-1074 with margin);
// below it the residual can round to zero and falsely certify exactness.
inline constexpr double residual_safe = 0x1p-960;

inline double add_dir(double x, double y, bool up) noexcept {
    double s = x + y;
    if (!std::isfinite(s)) return saturate(s, up);
    // Knuth TwoSum: x + y == s + err exactly (no overflow for finite s
    // outside a hairline corner we guard below).
    double bv = s - x;
    double err = (x - (s - bv)) + (y - bv);
    if (!std::isfinite(bv) || !std::isfinite(err))
        return up ? next_up(s) : next_down(s);
    if (up) {
        if (err > 0.0) s = next_up(s);
    } else {
        if (err < 0.0) s = next_down(s);
    }
    return s;
}

inline double mul_dir(double x, double y, bool up) noexcept {
    double p = x * y;
    if (!std::isfinite(p)) return saturate(p, up);
    if ((x == 0.0 || y == 0.0) && p == 0.0) return p;
    if (std::abs(p) < residual_safe) {
        // Underflow territory: the fma residual may itself round.
        return up ? next_up(p) : next_down(p);
    }
    double err = std::fma(x, y, -p); // exact: x*y == p + err
    if (up) {
        if (err > 0.0) p = next_up(p);
    } else {
        if (err < 0.0) p = next_down(p);
    }
    return p;
}

inline double div_dir(double x, double y, bool up) noexcept {
    double q = x / y;
    if (!std::isfinite(q)) return saturate(q, up);
    if (x == 0.0) return q;
    if (std::abs(x) < residual_safe || std::abs(q) < 0x1p-1021 || std::abs(y) < 0x1p-1021) {
        return up ? next_up(q) : next_down(q);
    }
    double err = std::fma(q, y, -x); // exact: q*y - x, sign tells the side
    bool q_high = (y > 0.0) ? (err > 0.0) : (err < 0.0);
    bool q_low = (y > 0.0) ? (err < 0.0) : (err > 0.0);
    if (up) {
        if (q_low) q = next_up(q);
    } else {
        if (q_high) q = next_down(q);
    }
    return q;
}

inline double sqrt_dir(double x, bool up) noexcept {
    double s = std::sqrt(x);
    if (x == 0.0) return 0.0;
    if (x < residual_safe) {
        return up ? next_up(s) : next_down(s);
    }
    double err = std::fma(s, s, -x); // exact: s*s - x
    if (up) {
        if (err < 0.0) s = next_up(s);
    } else {
        if (err > 0.0) s = next_down(s);
    }
    return s;
}

inline double avg_dir(double x, double y, bool up) noexcept {
    double s = add_dir(x, y, up);
    double t = 0.5 * s;
    if (t + t != s) // halving is exact except deep in the subnormals
        t = up ? next_up(t) : next_down(t);
    return t;
}

} // namespace detail

// Validated public entry points; non-finite inputs and domain violations
// (divide by zero, sqrt of a negative) throw std::domain_error.
double dir_add(double x, double y, Direction d);
double dir_mul(double x, double y, Direction d);
double dir_div(double x, double y, Direction d);
double dir_sqrt(double x, Direction d);
double dir_avg(double x, double y, Direction d);

// Smallest double strictly greater than pi.
inline constexpr double pi_upper = 0x1.921fb54442d19p+1;

} // namespace chowrobbins
