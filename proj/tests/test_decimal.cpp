#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include <gmpxx.h>

#include "decimal.hpp"

using namespace chowrobbins;

namespace {

// Exact rational value of a fixed-notation decimal string.
mpq_class parse_decimal(const std::string& s) {
    std::string t = s;
    bool neg = !t.empty() && t[0] == '-';
    if (neg) t.erase(0, 1);
    std::string digits;
    long frac = 0;
    bool seen_point = false;
    for (char c : t) {
        if (c == '.') {
            seen_point = true;
            continue;
        }
        digits += c;
        if (seen_point) ++frac;
    }
    mpz_class num(digits, 10);
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, std::labs(frac));
    mpq_class q(num, den);
    q.canonicalize();
    return neg ? mpq_class(-q) : q;
}

std::uint64_t splitmix(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

}  // namespace

TEST_CASE("exact values print exactly") {
    CHECK(format_bound(0.0, Direction::down) == "0");
    CHECK(format_bound(-0.0, Direction::up) == "0");
    CHECK(format_bound(1.0, Direction::up) == "1.0000000000000");
    CHECK(format_bound(1.0, Direction::down) == "1.0000000000000");
    CHECK(format_bound(0.5, Direction::down) == "0.50000000000000");
    CHECK(format_bound(0.5, Direction::up) == "0.50000000000000");
    CHECK(format_bound(0.125, Direction::down, 3) == "0.125");
    CHECK(format_bound(0.125, Direction::up, 3) == "0.125");
    CHECK(format_bound(123.0, Direction::down, 3) == "123");
    CHECK(format_bound(123456.0, Direction::down, 3) == "123000");
    CHECK(format_bound(123456.0, Direction::up, 3) == "124000");
}

TEST_CASE("rounding direction shows in the last digit") {
    const double two_thirds = 2.0 / 3.0;
    CHECK(format_bound(two_thirds, Direction::down) == "0.66666666666666");
    CHECK(format_bound(two_thirds, Direction::up) == "0.66666666666667");

    // 0.1 in binary sits just above one tenth.
    CHECK(format_bound(0.1, Direction::down, 3) == "0.100");
    CHECK(format_bound(0.1, Direction::up, 3) == "0.101");

    // Carry across the leading digit: the next double below 1 rounds up
    // to 1 itself at 3 digits.
    const double just_below_one = std::nextafter(1.0, 0.0);
    CHECK(format_bound(just_below_one, Direction::up, 3) == "1.00");
    CHECK(format_bound(just_below_one, Direction::down, 3) == "0.999");

    CHECK(format_bound(-two_thirds, Direction::down) == "-0.66666666666667");
    CHECK(format_bound(-two_thirds, Direction::up) == "-0.66666666666666");
}

TEST_CASE("printed bounds bracket the exact value") {
    std::uint64_t state = 0x5eedull;
    for (int trial = 0; trial < 20000; ++trial) {
        std::uint64_t bits = splitmix(state);
        // Positive finite doubles spread over many magnitudes.
        double v = double(bits >> 11) * 0x1.0p-53;
        if (trial % 3 == 1) v *= 1e-9;
        if (trial % 3 == 2) v *= 1e9;
        if (v == 0.0) continue;
        int digits = 1 + int(bits % 20);
        std::string lo = format_bound(v, Direction::down, digits);
        std::string hi = format_bound(v, Direction::up, digits);
        mpq_class exact(v);
        CHECK(parse_decimal(lo) <= exact);
        CHECK(exact <= parse_decimal(hi));
    }
}

TEST_CASE("bad inputs are rejected") {
    CHECK_THROWS_AS(format_bound(std::nan(""), Direction::down),
                    std::domain_error);
    const double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(format_bound(inf, Direction::up), std::domain_error);
    CHECK_THROWS_AS(format_bound(0.5, Direction::down, 0), std::domain_error);
    CHECK_THROWS_AS(format_bound(0.5, Direction::down, 51), std::domain_error);
}
