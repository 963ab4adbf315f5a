#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <gmpxx.h>

#include <cfloat>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "directed.hpp"

using namespace chowrobbins;

namespace {

// Exact rational value of a finite double.
mpq_class q(double v) { return mpq_class(v); }

// hi is reachable from lo in at most k upward ulp steps.
bool within_ulps(double lo, double hi, int k) {
    double v = lo;
    for (int i = 0; i < k; ++i) {
        if (v >= hi) return true;
        v = detail::next_up(v);
    }
    return v >= hi;
}

double random_double(std::mt19937_64& rng, int emin, int emax, bool allow_negative = true) {
    std::uniform_int_distribution<int> exp_dist(emin, emax);
    std::uniform_int_distribution<std::uint64_t> bits;
    double mant = 1.0 + std::ldexp(static_cast<double>(bits(rng) >> 12), -52);
    double v = std::ldexp(mant, exp_dist(rng));
    if (allow_negative && (bits(rng) & 1)) v = -v;
    return v;
}

} // namespace

TEST_CASE("exactly representable results are returned unchanged") {
    CHECK(dir_add(0.25, 0.5, Direction::up) == 0.75);
    CHECK(dir_add(0.25, 0.5, Direction::down) == 0.75);
    CHECK(dir_mul(0.5, 0.5, Direction::down) == 0.25);
    CHECK(dir_mul(0.5, 0.5, Direction::up) == 0.25);
    CHECK(dir_div(1.0, 4.0, Direction::up) == 0.25);
    CHECK(dir_sqrt(4.0, Direction::down) == 2.0);
    CHECK(dir_sqrt(4.0, Direction::up) == 2.0);
    CHECK(dir_avg(0.5, 1.0, Direction::down) == 0.75);
    CHECK(dir_avg(0.5, 1.0, Direction::up) == 0.75);
}

TEST_CASE("inexact quotients bracket the exact value from adjacent doubles") {
    double dn = dir_div(1.0, 3.0, Direction::down);
    double up = dir_div(1.0, 3.0, Direction::up);
    mpq_class third(1, 3);
    CHECK(q(dn) < third);
    CHECK(q(up) > third);
    CHECK(detail::next_up(dn) == up);

    dn = dir_div(1.0, 10.0, Direction::down);
    up = dir_div(1.0, 10.0, Direction::up);
    mpq_class tenth(1, 10);
    CHECK(q(dn) < tenth);
    CHECK(q(up) > tenth);
}

TEST_CASE("averages bracket the exact midpoint") {
    double a = 0.57141, b = 0.57143;
    mpq_class mid = (q(a) + q(b)) / 2;
    CHECK(q(dir_avg(a, b, Direction::down)) <= mid);
    CHECK(q(dir_avg(a, b, Direction::up)) >= mid);
    CHECK(dir_avg(a, b, Direction::up) >= 0.57142);
    CHECK(dir_avg(a, b, Direction::down) <= 0.57142);
}

TEST_CASE("sqrt enclosures verified by exact squaring") {
    for (double x : {2.0, 3.0, 0.5, 0.125, 1e-30, 7.0, 3.141592653589793}) {
        double dn = dir_sqrt(x, Direction::down);
        double up = dir_sqrt(x, Direction::up);
        CHECK(q(dn) * q(dn) <= q(x));
        CHECK(q(up) * q(up) >= q(x));
        CHECK(within_ulps(dn, up, 2));
    }
    CHECK(dir_sqrt(0.0, Direction::down) == 0.0);
    CHECK(dir_sqrt(0.0, Direction::up) == 0.0);
}

TEST_CASE("pi_upper is the tightest double above pi") {
    // 50-digit decimal brackets of pi.
    mpq_class pi_lo("31415926535897932384626433832795028841971693993751");
    mpq_class pi_hi("31415926535897932384626433832795028841971693993752");
    mpq_class scale;
    mpz_ui_pow_ui(scale.get_num_mpz_t(), 10, 49);
    scale.get_den() = 1;
    pi_lo /= scale;
    pi_hi /= scale;
    CHECK(q(pi_upper) > pi_hi);                     // strictly above pi
    CHECK(q(detail::next_down(pi_upper)) < pi_lo);  // and only one ulp above
}

TEST_CASE("soundness and tightness on random operands") {
    std::mt19937_64 rng(20240801u);
    for (int i = 0; i < 100000; ++i) {
        // Wide exponent spread, including subnormal and near-overflow zones.
        int lo = (i % 10 == 0) ? -1074 : -360;
        int hi = (i % 10 == 0) ? 1023 : 360;
        double x = random_double(rng, lo, hi);
        double y = random_double(rng, lo, hi);

        double adn = dir_add(x, y, Direction::down);
        double aup = dir_add(x, y, Direction::up);
        mpq_class sum = q(x) + q(y);
        if (std::isfinite(aup)) {
            CHECK(q(adn) <= sum);
            CHECK(q(aup) >= sum);
            CHECK(within_ulps(adn, aup, 2));
        } else {
            CHECK(sum > q(DBL_MAX));
        }

        double mdn = dir_mul(x, y, Direction::down);
        double mup = dir_mul(x, y, Direction::up);
        mpq_class prod = q(x) * q(y);
        if (std::isfinite(mdn) && std::isfinite(mup)) {
            CHECK(q(mdn) <= prod);
            CHECK(q(mup) >= prod);
            CHECK(within_ulps(mdn, mup, 2));
        }

        if (y != 0.0) {
            double ddn = dir_div(x, y, Direction::down);
            double dup = dir_div(x, y, Direction::up);
            mpq_class quot = q(x) / q(y);
            if (std::isfinite(ddn) && std::isfinite(dup)) {
                CHECK(q(ddn) <= quot);
                CHECK(q(dup) >= quot);
                CHECK(within_ulps(ddn, dup, 2));
            }
        }

        double ax = std::abs(x);
        double sdn = dir_sqrt(ax, Direction::down);
        double sup = dir_sqrt(ax, Direction::up);
        CHECK(q(sdn) * q(sdn) <= q(ax));
        CHECK(q(sup) * q(sup) >= q(ax));

        double vdn = dir_avg(x, y, Direction::down);
        double vup = dir_avg(x, y, Direction::up);
        if (std::isfinite(vdn) && std::isfinite(vup)) {
            mpq_class mid = sum / 2;
            CHECK(q(vdn) <= mid);
            CHECK(q(vup) >= mid);
        }
    }
}

TEST_CASE("results are deterministic") {
    double a = dir_div(2.0, 7.0, Direction::down);
    double b = dir_sqrt(2.0, Direction::up);
    for (int i = 0; i < 100; ++i) {
        CHECK(dir_div(2.0, 7.0, Direction::down) == a);
        CHECK(dir_sqrt(2.0, Direction::up) == b);
    }
}

TEST_CASE("domain violations are hard errors, never NaN") {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(dir_div(1.0, 0.0, Direction::up), std::domain_error);
    CHECK_THROWS_AS(dir_div(0.0, 0.0, Direction::down), std::domain_error);
    CHECK_THROWS_AS(dir_sqrt(-1.0, Direction::down), std::domain_error);
    CHECK_THROWS_AS(dir_add(nan, 1.0, Direction::up), std::domain_error);
    CHECK_THROWS_AS(dir_add(1.0, inf, Direction::up), std::domain_error);
    CHECK_THROWS_AS(dir_mul(inf, 0.0, Direction::down), std::domain_error);
    CHECK_THROWS_AS(dir_avg(nan, nan, Direction::down), std::domain_error);
    CHECK_THROWS_AS(dir_sqrt(nan, Direction::up), std::domain_error);
}
