#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace chowrobbins {

namespace {

void require_position(Position p) {
    if (p.heads < 0 || p.flips < 0 || p.heads > p.flips)
        throw std::domain_error("position: need 0 <= heads <= flips");
    if (p.flips > 1000000000)
        throw std::domain_error("position: flip count too large");
}

void require_target(Ratio t) {
    if (t.den < 1 || t.den > 1000000 || t.num < 0 || t.num > t.den)
        throw std::domain_error("target: need 0 <= num/den <= 1 with den <= 10^6");
}

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

struct SplitMix {
    std::uint64_t state;
    std::uint64_t next() {
        state += 0x9e3779b97f4a7c15ULL;
        return mix64(state);
    }
};

const mpq_class& pi_upper_rational() {
    static const mpq_class value = [] {
        mpz_class scale;
        mpz_ui_pow_ui(scale.get_mpz_t(), 10, 50);
        mpq_class r(mpz_class("314159265358979323846264338327950288419716939937511"),
                    scale);
        r.canonicalize();
        return r;
    }();
    return value;
}

// Strict rational upper bound on sqrt(x), 128 fractional bits: with
// C = ceil(x * 2^256), sqrt(x) * 2^128 <= sqrt(C) < isqrt(C) + 1.
mpq_class rational_sqrt_upper(const mpq_class& x) {
    mpz_class scaled = x.get_num() << 256;
    mpz_class c;
    mpz_cdiv_q(c.get_mpz_t(), scaled.get_mpz_t(), x.get_den().get_mpz_t());
    mpz_class root;
    mpz_sqrt(root.get_mpz_t(), c.get_mpz_t());
    root += 1;
    mpq_class out(root, mpz_class(1) << 128);
    out.canonicalize();
    return out;
}

// (den/(2 num))^k as an exact rational, clipped to 1. Exponents beyond
// 65536 are clipped too; the base is <= 1, so a smaller exponent only
// weakens the bound, never invalidates it.
mpq_class exceedance_bound_exact(Ratio target, std::int64_t k) {
    mpq_class base(target.den, 2 * target.num);
    base.canonicalize();
    if (base >= 1) return 1;
    unsigned long e =
        static_cast<unsigned long>(std::min<std::int64_t>(k, 65536));
    mpq_class out;
    mpz_pow_ui(out.get_num_mpz_t(), base.get_num_mpz_t(), e);
    mpz_pow_ui(out.get_den_mpz_t(), base.get_den_mpz_t(), e);
    return out;
}

}

double McEstimate::estimate() const {
    return trials == 0 ? 0.0 : double(successes) / double(trials);
}

double McEstimate::std_error() const {
    if (trials == 0) return 0.0;
    double e = estimate();
    return std::sqrt(e * (1.0 - e) / double(trials));
}

RequiredFlips required_flips(Position p, Ratio target) {
    require_position(p);
    require_target(target);
    if (p.flips < 1)
        throw std::domain_error("required_flips: need flips >= 1");
    if (2 * target.num <= target.den || target.num >= target.den)
        throw std::domain_error("required_flips: target must lie in (1/2, 1)");
    mpz_class deficit =
        mpz_class(target.num) * p.flips - mpz_class(target.den) * p.heads;
    if (deficit < 0)
        throw std::domain_error("required_flips: proportion already above target");
    mpz_class k = deficit / (target.den - target.num) + 1;
    return {k.get_si()};
}

double exceedance_bound(Ratio target, std::int64_t k) {
    require_target(target);
    if (2 * target.num < target.den)
        throw std::domain_error("exceedance_bound: target below 1/2");
    if (k < 0)
        throw std::domain_error("exceedance_bound: negative flip count");
    double b = to_double(exceedance_bound_exact(target, k), Direction::up);
    return b < 1.0 ? b : 1.0;
}

McEstimate mc_exceed_probability(Position p, Ratio target, std::int64_t trials,
                                 std::int64_t cap, std::uint64_t seed) {
    require_position(p);
    require_target(target);
    if (2 * target.num < target.den || target.num >= target.den)
        throw std::domain_error("mc_exceed_probability: target must lie in [1/2, 1)");
    if (trials < 1 || trials > 2000000000)
        throw std::domain_error("mc_exceed_probability: trials out of range");
    if (cap < 1 || cap > 2000000000)
        throw std::domain_error("mc_exceed_probability: cap out of range");

    const std::int64_t rise = target.den - target.num;
    const std::int64_t fall = target.num;
    const std::int64_t start = target.den * p.heads - target.num * p.flips;
    if (start > 0) return {trials, trials};

    std::int64_t successes = 0;
    for (std::int64_t t = 0; t < trials; ++t) {
        SplitMix gen{
            mix64(seed ^ mix64(static_cast<std::uint64_t>(t) + 0x9e3779b97f4a7c15ULL))};
        std::int64_t s = start;
        std::uint64_t bits = 0;
        int avail = 0;
        for (std::int64_t left = cap; left > 0; --left) {
            if (s + left * rise <= 0) break;
            if (avail == 0) {
                bits = gen.next();
                avail = 64;
            }
            s += (bits & 1) ? rise : -fall;
            bits >>= 1;
            --avail;
            if (s > 0) {
                ++successes;
                break;
            }
        }
    }
    return {successes, trials};
}

ExceedSplit exceed_probability_exact(Position p, Ratio target, int cap) {
    require_position(p);
    require_target(target);
    if (2 * target.num < target.den || target.num >= target.den)
        throw std::domain_error("exceed_probability_exact: target must lie in [1/2, 1)");
    if (cap < 1 || cap > 2000)
        throw std::domain_error("exceed_probability_exact: cap out of range");

    auto wins = [&](std::int64_t h, std::int64_t t) {
        return target.den * (p.heads + h) - target.num * (p.flips + t) > 0;
    };
    if (wins(0, 0)) return {1, 0, 1};

    mpq_class succeeded = 0;
    std::vector<mpq_class> alive(1, mpq_class(1));
    for (int t = 0; t < cap; ++t) {
        std::vector<mpq_class> grown(t + 2, mpq_class(0));
        for (int h = 0; h <= t; ++h) {
            if (alive[h] == 0) continue;
            mpq_class half = alive[h] / 2;
            grown[h] += half;  // tails never raise the proportion
            if (wins(h + 1, t + 1))
                succeeded += half;
            else
                grown[h + 1] += half;
        }
        alive.swap(grown);
    }

    ExceedSplit out{succeeded, 0, succeeded};
    for (int h = 0; h <= cap; ++h) {
        if (alive[h] == 0) continue;
        out.alive += alive[h];
        if (2 * target.num == target.den) {
            out.upper += alive[h];
        } else {
            std::int64_t k =
                required_flips({p.heads + h, p.flips + cap}, target).k_star;
            out.upper += alive[h] * exceedance_bound_exact(target, k);
        }
    }
    return out;
}

mpq_class clairvoyant_finite(Position p, int depth) {
    require_position(p);
    if (depth < 0 || depth > 22)
        throw std::domain_error("clairvoyant_finite: depth out of range");
    if (p.flips == 0 && depth == 0)
        throw std::domain_error("clairvoyant_finite: no proportion exists yet");

    std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> leaves;
    auto walk = [&](auto&& self, int t, std::int64_t extra_heads,
                    std::int64_t best_num, std::int64_t best_den) -> void {
        if (t == depth) {
            std::int64_t g = std::gcd(best_num, best_den);
            ++leaves[{best_num / g, best_den / g}];
            return;
        }
        std::int64_t den = p.flips + t + 1;
        for (int head = 0; head <= 1; ++head) {
            std::int64_t num = p.heads + extra_heads + head;
            bool better = static_cast<__int128>(num) * best_den >
                          static_cast<__int128>(best_num) * den;
            self(self, t + 1, extra_heads + head, better ? num : best_num,
                 better ? den : best_den);
        }
    };
    if (p.flips >= 1)
        walk(walk, 0, 0, p.heads, p.flips);
    else
        walk(walk, 0, 0, 0, 1);

    mpq_class total = 0;
    for (const auto& [ratio, count] : leaves) {
        mpq_class value(ratio.first, ratio.second);
        value.canonicalize();
        total += mpq_class(count) * value;
    }
    total /= std::int64_t(1) << depth;
    return total;
}

mpq_class rational_trivial_lower(Position p) {
    require_position(p);
    if (p.flips == 0) return mpq_class(1, 2);
    mpq_class r(p.heads, p.flips);
    r.canonicalize();
    return std::max(r, mpq_class(1, 2));
}

mpq_class rational_clairvoyant_upper(Position p) {
    require_position(p);
    if (p.flips == 0) return 1;
    mpq_class excess = rational_sqrt_upper(pi_upper_rational() / long(p.flips)) / 4;
    std::int64_t lead = 2 * p.heads - p.flips;
    if (lead != 0) {
        mpq_class inv(1, 2 * std::abs(lead));
        inv.canonicalize();
        excess = std::min(excess, inv);
    }
    mpq_class v = rational_trivial_lower(p) + excess;
    return std::min(v, mpq_class(1));
}

std::map<std::pair<std::int64_t, std::int64_t>, RationalEnclosure>
exact_small_solver(std::int64_t horizon, std::int64_t band,
                   std::int64_t record_limit) {
    if (horizon < 1 || horizon > 2000)
        throw std::domain_error("exact_small_solver: horizon out of range");
    if (band < 1 || band > horizon)
        throw std::domain_error("exact_small_solver: band out of range");
    if (record_limit < 0 || record_limit > horizon)
        throw std::domain_error("exact_small_solver: record_limit out of range");

    auto row_lo = [&](std::int64_t n) {
        return n > band ? (n - band + 1) / 2 : 0;
    };
    auto row_hi = [&](std::int64_t n) { return std::min(n, (n + band) / 2); };

    std::map<std::pair<std::int64_t, std::int64_t>, RationalEnclosure> out;
    std::vector<RationalEnclosure> older, row;
    for (std::int64_t n = horizon; n >= 0; --n) {
        std::int64_t lo = row_lo(n), hi = row_hi(n);
        row.assign(hi - lo + 1, RationalEnclosure{});
        for (std::int64_t a = lo; a <= hi; ++a) {
            RationalEnclosure& e = row[a - lo];
            if (n == horizon || std::abs(2 * a - n) == band) {
                e = {rational_trivial_lower({a, n}),
                     rational_clairvoyant_upper({a, n})};
            } else {
                const RationalEnclosure& tail = older[a - row_lo(n + 1)];
                const RationalEnclosure& head = older[a + 1 - row_lo(n + 1)];
                e.lower = (tail.lower + head.lower) / 2;
                e.upper = (tail.upper + head.upper) / 2;
                if (n > 0) {
                    mpq_class pay(a, n);
                    pay.canonicalize();
                    e.lower = std::max(pay, e.lower);
                    e.upper = std::max(pay, e.upper);
                }
                // The averaged upper can drift above the closed-form bound
                // near the horizon; both are valid uppers, so keep the min.
                e.upper = std::min(e.upper, rational_clairvoyant_upper({a, n}));
            }
            if (n <= record_limit) out.emplace(std::make_pair(a, n), e);
        }
        older.swap(row);
    }
    return out;
}

double to_double(const mpq_class& v, Direction d) {
    double t = v.get_d();
    if (!std::isfinite(t))
        throw std::domain_error("to_double: out of double range");
    mpq_class back(t);
    back.canonicalize();
    int side = cmp(back, v);
    if (side == 0) return t;
    if (d == Direction::up) return side < 0 ? detail::next_up(t) : t;
    return side > 0 ? detail::next_down(t) : t;
}

}
