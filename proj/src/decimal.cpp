#include "decimal.hpp"

#include <cmath>
#include <stdexcept>

#include <gmpxx.h>

namespace chowrobbins {

std::string format_bound(double v, Direction dir, int digits) {
    if (!std::isfinite(v))
        throw std::domain_error("format_bound: value must be finite");
    if (digits < 1 || digits > 50)
        throw std::domain_error("format_bound: digits must be in [1, 50]");
    if (v == 0.0) return "0";
    bool negative = v < 0.0;
    if (negative) {
        v = -v;
        dir = dir == Direction::down ? Direction::up : Direction::down;
    }

    mpq_class q(v);
    q.canonicalize();

    // Decimal exponent e with 10^e <= q < 10^(e+1), found by exact compares
    // around the floating estimate.
    long e = std::lround(std::floor(std::log10(v)));
    auto pow10 = [](long k) {
        mpz_class z;
        mpz_ui_pow_ui(z.get_mpz_t(), 10, std::labs(k));
        return k >= 0 ? mpq_class(z) : mpq_class(1, z);
    };
    while (q < pow10(e)) --e;
    while (q >= pow10(e + 1)) ++e;

    // Scale to [10^(digits-1), 10^digits) and take the directed integer.
    mpq_class scaled = q * pow10(digits - 1 - e);
    mpz_class m;
    if (dir == Direction::down)
        mpz_fdiv_q(m.get_mpz_t(), scaled.get_num_mpz_t(),
                   scaled.get_den_mpz_t());
    else
        mpz_cdiv_q(m.get_mpz_t(), scaled.get_num_mpz_t(),
                   scaled.get_den_mpz_t());
    mpz_class full;
    mpz_ui_pow_ui(full.get_mpz_t(), 10, unsigned(digits));
    if (m == full) {
        mpz_divexact_ui(m.get_mpz_t(), m.get_mpz_t(), 10);
        ++e;
    }

    std::string mantissa = m.get_str();
    std::string out = negative ? "-" : "";
    if (e < 0) {
        out += "0.";
        out.append(std::size_t(-e - 1), '0');
        out += mantissa;
    } else if (e + 1 >= digits) {
        out += mantissa;
        out.append(std::size_t(e + 1 - digits), '0');
    } else {
        out += mantissa.substr(0, std::size_t(e + 1));
        out += '.';
        out += mantissa.substr(std::size_t(e + 1));
    }
    return out;
}

}
