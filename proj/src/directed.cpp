#include "directed.hpp"

#include <stdexcept>

namespace chowrobbins {

namespace {

void require_finite(double v, const char* who) {
    if (!std::isfinite(v))
        throw std::domain_error(std::string(who) + ": non-finite operand");
}

} // namespace

double dir_add(double x, double y, Direction d) {
    require_finite(x, "dir_add");
    require_finite(y, "dir_add");
    return detail::add_dir(x, y, d == Direction::up);
}

double dir_mul(double x, double y, Direction d) {
    require_finite(x, "dir_mul");
    require_finite(y, "dir_mul");
    return detail::mul_dir(x, y, d == Direction::up);
}

double dir_div(double x, double y, Direction d) {
    require_finite(x, "dir_div");
    require_finite(y, "dir_div");
    if (y == 0.0) throw std::domain_error("dir_div: division by zero");
    return detail::div_dir(x, y, d == Direction::up);
}

double dir_sqrt(double x, Direction d) {
    require_finite(x, "dir_sqrt");
    if (x < 0.0) throw std::domain_error("dir_sqrt: negative operand");
    return detail::sqrt_dir(x, d == Direction::up);
}

double dir_avg(double x, double y, Direction d) {
    require_finite(x, "dir_avg");
    require_finite(y, "dir_avg");
    return detail::avg_dir(x, y, d == Direction::up);
}

} // namespace chowrobbins
