#include "bounds.hpp"

#include <cstdlib>
#include <stdexcept>

#include "directed.hpp"

namespace chowrobbins {

namespace {

void require_position(Position p) {
    if (p.heads < 0 || p.flips < 0 || p.heads > p.flips)
        throw std::domain_error("position: need 0 <= heads <= flips");
}

}

double trivial_lower(Position p) {
    require_position(p);
    if (2 * p.heads <= p.flips) return 0.5;
    return dir_div(double(p.heads), double(p.flips), Direction::down);
}

double clairvoyant_upper(Position p) {
    require_position(p);
    if (p.flips == 0) return 1.0;
    std::int64_t lead = 2 * p.heads - p.flips;
    double base = lead <= 0
                      ? 0.5
                      : dir_div(double(p.heads), double(p.flips), Direction::up);
    double excess =
        dir_mul(0.25,
                dir_sqrt(dir_div(pi_upper, double(p.flips), Direction::up),
                         Direction::up),
                Direction::up);
    if (lead != 0) {
        // min of two upper bounds still bounds the true minimum from above.
        double inv = dir_div(1.0, double(2 * std::abs(lead)), Direction::up);
        if (inv < excess) excess = inv;
    }
    double sum = dir_add(base, excess, Direction::up);
    return sum < 1.0 ? sum : 1.0;
}

Enclosure seed_bounds(Position p) {
    return {trivial_lower(p), clairvoyant_upper(p)};
}

}
