#include "sweep.hpp"

#include <algorithm>
#include <atomic>
#include <barrier>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>

#include "checkpoint.hpp"
#include "directed.hpp"

namespace chowrobbins {

namespace {

constexpr std::int64_t max_horizon = 1000000000;
constexpr std::int64_t max_records = 10000000;
constexpr int max_workers = 64;

// Largest |d| present in row n: min(band, n) pulled down to the parity of n.
std::int64_t extent(std::int64_t n, std::int64_t band) {
    std::int64_t D = n < band ? n : band;
    if (((D ^ n) & 1) != 0) --D;
    return D;
}

// Row-constant part of the closed-form upper bound, 0.25*sqrt(pi/n) rounded
// up with the same operation chain clairvoyant_upper() uses, so the fused
// per-entry cap below reproduces it bit for bit.
double row_excess(std::int64_t n) {
    return detail::mul_dir(
        0.25, detail::sqrt_dir(detail::div_dir(pi_upper, double(n), true), true),
        true);
}

// min(base + excess, 1) with the bounds-module rounding and tie behavior.
inline double cap_from(double base, double excess_sqrt, double inv2d) noexcept {
    double excess = inv2d < excess_sqrt ? inv2d : excess_sqrt;
    double sum = detail::add_dir(base, excess, true);
    return sum < 1.0 ? sum : 1.0;
}

// Interior entries [i0, i1) of row n from row n+1. Entry i covers difference
// d = 2i - D; its children sit at indices i+coff and i+coff+1 of the next
// row. Split by the sign of d: at d <= 0 the stop payoff is at most 1/2 and
// the continuation lower bound never drops below 1/2, so the payoff max and
// its division vanish.
template <bool Record>
void interior_kernel(std::int64_t n, std::int64_t D, std::int64_t coff,
                     const double* lo_next, const double* hi_next, double* lo,
                     double* hi, [[maybe_unused]] double* clo,
                     [[maybe_unused]] double* chi, double excess_row,
                     const double* inv2d, std::int64_t i0,
                     std::int64_t i1) noexcept {
    const double nd = double(n);
    const std::int64_t neg_end = std::min(i1, (D + 1) / 2);
    std::int64_t i = i0;
    for (; i < neg_end; ++i) {
        const std::int64_t j = i + coff;
        const double cl = detail::avg_dir(lo_next[j], lo_next[j + 1], false);
        const double ch = detail::avg_dir(hi_next[j], hi_next[j + 1], true);
        const double cap = cap_from(0.5, excess_row, inv2d[D - 2 * i]);
        lo[i] = cl;
        hi[i] = ch < cap ? ch : cap;
        if constexpr (Record) {
            clo[i] = cl;
            chi[i] = ch;
        }
    }
    if (i < i1 && (D & 1) == 0 && i == D / 2) {
        const std::int64_t j = i + coff;
        const double cl = detail::avg_dir(lo_next[j], lo_next[j + 1], false);
        const double ch = detail::avg_dir(hi_next[j], hi_next[j + 1], true);
        // d = 0: no finite-lead bound applies, only the sqrt excess.
        double sum = detail::add_dir(0.5, excess_row, true);
        const double cap = sum < 1.0 ? sum : 1.0;
        lo[i] = cl;
        hi[i] = ch < cap ? ch : cap;
        if constexpr (Record) {
            clo[i] = cl;
            chi[i] = ch;
        }
        ++i;
    }
    double ad = double((n + (2 * i - D)) / 2);
    for (; i < i1; ++i, ad += 1.0) {
        const std::int64_t j = i + coff;
        const double cl = detail::avg_dir(lo_next[j], lo_next[j + 1], false);
        const double ch = detail::avg_dir(hi_next[j], hi_next[j + 1], true);
        const double pay_dn = detail::div_dir(ad, nd, false);
        const double pay_up = detail::div_dir(ad, nd, true);
        const double cap = cap_from(pay_up, excess_row, inv2d[2 * i - D]);
        const double vlo = pay_dn > cl ? pay_dn : cl;
        double vhi = pay_up > ch ? pay_up : ch;
        if (cap < vhi) vhi = cap;
        lo[i] = vlo;
        hi[i] = vhi;
        if constexpr (Record) {
            clo[i] = cl;
            chi[i] = ch;
        }
    }
}

Enclosure seed_continuation(Position p) {
    Enclosure t = seed_bounds({p.heads, p.flips + 1});
    Enclosure h = seed_bounds({p.heads + 1, p.flips + 1});
    return {detail::avg_dir(t.lower, h.lower, false),
            detail::avg_dir(t.upper, h.upper, true)};
}

Decision root_decision(Enclosure continuation) {
    Decision d;
    d.kind = Decision::Kind::cont;
    d.continuation = continuation;
    return d;
}

PositionRecord seed_only_answer(Position p) {
    PositionRecord r;
    r.pos = p;
    r.value = seed_bounds(p);
    r.seed_only = true;
    Enclosure cont = seed_continuation(p);
    r.decision = p.flips == 0 ? root_decision(cont) : classify(p, cont);
    return r;
}

void require_valid_position(Position p, const char* who) {
    if (p.heads < 0 || p.flips < 0 || p.heads > p.flips ||
        p.flips > max_horizon)
        throw std::domain_error(std::string(who) +
                                ": need 0 <= heads <= flips <= 1e9");
}

}  // namespace

std::int64_t default_band(std::int64_t horizon) {
    if (horizon < 1)
        throw std::domain_error("default_band: horizon must be positive");
    double b = std::floor((2.0 / std::sqrt(M_PI)) * std::sqrt(double(horizon)));
    std::int64_t h = std::int64_t(b);
    if (h < 1) h = 1;
    if (h > horizon) h = horizon;
    return h;
}

const char* to_string(Decision::Kind k) {
    switch (k) {
        case Decision::Kind::stop: return "STOP";
        case Decision::Kind::cont: return "CONTINUE";
        default: return "UNKNOWN";
    }
}

Decision classify(Position p, Enclosure continuation) {
    if (p.flips < 1)
        throw std::domain_error("classify: the root has no stop payoff");
    require_valid_position(p, "classify");
    if (!(continuation.lower <= continuation.upper))
        throw std::domain_error("classify: continuation is not an enclosure");
    Decision d;
    d.continuation = continuation;
    d.stop_payoff_num = p.heads;
    d.stop_payoff_den = p.flips;
    const double nd = double(p.flips);
    const double ad = double(p.heads);
    if (dir_mul(continuation.lower, nd, Direction::down) > ad)
        d.kind = Decision::Kind::cont;
    else if (dir_mul(continuation.upper, nd, Direction::up) <= ad)
        d.kind = Decision::Kind::stop;
    else
        d.kind = Decision::Kind::unknown;
    return d;
}

BoundRow step_back(const BoundRow& next, std::int64_t n, const BoxConfig& cfg) {
    std::int64_t horizon = cfg.horizon;
    std::int64_t band = cfg.band == 0 ? default_band(horizon) : cfg.band;
    if (horizon < 1 || band < 1 || band > horizon)
        throw std::domain_error("step_back: invalid box");
    if (n < 0 || next.n != n + 1 || next.n > horizon)
        throw std::domain_error("step_back: need next.n == n + 1 within the box");
    const std::int64_t Dn = extent(next.n, band);
    if (next.d_min != -Dn || std::int64_t(next.values.size()) != Dn + 1)
        throw std::domain_error("step_back: row layout does not match the box");

    const std::int64_t D = extent(n, band);
    BoundRow out;
    out.n = n;
    out.d_min = -D;
    out.values.resize(D + 1);
    auto child = [&](std::int64_t dc, std::int64_t ac) -> Enclosure {
        if (std::llabs(dc) > band) return seed_bounds({ac, n + 1});
        return next.values[(dc + Dn) / 2];
    };
    for (std::int64_t i = 0; i <= D; ++i) {
        const std::int64_t d = 2 * i - D;
        const std::int64_t a = (n + d) / 2;
        Enclosure t = child(d - 1, a);
        Enclosure h = child(d + 1, a + 1);
        Enclosure e{dir_avg(t.lower, h.lower, Direction::down),
                    dir_avg(t.upper, h.upper, Direction::up)};
        if (n >= 1) {
            double pay_dn = dir_div(double(a), double(n), Direction::down);
            double pay_up = dir_div(double(a), double(n), Direction::up);
            e.lower = std::max(pay_dn, e.lower);
            e.upper = std::max(pay_up, e.upper);
        }
        out.values[i] = e;
    }
    return out;
}

const PositionRecord* SweepResult::find(Position p) const {
    auto before = [](const PositionRecord& r, Position q) {
        if (r.pos.flips != q.flips) return r.pos.flips > q.flips;
        return r.pos.heads < q.heads;
    };
    auto it = std::lower_bound(records.begin(), records.end(), p, before);
    if (it != records.end() && it->pos.heads == p.heads &&
        it->pos.flips == p.flips)
        return &*it;
    for (const auto& e : extras)
        if (e.pos.heads == p.heads && e.pos.flips == p.flips) return &e;
    return nullptr;
}

PositionRecord SweepResult::query(Position p) const {
    require_valid_position(p, "query");
    if (const PositionRecord* r = find(p)) return *r;
    return seed_only_answer(p);
}

SweepResult sweep(const BoxConfig& cfg_in, const SweepOptions& opt) {
    BoxConfig cfg = cfg_in;
    if (cfg.horizon < 1 || cfg.horizon > max_horizon)
        throw std::domain_error("sweep: horizon must be in [1, 1e9]");
    if (cfg.band == 0) cfg.band = default_band(cfg.horizon);
    if (cfg.band < 1 || cfg.band > cfg.horizon)
        throw std::domain_error("sweep: band must be in [1, horizon]");
    const std::int64_t horizon = cfg.horizon;
    const std::int64_t band = cfg.band;

    const std::int64_t record_limit = opt.record_limit;
    if (record_limit < 0 || record_limit > horizon)
        throw std::domain_error("sweep: record_limit must be in [0, horizon]");
    if (opt.workers < 1 || opt.workers > max_workers)
        throw std::domain_error("sweep: workers must be in [1, 64]");
    if (opt.checkpoint_every < 0)
        throw std::domain_error("sweep: checkpoint_every must be >= 0");
    if ((opt.resume || opt.checkpoint_every > 0) && opt.checkpoint_path.empty())
        throw std::domain_error("sweep: checkpointing needs a checkpoint path");

    std::int64_t expected = 0;
    for (std::int64_t n = 0; n <= record_limit; ++n) {
        expected += extent(n, band) + 1;
        if (expected > max_records)
            throw std::domain_error(
                "sweep: record_limit would keep more than 1e7 positions; "
                "lower it or query positions individually");
    }

    for (Position q : opt.queries) {
        require_valid_position(q, "sweep query");
        const bool in_box =
            q.flips <= horizon && std::llabs(2 * q.heads - q.flips) <= band;
        if (in_box && q.flips > record_limit)
            throw std::domain_error(
                "sweep: query inside the box needs record_limit >= its flip "
                "count");
    }

    SweepResult result;
    result.config = cfg;
    result.record_limit = record_limit;
    result.records.reserve(std::size_t(expected));

    // Rolling row storage plus the recorded continuation of the current row.
    const std::size_t width = std::size_t(band) + 2;
    std::vector<double> storage(6 * width);
    double* lon = storage.data();            // row n+1 lower
    double* hin = storage.data() + width;    // row n+1 upper
    double* loc = storage.data() + 2 * width;  // row n lower
    double* hic = storage.data() + 3 * width;  // row n upper
    double* clo = storage.data() + 4 * width;  // row n continuation lower
    double* chi = storage.data() + 5 * width;  // row n continuation upper

    std::vector<double> inv2d(std::size_t(band) + 1, 0.0);
    for (std::int64_t k = 1; k <= band; ++k)
        inv2d[std::size_t(k)] = detail::div_dir(1.0, double(2 * k), true);

    // Children of an entry in row n live in row n+1 at dc = d -/+ 1; fetch
    // them from the rolling buffers, or from the seeds when they exit the box.
    auto child_bounds = [&](std::int64_t dc, std::int64_t ac, std::int64_t nc,
                            std::int64_t Dn) -> Enclosure {
        if (nc > horizon || std::llabs(dc) > band) return seed_bounds({ac, nc});
        const std::int64_t j = (dc + Dn) / 2;
        return {lon[j], hin[j]};
    };

    auto record_row = [&](std::int64_t n, bool next_in_box) {
        const std::int64_t D = extent(n, band);
        const std::int64_t Dn = next_in_box ? extent(n + 1, band) : 0;
        const bool horizon_row = n == horizon;
        const bool edged = D == band;
        for (std::int64_t i = 0; i <= D; ++i) {
            const std::int64_t d = 2 * i - D;
            const std::int64_t a = (n + d) / 2;
            const Position p{a, n};
            const bool seeded = horizon_row || (edged && (i == 0 || i == D));
            PositionRecord r;
            r.pos = p;
            r.value = {loc[i], hic[i]};
            r.seed_only = seeded;
            Enclosure cont;
            if (!seeded) {
                cont = {clo[i], chi[i]};
            } else if (!next_in_box) {
                cont = seed_continuation(p);
            } else {
                Enclosure t = child_bounds(d - 1, a, n + 1, Dn);
                Enclosure h = child_bounds(d + 1, a + 1, n + 1, Dn);
                cont = {detail::avg_dir(t.lower, h.lower, false),
                        detail::avg_dir(t.upper, h.upper, true)};
            }
            r.decision = n == 0 ? root_decision(cont) : classify(p, cont);
            result.records.push_back(r);
        }
    };

    auto seed_row_into = [&](std::int64_t n, double* lo, double* hi) {
        const std::int64_t D = extent(n, band);
        for (std::int64_t i = 0; i <= D; ++i) {
            const std::int64_t a = (n + (2 * i - D)) / 2;
            Enclosure s = seed_bounds({a, n});
            lo[i] = s.lower;
            hi[i] = s.upper;
        }
    };

    std::int64_t start = horizon - 1;
    if (opt.resume) {
        RowSnapshot s = read_row_snapshot(opt.checkpoint_path);
        if (s.horizon != horizon || s.band != band)
            throw config_mismatch_error(
                "checkpoint belongs to a different box (horizon " +
                std::to_string(s.horizon) + ", band " + std::to_string(s.band) +
                ")");
        if (s.row < 1 || s.row > horizon)
            throw format_error("checkpoint row is outside the box");
        const std::int64_t Ds = extent(s.row, band);
        if (s.d_min != -Ds || std::int64_t(s.lower.size()) != Ds + 1 ||
            s.upper.size() != s.lower.size())
            throw format_error("checkpoint row layout does not match the box");
        if (s.row <= record_limit)
            throw config_mismatch_error(
                "checkpoint row is inside the recorded window; rerun without "
                "resume or lower record_limit");
        std::copy(s.lower.begin(), s.lower.end(), lon);
        std::copy(s.upper.begin(), s.upper.end(), hin);
        start = s.row - 1;
    } else {
        // Horizon row: every entry has a child beyond the horizon, so the
        // closed-form seeds stand in for the recurrence.
        seed_row_into(horizon, lon, hin);
        if (record_limit == horizon) {
            std::swap(lon, loc);
            std::swap(hin, hic);
            record_row(horizon, false);
            std::swap(lon, loc);
            std::swap(hin, hic);
        }
    }

    const int workers = opt.workers;
    std::atomic<bool> failed{false};
    std::exception_ptr trouble;
    std::optional<std::barrier<>> gate;
    if (workers > 1) gate.emplace(workers);

    auto worker_loop = [&](int tid) {
        for (std::int64_t n = start; n >= 1; --n) {
            if (gate) gate->arrive_and_wait();
            if (failed.load(std::memory_order_acquire)) return;
            const std::int64_t D = extent(n, band);
            const std::int64_t K = D + 1;
            const std::int64_t Dn = extent(n + 1, band);
            const std::int64_t coff = (Dn - D - 1) / 2;
            const bool edged = D == band;
            const std::int64_t i0 = edged ? 1 : 0;
            const std::int64_t i1 = edged ? K - 1 : K;
            const double erow = row_excess(n);
            const std::int64_t len = i1 - i0;
            const std::int64_t c0 = i0 + len * tid / workers;
            const std::int64_t c1 = i0 + len * (tid + 1) / workers;
            const bool record = n <= record_limit;
            if (record)
                interior_kernel<true>(n, D, coff, lon, hin, loc, hic, clo, chi,
                                      erow, inv2d.data(), c0, c1);
            else
                interior_kernel<false>(n, D, coff, lon, hin, loc, hic, clo, chi,
                                       erow, inv2d.data(), c0, c1);
            if (tid == 0 && !failed.load(std::memory_order_relaxed)) {
                try {
                    if (edged) {
                        Enclosure s0 = seed_bounds({(n - D) / 2, n});
                        loc[0] = s0.lower;
                        hic[0] = s0.upper;
                        Enclosure s1 = seed_bounds({(n + D) / 2, n});
                        loc[K - 1] = s1.lower;
                        hic[K - 1] = s1.upper;
                    }
                } catch (...) {
                    trouble = std::current_exception();
                    failed.store(true, std::memory_order_release);
                }
            }
            if (gate) gate->arrive_and_wait();
            if (tid != 0) continue;
            if (failed.load(std::memory_order_relaxed)) continue;
            try {
                if (record) record_row(n, true);
                if (opt.checkpoint_every > 0 && n > record_limit &&
                    n % opt.checkpoint_every == 0) {
                    RowSnapshot snap;
                    snap.horizon = horizon;
                    snap.band = band;
                    snap.row = n;
                    snap.d_min = -D;
                    snap.lower.assign(loc, loc + K);
                    snap.upper.assign(hic, hic + K);
                    write_row_snapshot(opt.checkpoint_path, snap);
                }
                if (opt.progress && (n & 0xffff) == 0)
                    opt.progress({n, horizon});
                std::swap(lon, loc);
                std::swap(hin, hic);
            } catch (...) {
                trouble = std::current_exception();
                failed.store(true, std::memory_order_release);
            }
        }
    };

    if (workers > 1) {
        std::vector<std::thread> pool;
        pool.reserve(std::size_t(workers) - 1);
        try {
            for (int w = 1; w < workers; ++w)
                pool.emplace_back(worker_loop, w);
        } catch (...) {
            // Already-spawned workers are parked at the first barrier; supply
            // the missing arrivals so they observe the failure and exit.
            failed.store(true, std::memory_order_release);
            if (start >= 1 && gate)
                (void)gate->arrive(std::ptrdiff_t(workers) -
                                   std::ptrdiff_t(pool.size()));
            for (auto& t : pool) t.join();
            throw;
        }
        worker_loop(0);
        for (auto& t : pool) t.join();
    } else {
        worker_loop(0);
    }
    if (trouble) std::rethrow_exception(trouble);

    // Root: stopping is unavailable before the first flip, so the value is
    // the continuation alone and the decision is CONTINUE by construction.
    {
        Enclosure cont{detail::avg_dir(lon[0], lon[1], false),
                       detail::avg_dir(hin[0], hin[1], true)};
        PositionRecord r;
        r.pos = {0, 0};
        r.value = {cont.lower, cont.upper < 1.0 ? cont.upper : 1.0};
        r.decision = root_decision(cont);
        result.records.push_back(r);
    }

    for (Position q : opt.queries) {
        if (result.find(q)) continue;
        result.extras.push_back(seed_only_answer(q));
    }
    return result;
}

}
