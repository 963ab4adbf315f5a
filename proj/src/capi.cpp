#include "chowrobbins.h"

#include <algorithm>
#include <cinttypes>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "bounds.hpp"
#include "checkpoint.hpp"
#include "decimal.hpp"
#include "directed.hpp"
#include "opening_table.hpp"
#include "oracle.hpp"
#include "sweep.hpp"

using namespace chowrobbins;

struct cr_solver {
    BoxConfig cfg;
    std::int64_t record_limit = 0;
    int workers = 1;
    bool resume = false;
    std::string checkpoint_path;
    std::int64_t checkpoint_every = 0;
    bool ran = false;
    SweepResult result;
};

namespace {

thread_local std::string g_error;

cr_status fail(cr_status s, const char* message) {
    g_error = message;
    return s;
}

template <typename F>
cr_status guarded(F&& f) {
    try {
        return f();
    } catch (const config_mismatch_error& e) {
        return fail(CR_ERR_CONFIG_MISMATCH, e.what());
    } catch (const format_error& e) {
        return fail(CR_ERR_FORMAT, e.what());
    } catch (const io_error& e) {
        return fail(CR_ERR_IO, e.what());
    } catch (const std::domain_error& e) {
        return fail(CR_ERR_DOMAIN, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(CR_ERR_ARGUMENT, e.what());
    } catch (const std::bad_alloc&) {
        return fail(CR_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(CR_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(CR_ERR_INTERNAL, "unknown error");
    }
}

cr_decision to_c(Decision::Kind k) {
    switch (k) {
        case Decision::Kind::stop: return CR_DECISION_STOP;
        case Decision::Kind::cont: return CR_DECISION_CONTINUE;
        default: return CR_DECISION_UNKNOWN;
    }
}

void fill_report(const PositionRecord& r, cr_report* out) {
    out->heads = r.pos.heads;
    out->flips = r.pos.flips;
    out->value_lower = r.value.lower;
    out->value_upper = r.value.upper;
    out->cont_lower = r.decision.continuation.lower;
    out->cont_upper = r.decision.continuation.upper;
    out->decision = to_c(r.decision.kind);
    out->seed_only = r.seed_only ? 1 : 0;
    out->payoff_num = r.decision.stop_payoff_num;
    out->payoff_den = r.decision.stop_payoff_den;
}

void emit_line(cr_line_fn line, void* ctx, const std::string& s) {
    if (line) line(s.c_str(), ctx);
}

std::string fmt(const char* pattern, ...) {
    va_list args;
    va_start(args, pattern);
    char buf[512];
    std::vsnprintf(buf, sizeof buf, pattern, args);
    va_end(args);
    return buf;
}

// Exact (2*target)^-k as a rational, mirroring exceedance_bound without
// the float rounding, for cross-checks below.
mpq_class rational_exceedance(Ratio t, std::int64_t k) {
    mpq_class base(t.den, 2 * t.num);
    base.canonicalize();
    mpq_class out(1);
    for (std::int64_t i = 0; i < k; ++i) out *= base;
    return out;
}

int verify_exceedance(const cr_verify_options& opt, cr_line_fn line,
                      void* ctx) {
    struct Case {
        Position p;
        Ratio t;
    };
    const Case cases[] = {
        {{1, 2}, {5, 9}},  {{1, 2}, {3, 5}},  {{2, 4}, {3, 5}},
        {{3, 5}, {2, 3}},  {{0, 1}, {4, 7}},  {{0, 1}, {7, 10}},
        {{5, 9}, {3, 5}},  {{2, 3}, {7, 10}}, {{4, 7}, {3, 4}},
        {{6, 8}, {3, 4}},
    };
    std::int64_t trials = opt.trials > 0 ? opt.trials : 20000;
    std::int64_t cap = opt.cap > 0 ? opt.cap : 4096;
    int exact_cap = opt.depth > 0 ? int(std::min<std::int64_t>(opt.depth, 2000))
                                  : 18;
    int failures = 0;
    std::uint64_t idx = 0;
    for (const Case& c : cases) {
        ++idx;
        std::int64_t k = required_flips(c.p, c.t).k_star;
        double bound = exceedance_bound(c.t, k);
        ExceedSplit split = exceed_probability_exact(c.p, c.t, exact_cap);
        McEstimate mc =
            mc_exceed_probability(c.p, c.t, trials, cap, opt.seed + idx);
        bool ok = true;
        // The one-shot bound must dominate the exact lower bound, its own
        // float rounding, and the simulated frequency up to noise.
        if (rational_exceedance(c.t, k) < split.succeeded) ok = false;
        if (mpq_class(bound) < rational_exceedance(c.t, k)) ok = false;
        if (split.upper < split.succeeded) ok = false;
        if (mc.estimate() - 3.0 * mc.std_error() > bound) ok = false;
        failures += ok ? 0 : 1;
        emit_line(line, ctx,
                  fmt("exceedance pos=%" PRId64 "-%" PRId64 " target=%" PRId64
                      "/%" PRId64 " k=%" PRId64
                      " bound=%.9f exact_low=%.9f mc=%.9f %s",
                      c.p.heads, c.p.flips - c.p.heads, c.t.num, c.t.den, k,
                      bound, split.succeeded.get_d(), mc.estimate(),
                      ok ? "ok" : "FAIL"));
    }
    return failures;
}

int verify_oracle(const cr_verify_options& opt, cr_line_fn line, void* ctx) {
    struct Box {
        std::int64_t horizon, band;
    };
    std::vector<Box> boxes;
    if (opt.horizon > 0)
        boxes.push_back({opt.horizon, default_band(opt.horizon)});
    else
        boxes = {{2, 2}, {40, 6}, {60, 8}};
    int failures = 0;
    for (const Box& b : boxes) {
        SweepOptions opt;
        opt.record_limit = b.horizon;
        SweepResult res = sweep({b.horizon, b.band}, opt);
        auto exact = exact_small_solver(b.horizon, b.band, b.horizon);
        std::int64_t bad = 0;
        for (const PositionRecord& r : res.records) {
            auto it = exact.find({r.pos.heads, r.pos.flips});
            if (it == exact.end() || mpq_class(r.value.lower) > it->second.lower ||
                it->second.upper > mpq_class(r.value.upper))
                ++bad;
        }
        if (exact.size() != res.records.size()) ++bad;
        failures += bad != 0 ? 1 : 0;
        emit_line(line, ctx,
                  fmt("oracle box=%" PRId64 "x%" PRId64 " cells=%zu "
                      "containment_breaks=%" PRId64 " %s",
                      b.horizon, b.band, res.records.size(), bad,
                      bad == 0 ? "ok" : "FAIL"));
    }
    return failures;
}

int verify_clairvoyant(const cr_verify_options& opt, cr_line_fn line,
                       void* ctx) {
    int failures = 0;
    for (int n = 0; n <= 10; ++n) {
        int depth = opt.depth > 0 ? int(opt.depth) : (n <= 4 ? 14 : 10);
        std::int64_t bad = 0;
        for (int a = 0; a <= n; ++a) {
            Position p{a, n};
            mpq_class prophet = clairvoyant_finite(p, depth);
            if (prophet > mpq_class(clairvoyant_upper(p))) ++bad;
        }
        failures += bad != 0 ? 1 : 0;
        emit_line(line, ctx,
                  fmt("clairvoyant flips=%d depth=%d cells=%d breaks=%" PRId64
                      " %s",
                      n, depth, n + 1, bad, bad == 0 ? "ok" : "FAIL"));
    }
    return failures;
}

}  // namespace

extern "C" {

const char* cr_last_error(void) { return g_error.c_str(); }

const char* cr_status_name(cr_status status) {
    switch (status) {
        case CR_OK: return "CR_OK";
        case CR_ERR_ARGUMENT: return "CR_ERR_ARGUMENT";
        case CR_ERR_DOMAIN: return "CR_ERR_DOMAIN";
        case CR_ERR_IO: return "CR_ERR_IO";
        case CR_ERR_FORMAT: return "CR_ERR_FORMAT";
        case CR_ERR_CONFIG_MISMATCH: return "CR_ERR_CONFIG_MISMATCH";
        case CR_ERR_VERIFY: return "CR_ERR_VERIFY";
        case CR_ERR_INTERNAL: return "CR_ERR_INTERNAL";
        default: return "CR_ERR_UNRECOGNIZED";
    }
}

cr_status cr_default_band(int64_t horizon, int64_t* band) {
    if (!band) return fail(CR_ERR_ARGUMENT, "cr_default_band: band is NULL");
    return guarded([&] {
        *band = default_band(horizon);
        return CR_OK;
    });
}

cr_status cr_seed_bounds(int64_t heads, int64_t flips, double* lower,
                         double* upper) {
    if (!lower || !upper)
        return fail(CR_ERR_ARGUMENT, "cr_seed_bounds: output is NULL");
    return guarded([&] {
        Enclosure e = seed_bounds({heads, flips});
        *lower = e.lower;
        *upper = e.upper;
        return CR_OK;
    });
}

cr_status cr_classify(int64_t heads, int64_t flips, double cont_lower,
                      double cont_upper, cr_report* report) {
    if (!report) return fail(CR_ERR_ARGUMENT, "cr_classify: report is NULL");
    return guarded([&] {
        Position p{heads, flips};
        PositionRecord r;
        r.pos = p;
        r.decision = classify(p, {cont_lower, cont_upper});
        double pay_dn = dir_div(double(heads), double(flips), Direction::down);
        double pay_up = dir_div(double(heads), double(flips), Direction::up);
        r.value = {std::max(pay_dn, cont_lower), std::max(pay_up, cont_upper)};
        fill_report(r, report);
        return CR_OK;
    });
}

cr_status cr_format_bound(double value, int round_up, int digits, char* buffer,
                          size_t size) {
    if (!buffer) return fail(CR_ERR_ARGUMENT, "cr_format_bound: buffer is NULL");
    return guarded([&] {
        std::string s = format_bound(
            value, round_up ? Direction::up : Direction::down, digits);
        if (s.size() + 1 > size) {
            g_error = "cr_format_bound: buffer needs " +
                      std::to_string(s.size() + 1) + " bytes";
            return CR_ERR_ARGUMENT;
        }
        std::memcpy(buffer, s.c_str(), s.size() + 1);
        return CR_OK;
    });
}

cr_status cr_solver_create(const cr_config* config, cr_solver** solver) {
    if (!config || !solver)
        return fail(CR_ERR_ARGUMENT, "cr_solver_create: argument is NULL");
    return guarded([&] {
        auto s = std::make_unique<cr_solver>();
        s->cfg = {config->horizon, config->band};
        s->record_limit = config->record_limit;
        s->workers = config->workers <= 0 ? 1 : config->workers;
        s->resume = config->resume != 0;
        if (config->checkpoint_path) s->checkpoint_path = config->checkpoint_path;
        s->checkpoint_every = config->checkpoint_every;
        *solver = s.release();
        return CR_OK;
    });
}

cr_status cr_solver_run(cr_solver* solver, cr_progress_fn progress,
                        void* ctx) {
    if (!solver) return fail(CR_ERR_ARGUMENT, "cr_solver_run: solver is NULL");
    if (solver->ran)
        return fail(CR_ERR_ARGUMENT, "cr_solver_run: solver already ran");
    return guarded([&] {
        SweepOptions opt;
        opt.record_limit = solver->record_limit;
        opt.workers = solver->workers;
        opt.checkpoint_path = solver->checkpoint_path;
        opt.checkpoint_every = solver->checkpoint_every;
        opt.resume = solver->resume;
        if (progress)
            opt.progress = [progress, ctx](SweepProgress p) {
                progress(p.row, p.horizon, ctx);
            };
        solver->result = sweep(solver->cfg, opt);
        solver->ran = true;
        return CR_OK;
    });
}

cr_status cr_solver_query(const cr_solver* solver, int64_t heads,
                          int64_t flips, cr_report* report) {
    if (!solver || !report)
        return fail(CR_ERR_ARGUMENT, "cr_solver_query: argument is NULL");
    if (!solver->ran)
        return fail(CR_ERR_ARGUMENT, "cr_solver_query: solver has not run");
    return guarded([&] {
        const BoxConfig& cfg = solver->result.config;
        bool in_box = flips <= cfg.horizon && heads >= 0 && heads <= flips &&
                      std::llabs(2 * heads - flips) <= cfg.band;
        if (in_box && flips > solver->result.record_limit)
            throw std::domain_error(
                "cr_solver_query: position is inside the box but deeper than "
                "record_limit; rerun with a larger record_limit");
        PositionRecord r = solver->result.query({heads, flips});
        fill_report(r, report);
        return CR_OK;
    });
}

void cr_solver_destroy(cr_solver* solver) { delete solver; }

cr_status cr_table_emit(const cr_solver* solver, int64_t max_flips,
                        int64_t max_difference, cr_table_row_fn emit,
                        void* ctx) {
    if (!solver || !emit)
        return fail(CR_ERR_ARGUMENT, "cr_table_emit: argument is NULL");
    if (!solver->ran)
        return fail(CR_ERR_ARGUMENT, "cr_table_emit: solver has not run");
    return guarded([&] {
        auto rows = build_opening_table(solver->result, max_flips,
                                        max_difference);
        std::vector<int64_t> flat;
        for (const ThresholdRow& row : rows) {
            flat.clear();
            for (const Position& p : row.unresolved) {
                flat.push_back(p.heads);
                flat.push_back(p.flips - p.heads);
            }
            cr_table_row c;
            c.difference = row.difference;
            c.has_last_stop = row.last_stop ? 1 : 0;
            c.has_first_continue = row.first_continue ? 1 : 0;
            c.last_stop_heads = row.last_stop ? row.last_stop->heads : 0;
            c.last_stop_tails =
                row.last_stop ? row.last_stop->flips - row.last_stop->heads : 0;
            c.first_continue_heads =
                row.first_continue ? row.first_continue->heads : 0;
            c.first_continue_tails =
                row.first_continue
                    ? row.first_continue->flips - row.first_continue->heads
                    : 0;
            c.unresolved = flat.empty() ? nullptr : flat.data();
            c.unresolved_count = row.unresolved.size();
            emit(&c, ctx);
        }
        return CR_OK;
    });
}

cr_status cr_monotone_check(const cr_solver* solver, int64_t max_flips,
                            int64_t max_difference, int64_t* violations) {
    if (!solver || !violations)
        return fail(CR_ERR_ARGUMENT, "cr_monotone_check: argument is NULL");
    if (!solver->ran)
        return fail(CR_ERR_ARGUMENT, "cr_monotone_check: solver has not run");
    return guarded([&] {
        *violations = std::int64_t(
            monotone_consistency_check(solver->result, max_flips,
                                       max_difference)
                .size());
        return CR_OK;
    });
}

cr_status cr_verify(const char* suite, const cr_verify_options* options,
                    cr_line_fn line, void* ctx) {
    if (!suite) return fail(CR_ERR_ARGUMENT, "cr_verify: suite is NULL");
    return guarded([&]() -> cr_status {
        cr_verify_options opt = options ? *options : cr_verify_options{};
        int failures = 0;
        if (std::strcmp(suite, "exceedance") == 0)
            failures = verify_exceedance(opt, line, ctx);
        else if (std::strcmp(suite, "oracle") == 0)
            failures = verify_oracle(opt, line, ctx);
        else if (std::strcmp(suite, "clairvoyant") == 0)
            failures = verify_clairvoyant(opt, line, ctx);
        else
            throw std::domain_error(
                "cr_verify: suite must be exceedance, oracle, or clairvoyant");
        if (failures > 0) {
            g_error = "cr_verify: " + std::to_string(failures) +
                      " check(s) failed in suite " + suite;
            return CR_ERR_VERIFY;
        }
        return CR_OK;
    });
}

}
