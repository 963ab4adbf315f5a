#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cinttypes>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "chowrobbins.h"

namespace {

using ordered_json = nlohmann::ordered_json;

struct BoxFlags {
    std::int64_t horizon = 0;
    std::int64_t band = 0;
    std::int64_t record_limit = -1;
    int workers = 1;
    std::string checkpoint_path;
    std::int64_t checkpoint_every = 0;
    bool resume = false;
    bool progress = false;
};

void add_box_flags(CLI::App* cmd, BoxFlags& f) {
    cmd->add_option("--horizon", f.horizon, "Truncation depth in flips")
        ->required();
    cmd->add_option("--band", f.band,
                    "Half-width of the |heads-tails| band (0 = automatic)");
    cmd->add_option("--workers", f.workers, "Worker threads for the sweep")
        ->default_val(1);
    cmd->add_option("--checkpoint-path", f.checkpoint_path,
                    "File for row snapshots");
    cmd->add_option("--checkpoint-every", f.checkpoint_every,
                    "Snapshot cadence in rows (0 = never)");
    cmd->add_flag("--resume", f.resume,
                  "Resume the sweep from --checkpoint-path");
    cmd->add_flag("--progress", f.progress, "Report sweep progress on stderr");
}

cr_config make_config(const BoxFlags& f, std::int64_t record_limit) {
    cr_config c;
    c.horizon = f.horizon;
    c.band = f.band;
    c.record_limit = record_limit;
    c.workers = f.workers;
    c.resume = f.resume ? 1 : 0;
    c.checkpoint_path =
        f.checkpoint_path.empty() ? nullptr : f.checkpoint_path.c_str();
    c.checkpoint_every = f.checkpoint_every;
    return c;
}

void progress_to_stderr(int64_t row, int64_t horizon, void*) {
    std::fprintf(stderr, "row %" PRId64 "/%" PRId64 "\n", row, horizon);
}

int exit_for(cr_status s) {
    if (s == CR_OK) return 0;
    if (s == CR_ERR_VERIFY) return 1;
    return 2;
}

int report_error(cr_status s) {
    std::fprintf(stderr, "error: %s (%s)\n", cr_last_error(),
                 cr_status_name(s));
    return exit_for(s);
}

bool parse_int(std::string_view s, std::int64_t* out) {
    const char* b = s.data();
    const char* e = b + s.size();
    auto [p, ec] = std::from_chars(b, e, *out);
    return ec == std::errc() && p == e;
}

// Accepts "heads-tails" (16-12) or "heads,flips" (16,28).
bool parse_position(const std::string& s, std::int64_t* heads,
                    std::int64_t* flips) {
    size_t comma = s.find(',');
    size_t dash = s.find('-');
    std::int64_t x = 0, y = 0;
    if (comma != std::string::npos) {
        if (!parse_int(std::string_view(s).substr(0, comma), &x) ||
            !parse_int(std::string_view(s).substr(comma + 1), &y))
            return false;
        *heads = x;
        *flips = y;
    } else if (dash != std::string::npos) {
        if (!parse_int(std::string_view(s).substr(0, dash), &x) ||
            !parse_int(std::string_view(s).substr(dash + 1), &y))
            return false;
        *heads = x;
        *flips = x + y;
    } else {
        return false;
    }
    return *heads >= 0 && *flips >= *heads;
}

std::string bound_str(double v, bool up) {
    char buf[80];
    if (cr_format_bound(v, up ? 1 : 0, 14, buf, sizeof buf) != CR_OK)
        return "?";
    return buf;
}

const char* decision_str(cr_decision d) {
    switch (d) {
        case CR_DECISION_STOP: return "STOP";
        case CR_DECISION_CONTINUE: return "CONTINUE";
        default: return "UNKNOWN";
    }
}

int write_output(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::fputs(text.c_str(), stdout);
        return 0;
    }
    std::ofstream out(path, std::ios::binary);
    out << text;
    out.close();
    if (!out) {
        std::fprintf(stderr, "error: cannot write %s\n", path.c_str());
        return 2;
    }
    return 0;
}

std::string fmt(const char* pattern, ...) {
    va_list args;
    va_start(args, pattern);
    char buf[512];
    std::vsnprintf(buf, sizeof buf, pattern, args);
    va_end(args);
    return buf;
}

struct RunState {
    cr_solver* solver = nullptr;
    std::int64_t band = 0;

    ~RunState() { cr_solver_destroy(solver); }
};

cr_status run_sweep(const BoxFlags& flags, std::int64_t record_limit,
                    RunState* st) {
    st->band = flags.band;
    if (st->band == 0) {
        cr_status s = cr_default_band(flags.horizon, &st->band);
        if (s != CR_OK) return s;
    }
    BoxFlags resolved = flags;
    resolved.band = st->band;
    cr_config cfg = make_config(resolved, record_limit);
    cr_status s = cr_solver_create(&cfg, &st->solver);
    if (s != CR_OK) return s;
    return cr_solver_run(st->solver,
                         flags.progress ? progress_to_stderr : nullptr,
                         nullptr);
}

// ---- solve ----

int cmd_solve(const BoxFlags& flags, std::vector<std::string> position_args,
              const std::string& positions_file, const std::string& format,
              const std::string& output_path) {
    std::vector<std::pair<std::int64_t, std::int64_t>> positions;
    for (const std::string& s : position_args) {
        std::int64_t h = 0, f = 0;
        if (!parse_position(s, &h, &f)) {
            std::fprintf(stderr,
                         "error: bad position '%s' (use heads-tails or "
                         "heads,flips)\n",
                         s.c_str());
            return 2;
        }
        positions.emplace_back(h, f);
    }
    if (!positions_file.empty()) {
        std::ifstream in(positions_file);
        if (!in) {
            std::fprintf(stderr, "error: cannot read %s\n",
                         positions_file.c_str());
            return 2;
        }
        std::string line;
        for (std::int64_t lineno = 1; std::getline(in, line); ++lineno) {
            size_t a = line.find_first_not_of(" \t\r");
            if (a == std::string::npos || line[a] == '#') continue;
            size_t b = line.find_last_not_of(" \t\r");
            std::string token = line.substr(a, b - a + 1);
            std::int64_t h = 0, f = 0;
            if (!parse_position(token, &h, &f)) {
                std::fprintf(stderr,
                             "error: %s:%" PRId64 ": bad position '%s' (use "
                             "heads-tails or heads,flips)\n",
                             positions_file.c_str(), lineno, token.c_str());
                return 2;
            }
            positions.emplace_back(h, f);
        }
    }
    if (positions.empty()) {
        std::fprintf(stderr, "error: no positions given\n");
        return 2;
    }

    std::int64_t band = flags.band;
    if (band == 0) {
        cr_status s = cr_default_band(flags.horizon, &band);
        if (s != CR_OK) return report_error(s);
    }
    std::int64_t record_limit = flags.record_limit;
    if (record_limit < 0) {
        record_limit = 0;
        for (auto [h, f] : positions) {
            std::int64_t d = 2 * h - f;
            if (f <= flags.horizon && (d < 0 ? -d : d) <= band &&
                f > record_limit)
                record_limit = f;
        }
    }

    RunState st;
    cr_status s = run_sweep(flags, record_limit, &st);
    if (s != CR_OK) return report_error(s);

    std::vector<cr_report> reports;
    for (auto [h, f] : positions) {
        cr_report rep;
        s = cr_solver_query(st.solver, h, f, &rep);
        if (s != CR_OK) return report_error(s);
        reports.push_back(rep);
    }

    std::string out;
    if (format == "text") {
        for (const cr_report& r : reports) {
            out += fmt("position %" PRId64 "-%" PRId64 " (flips=%" PRId64
                       ")\n",
                       r.heads, r.flips - r.heads, r.flips);
            out += fmt("  decision  %s\n", decision_str(r.decision));
            out += "  value     [" + bound_str(r.value_lower, false) + ", " +
                   bound_str(r.value_upper, true) + "]\n";
            out += "  continue  [" + bound_str(r.cont_lower, false) + ", " +
                   bound_str(r.cont_upper, true) + "]\n";
            if (r.payoff_den > 0)
                out += fmt("  payoff    %" PRId64 "/%" PRId64 "\n",
                           r.payoff_num, r.payoff_den);
            out += fmt("  source    %s\n",
                       r.seed_only ? "closed-form seeds" : "induction");
            out += "\n";
        }
    } else if (format == "csv") {
        out =
            "heads,tails,flips,decision,value_lower,value_upper,cont_lower,"
            "cont_upper,payoff_num,payoff_den,seed_only\n";
        for (const cr_report& r : reports) {
            out += fmt("%" PRId64 ",%" PRId64 ",%" PRId64 ",%s,", r.heads,
                       r.flips - r.heads, r.flips, decision_str(r.decision));
            out += bound_str(r.value_lower, false) + "," +
                   bound_str(r.value_upper, true) + "," +
                   bound_str(r.cont_lower, false) + "," +
                   bound_str(r.cont_upper, true) + ",";
            out += fmt("%" PRId64 ",%" PRId64 ",%d\n", r.payoff_num,
                       r.payoff_den, r.seed_only ? 1 : 0);
        }
    } else {
        ordered_json doc;
        doc["horizon"] = flags.horizon;
        doc["band"] = st.band;
        doc["record_limit"] = record_limit;
        doc["positions"] = ordered_json::array();
        for (const cr_report& r : reports) {
            ordered_json p;
            p["heads"] = r.heads;
            p["tails"] = r.flips - r.heads;
            p["flips"] = r.flips;
            p["decision"] = decision_str(r.decision);
            p["value"] = {bound_str(r.value_lower, false),
                          bound_str(r.value_upper, true)};
            p["continuation"] = {bound_str(r.cont_lower, false),
                                 bound_str(r.cont_upper, true)};
            if (r.payoff_den > 0)
                p["payoff"] = {{"num", r.payoff_num}, {"den", r.payoff_den}};
            else
                p["payoff"] = nullptr;
            p["seed_only"] = r.seed_only != 0;
            doc["positions"].push_back(std::move(p));
        }
        out = doc.dump(2) + "\n";
    }
    return write_output(out, output_path);
}

// ---- table ----

struct TableRows {
    struct Row {
        std::int64_t difference = 0;
        bool has_last_stop = false, has_first_continue = false;
        std::int64_t ls_h = 0, ls_t = 0, fc_h = 0, fc_t = 0;
        std::vector<std::pair<std::int64_t, std::int64_t>> unresolved;
    };
    std::vector<Row> rows;
};

void collect_table_row(const cr_table_row* row, void* ctx) {
    auto* t = static_cast<TableRows*>(ctx);
    TableRows::Row r;
    r.difference = row->difference;
    r.has_last_stop = row->has_last_stop != 0;
    r.has_first_continue = row->has_first_continue != 0;
    r.ls_h = row->last_stop_heads;
    r.ls_t = row->last_stop_tails;
    r.fc_h = row->first_continue_heads;
    r.fc_t = row->first_continue_tails;
    for (size_t i = 0; i < row->unresolved_count; ++i)
        r.unresolved.emplace_back(row->unresolved[2 * i],
                                  row->unresolved[2 * i + 1]);
    t->rows.push_back(std::move(r));
}

int cmd_table(const BoxFlags& flags, std::int64_t max_flips,
              std::int64_t max_difference, const std::string& format,
              const std::string& output_path) {
    std::int64_t record_limit = flags.record_limit;
    if (record_limit < 0)
        record_limit = std::min(flags.horizon, max_flips);

    RunState st;
    cr_status s = run_sweep(flags, record_limit, &st);
    if (s != CR_OK) return report_error(s);

    TableRows table;
    s = cr_table_emit(st.solver, max_flips, max_difference, collect_table_row,
                      &table);
    if (s != CR_OK) return report_error(s);

    std::int64_t violations = 0;
    s = cr_monotone_check(st.solver, max_flips, max_difference, &violations);
    if (s != CR_OK) return report_error(s);
    if (violations != 0) {
        std::fprintf(stderr,
                     "error: %" PRId64
                     " decisions break stop-region monotonicity\n",
                     violations);
        return 1;
    }

    auto pair_str = [](std::int64_t h, std::int64_t t) {
        return fmt("%" PRId64 "-%" PRId64, h, t);
    };

    std::string out;
    if (format == "text") {
        out += fmt("%-6s %-12s %-16s %s\n", "diff", "last_stop",
                   "first_continue", "unresolved");
        for (const auto& r : table.rows) {
            std::string ls =
                r.has_last_stop ? pair_str(r.ls_h, r.ls_t) : "-";
            std::string fc =
                r.has_first_continue ? pair_str(r.fc_h, r.fc_t) : "-";
            std::string un;
            for (const auto& [h, t] : r.unresolved) {
                if (!un.empty()) un += " ";
                un += pair_str(h, t);
            }
            if (un.empty()) un = "-";
            out += fmt("%-6" PRId64 " %-12s %-16s %s\n", r.difference,
                       ls.c_str(), fc.c_str(), un.c_str());
        }
    } else if (format == "csv") {
        out =
            "difference,last_stop_heads,last_stop_tails,first_continue_heads,"
            "first_continue_tails,unresolved\n";
        for (const auto& r : table.rows) {
            out += fmt("%" PRId64 ",", r.difference);
            if (r.has_last_stop)
                out += fmt("%" PRId64 ",%" PRId64 ",", r.ls_h, r.ls_t);
            else
                out += ",,";
            if (r.has_first_continue)
                out += fmt("%" PRId64 ",%" PRId64 ",", r.fc_h, r.fc_t);
            else
                out += ",,";
            std::string un;
            for (const auto& [h, t] : r.unresolved) {
                if (!un.empty()) un += ";";
                un += pair_str(h, t);
            }
            out += un + "\n";
        }
    } else {
        ordered_json doc;
        doc["horizon"] = flags.horizon;
        doc["band"] = st.band;
        doc["max_flips"] = max_flips;
        doc["max_difference"] = max_difference;
        doc["rows"] = ordered_json::array();
        for (const auto& r : table.rows) {
            ordered_json row;
            row["difference"] = r.difference;
            if (r.has_last_stop)
                row["last_stop"] = {{"heads", r.ls_h}, {"tails", r.ls_t}};
            else
                row["last_stop"] = nullptr;
            if (r.has_first_continue)
                row["first_continue"] = {{"heads", r.fc_h},
                                         {"tails", r.fc_t}};
            else
                row["first_continue"] = nullptr;
            row["unresolved"] = ordered_json::array();
            for (const auto& [h, t] : r.unresolved)
                row["unresolved"].push_back({{"heads", h}, {"tails", t}});
            doc["rows"].push_back(std::move(row));
        }
        out = doc.dump(2) + "\n";
    }
    return write_output(out, output_path);
}

// ---- root ----

int cmd_root(const BoxFlags& flags, const std::string& format,
             const std::string& output_path) {
    RunState st;
    cr_status s = run_sweep(flags, 0, &st);
    if (s != CR_OK) return report_error(s);

    cr_report rep;
    s = cr_solver_query(st.solver, 0, 0, &rep);
    if (s != CR_OK) return report_error(s);

    double width = rep.value_upper - rep.value_lower;
    std::string out;
    if (format == "text") {
        out += fmt("horizon   %" PRId64 "\n", flags.horizon);
        out += fmt("band      %" PRId64 "\n", st.band);
        out += fmt("decision  %s\n", decision_str(rep.decision));
        out += "value     [" + bound_str(rep.value_lower, false) + ", " +
               bound_str(rep.value_upper, true) + "]\n";
        out += fmt("width     %.3e\n", width);
    } else if (format == "csv") {
        out = "horizon,band,decision,value_lower,value_upper,width\n";
        out += fmt("%" PRId64 ",%" PRId64 ",%s,", flags.horizon, st.band,
                   decision_str(rep.decision));
        out += bound_str(rep.value_lower, false) + "," +
               bound_str(rep.value_upper, true) + "," + fmt("%.3e\n", width);
    } else {
        ordered_json doc;
        doc["horizon"] = flags.horizon;
        doc["band"] = st.band;
        doc["decision"] = decision_str(rep.decision);
        doc["value"] = {bound_str(rep.value_lower, false),
                        bound_str(rep.value_upper, true)};
        doc["width"] = fmt("%.3e", width);
        out = doc.dump(2) + "\n";
    }
    return write_output(out, output_path);
}

// ---- verify ----

void verify_line(const char* line, void* ctx) {
    *static_cast<std::string*>(ctx) += line;
    *static_cast<std::string*>(ctx) += "\n";
}

int cmd_verify(std::vector<std::string> suites, const cr_verify_options& opt,
               const std::string& output_path) {
    if (suites.empty()) suites = {"exceedance", "oracle", "clairvoyant"};
    std::string out;
    bool verify_failed = false;
    for (const std::string& suite : suites) {
        cr_status s = cr_verify(suite.c_str(), &opt, verify_line, &out);
        if (s == CR_OK) {
            out += "suite " + suite + ": ok\n";
        } else if (s == CR_ERR_VERIFY) {
            out += "suite " + suite + ": FAILED (" + cr_last_error() + ")\n";
            verify_failed = true;
        } else {
            return report_error(s);
        }
    }
    int rc = write_output(out, output_path);
    if (rc != 0) return rc;
    return verify_failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Certified enclosures and stopping decisions for the heads-fraction "
        "coin game"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "1.0.0");

    std::string format = "text";
    std::string output_path;
    auto add_output_flags = [&](CLI::App* cmd) {
        cmd->add_option("--format", format, "Output format")
            ->check(CLI::IsMember({"text", "csv", "json"}));
        cmd->add_option("--output", output_path,
                        "Write the report to a file instead of stdout");
    };

    BoxFlags flags;

    CLI::App* solve = app.add_subcommand(
        "solve", "Classify positions and report their value enclosures");
    add_box_flags(solve, flags);
    add_output_flags(solve);
    std::vector<std::string> position_args;
    std::string positions_file;
    solve->add_option("--positions", position_args,
                      "Positions as heads-tails or heads,flips");
    solve->add_option("position", position_args,
                      "Positions as heads-tails or heads,flips");
    solve->add_option("--positions-file", positions_file,
                      "File with one position per line (# comments)");
    solve->add_option("--record-limit", flags.record_limit,
                      "Keep rows up to this depth (default: deepest query)");

    CLI::App* table = app.add_subcommand(
        "table", "Stop/continue thresholds by heads-minus-tails difference");
    add_box_flags(table, flags);
    add_output_flags(table);
    std::int64_t max_flips = 1000, max_difference = 26;
    table->add_option("--max-flips", max_flips,
                      "Scan positions up to this many flips");
    table->add_option("--max-difference", max_difference,
                      "Largest heads-minus-tails difference to report");
    table->add_option("--record-limit", flags.record_limit,
                      "Keep rows up to this depth (default: --max-flips)");

    CLI::App* root = app.add_subcommand(
        "root", "Enclosure of the game value before the first flip");
    add_box_flags(root, flags);
    add_output_flags(root);

    CLI::App* verify = app.add_subcommand(
        "verify", "Self-checks of the bounds against independent oracles");
    std::vector<std::string> suites;
    cr_verify_options verify_opt{};
    verify_opt.seed = 1;
    verify->add_option("--suite", suites,
                       "exceedance, oracle, or clairvoyant (default: all)");
    verify->add_option("--seed", verify_opt.seed,
                       "Random seed for simulations");
    verify->add_option("--trials", verify_opt.trials,
                       "Simulation trials per check (0 = default)");
    verify->add_option("--cap", verify_opt.cap,
                       "Simulated path length cap in flips (0 = default)");
    verify->add_option("--depth", verify_opt.depth,
                       "Lookahead / exact-exploration depth (0 = default)");
    verify->add_option("--horizon", verify_opt.horizon,
                       "Exact-induction box depth for the oracle suite");
    verify->add_option("--output", output_path,
                       "Write the report to a file instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (solve->parsed())
        return cmd_solve(flags, position_args, positions_file, format,
                         output_path);
    if (table->parsed())
        return cmd_table(flags, max_flips, max_difference, format,
                         output_path);
    if (root->parsed()) return cmd_root(flags, format, output_path);
    return cmd_verify(suites, verify_opt, output_path);
}
