#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run(const std::string& args, bool merge_stderr = false) {
    std::string cmd = std::string(CLI_BIN) + " " + args +
                      (merge_stderr ? " 2>&1" : " 2>/dev/null");
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    char buf[4096];
    size_t got;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0)
        r.output.append(buf, got);
    int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::vector<std::string> lines_of(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string line;
    while (std::getline(in, line)) out.push_back(line);
    return out;
}

std::string temp_path(const char* stem) {
    return std::string(std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp") +
           "/" + stem + "." + std::to_string(getpid());
}

}  // namespace

TEST_CASE("solve accepts both position syntaxes and reports decisions") {
    RunResult r = run(
        "solve --horizon 1000 --positions 3-2 3,5 1,1 2,3 --format csv");
    REQUIRE(r.exit_code == 0);
    auto lines = lines_of(r.output);
    REQUIRE(lines.size() == 5);
    CHECK(lines[0] ==
          "heads,tails,flips,decision,value_lower,value_upper,cont_lower,"
          "cont_upper,payoff_num,payoff_den,seed_only");
    CHECK(lines[1] == lines[2]);
    CHECK(lines[1].substr(0, 6) == "3,2,5,");
    CHECK(lines[3].find("1,0,1,STOP") == 0);
    CHECK(lines[4].find("2,1,3,CONTINUE") == 0);
}

TEST_CASE("solve text output carries enclosures and sources") {
    RunResult r = run("solve --horizon 1000 --positions 500,1000 0,0");
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.find("position 500-500 (flips=1000)") != std::string::npos);
    CHECK(r.output.find("position 0-0 (flips=0)") != std::string::npos);
    CHECK(r.output.find("decision  CONTINUE") != std::string::npos);
    CHECK(r.output.find("value     [0.") != std::string::npos);
    CHECK(r.output.find("source    closed-form seeds") != std::string::npos);
    CHECK(r.output.find("source    induction") != std::string::npos);

    RunResult deep = run("solve --horizon 2000 --positions 40,40 --format json");
    REQUIRE(deep.exit_code == 0);
    CHECK(deep.output.find("\"decision\": \"STOP\"") != std::string::npos);
    CHECK(deep.output.find("\"seed_only\": false") != std::string::npos);
}

TEST_CASE("positions file feeds solve") {
    std::string path = temp_path("cli_positions");
    {
        std::ofstream f(path);
        f << "# opening cells\n";
        f << "1-0\n";
        f << "\n";
        f << "  2,3  \n";
    }
    RunResult r = run("solve --horizon 1000 --positions-file " + path +
                      " --format csv");
    std::remove(path.c_str());
    REQUIRE(r.exit_code == 0);
    auto lines = lines_of(r.output);
    REQUIRE(lines.size() == 3);
    CHECK(lines[1].find("1,0,1,STOP") == 0);
    CHECK(lines[2].find("2,1,3,CONTINUE") == 0);

    RunResult missing = run("solve --horizon 1000 --positions-file /nonexistent");
    CHECK(missing.exit_code == 2);

    std::string bad_path = temp_path("cli_bad_positions");
    {
        std::ofstream f(bad_path);
        f << "1-0\n# fine so far\nwhat\n";
    }
    RunResult bad = run("solve --horizon 1000 --positions-file " + bad_path,
                        true);
    std::remove(bad_path.c_str());
    CHECK(bad.exit_code == 2);
    CHECK(bad.output.find(":3: bad position 'what'") != std::string::npos);
}

TEST_CASE("table reports thresholds in all formats") {
    RunResult text = run("table --horizon 2000 --max-difference 4");
    REQUIRE(text.exit_code == 0);
    auto lines = lines_of(text.output);
    REQUIRE(lines.size() == 5);
    CHECK(lines[0].find("diff") == 0);
    CHECK(lines[1].find("1") == 0);
    CHECK(lines[1].find("1-0") != std::string::npos);
    CHECK(lines[1].find("2-1") != std::string::npos);
    CHECK(lines[2].find("5-3") != std::string::npos);
    CHECK(lines[2].find("6-4") != std::string::npos);

    RunResult csv = run("table --horizon 2000 --max-difference 4 --format csv");
    REQUIRE(csv.exit_code == 0);
    auto csv_lines = lines_of(csv.output);
    REQUIRE(csv_lines.size() == 5);
    CHECK(csv_lines[0] ==
          "difference,last_stop_heads,last_stop_tails,first_continue_heads,"
          "first_continue_tails,unresolved");
    CHECK(csv_lines[1].find("1,1,0,2,1") == 0);
    CHECK(csv_lines[2].find("2,5,3,6,4") == 0);

    RunResult js = run("table --horizon 2000 --max-difference 4 --format json");
    REQUIRE(js.exit_code == 0);
    CHECK(js.output.find("\"difference\": 1") != std::string::npos);
    CHECK(js.output.find("\"last_stop\"") != std::string::npos);
    CHECK(js.output.find("\"first_continue\"") != std::string::npos);
    CHECK(js.output.find("\"unresolved\"") != std::string::npos);
}

TEST_CASE("root prints the game value enclosure") {
    RunResult r = run("root --horizon 1000");
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.find("horizon   1000") != std::string::npos);
    CHECK(r.output.find("band      35") != std::string::npos);
    CHECK(r.output.find("decision  CONTINUE") != std::string::npos);
    CHECK(r.output.find("value     [0.79") != std::string::npos);
    CHECK(r.output.find("width     ") != std::string::npos);

    RunResult csv = run("root --horizon 1000 --format csv");
    REQUIRE(csv.exit_code == 0);
    auto lines = lines_of(csv.output);
    REQUIRE(lines.size() == 2);
    CHECK(lines[0] == "horizon,band,decision,value_lower,value_upper,width");
    CHECK(lines[1].find("1000,35,CONTINUE,0.79") == 0);
}

TEST_CASE("verify runs suites and exits zero on success") {
    RunResult r = run("verify --suite oracle --suite clairvoyant");
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.find("suite oracle: ok") != std::string::npos);
    CHECK(r.output.find("suite clairvoyant: ok") != std::string::npos);
    CHECK(r.output.find("FAIL") == std::string::npos);

    RunResult mc = run("verify --suite exceedance --trials 2000 --seed 7 "
                       "--cap 512 --depth 12");
    REQUIRE(mc.exit_code == 0);
    CHECK(mc.output.find("suite exceedance: ok") != std::string::npos);

    RunResult shallow = run("verify --suite clairvoyant --depth 6");
    REQUIRE(shallow.exit_code == 0);
    CHECK(shallow.output.find("depth=6") != std::string::npos);
    CHECK(shallow.output.find("suite clairvoyant: ok") != std::string::npos);

    RunResult boxed = run("verify --suite oracle --horizon 200");
    REQUIRE(boxed.exit_code == 0);
    CHECK(boxed.output.find("box=200x15") != std::string::npos);
    CHECK(boxed.output.find("suite oracle: ok") != std::string::npos);

    RunResult bad = run("verify --suite parity");
    CHECK(bad.exit_code == 2);
    RunResult deep = run("verify --suite clairvoyant --depth 99");
    CHECK(deep.exit_code == 2);
}

TEST_CASE("usage errors exit with code 2") {
    CHECK(run("").exit_code == 2);
    CHECK(run("solve --positions 1-1").exit_code == 2);
    CHECK(run("solve --horizon 1000").exit_code == 2);
    CHECK(run("solve --horizon 1000 --positions nonsense").exit_code == 2);
    CHECK(run("solve --horizon 1000 --positions 5,4").exit_code == 2);
    CHECK(run("solve --horizon 1000 --positions 1-1 --format yaml").exit_code ==
          2);
    CHECK(run("solve --horizon -7 --positions 1-1").exit_code == 2);
    CHECK(run("frobnicate").exit_code == 2);
}

TEST_CASE("output files match stdout byte for byte") {
    std::string args = "solve --horizon 5000 --positions 16-12 40-30 7,20 "
                       "--format json";
    RunResult first = run(args);
    RunResult second = run(args);
    REQUIRE(first.exit_code == 0);
    CHECK(first.output == second.output);

    std::string path = temp_path("cli_out");
    RunResult filed = run(args + " --output " + path);
    REQUIRE(filed.exit_code == 0);
    CHECK(filed.output.empty());
    std::ifstream in(path, std::ios::binary);
    std::stringstream body;
    body << in.rdbuf();
    std::remove(path.c_str());
    CHECK(body.str() == first.output);
}

TEST_CASE("progress ticks go to stderr only") {
    std::string args = "solve --horizon 70000 --band 10 --positions 0,0 "
                       "--progress";
    RunResult quiet = run(args);
    REQUIRE(quiet.exit_code == 0);
    CHECK(quiet.output.find("row ") == std::string::npos);

    RunResult merged = run(args, true);
    REQUIRE(merged.exit_code == 0);
    CHECK(merged.output.find("row 65536/70000") != std::string::npos);
}
