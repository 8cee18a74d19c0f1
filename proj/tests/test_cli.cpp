#include "doctest.h"

#include "oracles.hpp"
#include "sipl/cli.hpp"

#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "sipl");
    std::ostringstream out, err;
    const int code = sipl::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

TEST_CASE("cli end to end") {
    oracle::TempDir dir("cli");
    const auto p = [&](const std::string& name) { return (dir.path() / name).string(); };

    auto r = run({"gen-tasks", "--n", "4", "--count", "3", "--seed", "8", "--out", p("tasks"), "--json-out",
                  p("index.json")});
    REQUIRE(r.code == 0);
    CHECK(fs::exists(p("tasks/000.json")));
    CHECK(fs::exists(p("tasks/002.json")));
    CHECK(nlohmann::json::parse(slurp(p("index.json"))).at("tasks").size() == 3);

    r = run({"check", "--task", p("tasks/000.json"), "--json-out", p("check.json")});
    CHECK(r.code == 0);
    CHECK(nlohmann::json::parse(slurp(p("check.json"))).at("valid") == true);

    r = run({"solve", "--task", p("tasks/001.json"), "--out", p("policy.bin"), "--json-out", p("solve.json")});
    CHECK(r.code == 0);
    CHECK(fs::exists(p("policy.bin")));
    const auto solve = nlohmann::json::parse(slurp(p("solve.json")));
    CHECK(solve.at("horizon") == 8);
    CHECK(solve.at("level") == 1);

    r = run({"solve", "--task", p("tasks/001.json"), "--level", "2", "--horizon", "3", "--out", p("p2.bin")});
    CHECK(r.code == 0);
    CHECK(r.out.find("level 2, horizon 3") != std::string::npos);

    r = run({"simulate", "--task", p("tasks/000.json"), "--seed", "4", "--json-out", p("sim1.json")});
    CHECK(r.code == 0);
    CHECK(r.out.find("t=0 ") != std::string::npos);
    run({"simulate", "--task", p("tasks/000.json"), "--seed", "4", "--json-out", p("sim2.json")});
    CHECK(slurp(p("sim1.json")) == slurp(p("sim2.json")));
    r = run({"simulate", "--task", p("tasks/000.json"), "--policy", "random", "--max-steps", "2"});
    CHECK(r.code == 0);

    r = run({"evaluate", "--tasks", p("tasks"), "--policy", "random", "--episodes", "3", "--seed", "1", "--json-out",
             p("eval1.json")});
    CHECK(r.code == 0);
    CHECK(r.out.find("policy random") != std::string::npos);
    run({"evaluate", "--tasks", p("tasks"), "--policy", "random", "--episodes", "3", "--seed", "1", "--json-out",
         p("eval2.json")});
    CHECK(slurp(p("eval1.json")) == slurp(p("eval2.json")));
    CHECK(nlohmann::json::parse(slurp(p("eval1.json"))).at("episodes") == 9);

    r = run({"gen-dataset", "--tasks", p("tasks"), "--episodes-per-task", "2", "--seed", "5", "--out", p("ds"),
             "--split", "0.34,0.33,0.33"});
    CHECK(r.code == 0);
    CHECK(fs::exists(p("ds/manifest.json")));
    CHECK(nlohmann::json::parse(slurp(p("ds/manifest.json"))).at("records") == 6);

    r = run({"gen-dataset", "--tasks", p("tasks"), "--episodes-per-task", "2", "--seed", "5", "--out", p("ds2"),
             "--split", "0.5,0.5"});
    CHECK(r.code == 1);
    CHECK(!fs::exists(p("ds2")));
}

TEST_CASE("cli errors and help") {
    oracle::TempDir dir("cli_err");
    auto r = run({"--help"});
    CHECK(r.code == 0);
    for (const char* cmd : {"gen-tasks", "solve", "simulate", "gen-dataset", "evaluate", "check"})
        CHECK(r.out.find(cmd) != std::string::npos);

    r = run({"gen-tasks", "--help"});
    CHECK(r.code == 0);
    for (const char* flag : {"--n", "--count", "--obstacle-density", "--seed", "--out", "--json-out"})
        CHECK(r.out.find(flag) != std::string::npos);
    r = run({"gen-dataset", "--help"});
    for (const char* flag : {"--tasks", "--episodes-per-task", "--split"}) CHECK(r.out.find(flag) != std::string::npos);

    CHECK(run({}).code == 1);
    CHECK(run({"frobnicate"}).code == 1);
    CHECK(run({"gen-tasks", "--n", "4", "--count", "1", "--seed", "1", "--out", "x", "--bogus"}).code == 1);
    CHECK(run({"gen-tasks", "--n", "4", "--count", "1", "--seed", "1"}).code == 1);
    CHECK(run({"gen-tasks", "--n", "4", "--count", "1", "--seed", "1", "--out", "x", "--obstacle-density", "0.9"})
              .code == 1);

    const auto bad = dir.path() / "bad.json";
    std::ofstream(bad) << "{\"n\": 4";
    r = run({"check", "--task", bad.string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("error") != std::string::npos);
    std::ofstream(bad) << "{\"n\": 4, \"colour\": 1}";
    CHECK(run({"solve", "--task", bad.string(), "--out", (dir.path() / "p.bin").string()}).code == 2);
    CHECK(run({"simulate", "--task", (dir.path() / "missing.json").string()}).code == 1);
}
