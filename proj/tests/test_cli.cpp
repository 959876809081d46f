#include <qhm/quantale.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

namespace {

struct cli_result {
    int status;
    std::string out;
};

cli_result run_cli(const std::string& args) {
    std::string cmd = std::string(QHM_CLI_PATH) + " " + args + " 2>&1";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::string out;
    char buf[4096];
    std::size_t k;
    while ((k = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, k);
    int st = pclose(p);
    return {WEXITSTATUS(st), out};
}

std::string data_path(const std::string& name) {
    return std::string(QHM_DATA_DIR) + "/" + name;
}

}  // namespace

TEST_CASE("cli: bd on the fig1 fixture") {
    auto r = run_cli("bd --in " + data_path("fig1_eps_1_10.json"));
    CHECK(r.status == 0);
    auto j = qhm::json::parse(r.out);
    CHECK(j["matrix"][0][3] == "1/10");
    CHECK(j["residual"] == "0");
}

TEST_CASE("cli: gen round-trips through validate and re-parse") {
    std::string tmp = std::string(std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp") +
                      "/qhm_gen_test.json";
    auto g = run_cli("gen --functor dist_maybe --states 4 --seed 12 --out " + tmp);
    REQUIRE(g.status == 0);
    auto v = run_cli("validate --in " + tmp);
    CHECK(v.status == 0);
    // byte-identical reserialization of the generated file
    std::ifstream f(tmp);
    std::string first((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    auto g2 = run_cli("gen --functor dist_maybe --states 4 --seed 12");
    CHECK(g2.out == first);
    std::remove(tmp.c_str());
}

TEST_CASE("cli: deterministic outputs for identical seed and config") {
    for (const std::string cmd :
         {std::string("gen --functor lts --states 6 --seed 5"),
          std::string("check sw --quantale diamond4 --op id --trials 5 --seed 3"),
          std::string("bd --in ") + data_path("fig1_eps_1_4.json"),
          std::string("ld --in ") + data_path("para_example.json") + " --depth 2"}) {
        auto a = run_cli(cmd);
        auto b = run_cli(cmd);
        CHECK(a.status == b.status);
        CHECK(a.out == b.out);
    }
}

TEST_CASE("cli: check commands exit zero on expected verdicts") {
    CHECK(run_cli("check laws --quantale luk01 --grid 1/16").status == 0);
    CHECK(run_cli("check sw --quantale bool2 --op id --trials 10 --seed 7").status == 0);
    auto g = run_cli("gen --functor lts --states 8 --seed 3 --out /tmp/qhm_lts8.json");
    REQUIRE(g.status == 0);
    CHECK(run_cli("check adequacy --in /tmp/qhm_lts8.json --depth 3").status == 0);
    CHECK(run_cli("check invariance --in /tmp/qhm_lts8.json").status == 0);
    std::remove("/tmp/qhm_lts8.json");
}

TEST_CASE("cli: replay re-runs a single trial") {
    auto a = run_cli("check sw --quantale diamond4 --op cinfsup --replay 42");
    CHECK(a.status == 0);
    auto j = qhm::json::parse(a.out);
    CHECK(j["report"]["trials"].get<int>() >= 1);
}

TEST_CASE("cli: csv output and file output") {
    auto r = run_cli("bd --in " + data_path("fig1_eps_1_10.json") + " --format csv");
    CHECK(r.status == 0);
    CHECK(r.out.find("state,rootL") == 0);
    CHECK(r.out.find("1/10") != std::string::npos);
}

TEST_CASE("cli: distinguish emits formula and gap") {
    auto r = run_cli("distinguish --in " + data_path("fig1_eps_1_4.json") +
                     " --x rootL --y rootR --budget 2000");
    CHECK(r.status == 0);
    auto j = qhm::json::parse(r.out);
    CHECK(j["gap"] == "1/4");
}

TEST_CASE("cli: errors are machine-readable JSON with nonzero exit") {
    auto r = run_cli("bd --in /nonexistent.json");
    CHECK(r.status == 2);
    auto j = qhm::json::parse(r.out);
    CHECK(j.contains("error"));

    auto u = run_cli("check sw --quantale nonsense --op id");
    CHECK(u.status == 2);
}
