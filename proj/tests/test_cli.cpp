#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

using bsc::Json;
using bsc::cli::run_cli;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> v;
  std::istringstream is(s);
  for (std::string l; std::getline(is, l);) v.push_back(l);
  return v;
}

std::string embedded_config(const std::string& csv) {
  for (const auto& l : lines(csv)) {
    if (l.rfind("# config: ", 0) == 0) return l.substr(10);
  }
  return "";
}

std::string temp_path(const std::string& name) { return "/tmp/bsc_cli_test_" + name; }

void write(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

// Re-run the config a CSV output embeds and expect identical bytes.
void check_reproducible(const std::string& command, const Result& first) {
  REQUIRE(first.code == 0);
  const std::string path = temp_path(command + ".json");
  write(path, embedded_config(first.out));
  const auto again = run({command, "--config", path});
  CHECK(again.code == 0);
  CHECK(again.out == first.out);
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("analyze sweep") {
    const auto r = run({"analyze", "--sweep", "file_size_N=100:2000:100", "--rho", "0.95", "-x", "40", "--phi", "50"});
    REQUIRE(r.code == 0);
    const auto ls = lines(r.out);
    REQUIRE(ls.size() == 2 + 1 + 20);
    CHECK(ls[0] == "# bsc-toolkit 0.1.0");
    CHECK(ls[2].rfind("N,rho,x,phi,P_starv,P_baseline,E_starv,G_0.5,G_1,tail_mass,P_s0", 0) == 0);
    CHECK(ls[3].rfind("100,0.95,40,50,", 0) == 0);
    CHECK(ls.back().rfind("2000,0.95,40,50,", 0) == 0);
    check_reproducible("analyze", r);
  }

  TEST_CASE("config errors name the field and exit 2") {
    auto r = run({"analyze", "-x", "0"});
    CHECK(r.code == 2);
    CHECK(r.err.find("startup_x") != std::string::npos);
    r = run({"analyze", "--sweep", "bogus=1:2:1"});
    CHECK(r.code == 2);
    r = run({"analyze", "--phi-bound", "sideways"});
    CHECK(r.code == 2);
    CHECK(r.err.find("phi_bound") != std::string::npos);
    r = run({"analyze", "--no-such-flag"});
    CHECK(r.code == 2);
    write(temp_path("unknown.json"), R"({"rho": 0.9, "colour": "red"})");
    r = run({"analyze", "--config", temp_path("unknown.json")});
    CHECK(r.code == 2);
    CHECK(r.err.find("colour") != std::string::npos);
    write(temp_path("wrongcmd.json"), R"({"command": "quality"})");
    CHECK(run({"analyze", "--config", temp_path("wrongcmd.json")}).code == 2);
    CHECK(run({"analyze", "--config", "/nonexistent/x.json"}).code == 2);
  }

  TEST_CASE("flags override the config file") {
    write(temp_path("base.json"), R"({"rho": 0.8, "file_size_N": 300})");
    const auto r = run({"analyze", "--config", temp_path("base.json"), "--rho", "0.9"});
    REQUIRE(r.code == 0);
    CHECK(lines(r.out)[3].rfind("300,0.9,", 0) == 0);
  }

  TEST_CASE("quality") {
    auto r = run({"quality", "-x", "40", "--phi", "50", "--rho", "0.95", "--low-kbps", "1000", "--high-kbps", "2500"});
    REQUIRE(r.code == 0);
    CHECK(lines(r.out)[3].rfind("40,50,0.95,0.95,1,1000,2500,1800,", 0) == 0);
    check_reproducible("quality", r);
    r = run({"quality", "--phi", "1", "--format", "json"});
    REQUIRE(r.code == 0);
    CHECK(Json::parse(r.out)["data"][0]["T_low"] == 0);
    r = run({"quality", "--rho", "1"});
    CHECK(r.code == 3);
  }

  TEST_CASE("simulate is byte-reproducible") {
    const std::vector<std::string> args = {"simulate", "-N", "300", "--runs", "200", "--seed", "5", "--rho", "0.9"};
    const auto a = run(args);
    const auto b = run(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(lines(a.out)[2].find("z_P_starv") != std::string::npos);
    check_reproducible("simulate", a);
  }

  TEST_CASE("simulate with non-Poisson arrivals drops analytic columns") {
    const auto r = run({"simulate", "-N", "200", "--runs", "50", "--arrivals", "on_off", "--with-baseline"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("# note: analytic columns omitted") != std::string::npos);
    CHECK(r.out.find("z_P_starv") == std::string::npos);
    CHECK(r.out.find("nobsc_P_starv_hat") != std::string::npos);
    CHECK(run({"simulate", "--arrivals", "carrier_pigeon"}).code == 2);
  }

  TEST_CASE("simulate writes a trace") {
    const std::string path = temp_path("trace.csv");
    std::remove(path.c_str());
    REQUIRE(run({"simulate", "-N", "120", "--runs", "3", "--trace", path}).code == 0);
    std::ifstream f(path);
    std::string header;
    std::getline(f, header);
    CHECK(header == "time,type,buffer_level,state_n");
  }

  TEST_CASE("compare") {
    auto r = run({"compare", "--throughput", "2200", "-N", "1000"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find(",480p,dash,") != std::string::npos);
    check_reproducible("compare", r);
    r = run({"compare", "--throughput", "3000", "-N", "600", "--format", "json"});
    REQUIRE(r.code == 0);
    bool pair_1080 = false;
    const auto doc = Json::parse(r.out);
    for (const auto& row : doc["data"]) {
      if (row["kind"] == "bsc" && row["config"].get<std::string>().rfind("1080p", 0) == 0) pair_1080 = true;
    }
    CHECK(pair_1080);
    CHECK(run({"compare", "--ladder", ""}).code == 2);
    CHECK(run({"compare", "--throughput", "100"}).code == 2);
  }

  TEST_CASE("oracle") {
    auto r = run({"oracle", "-N", "6", "-x", "2", "--phi", "2", "--rho", "1", "--format", "json"});
    REQUIRE(r.code == 0);
    const auto doc = Json::parse(r.out);
    CHECK(doc["data"]["pmf_sum_exact"] == "1/1");
    std::ifstream f(std::string(BSC_FIXTURE_DIR) + "/oracle_N6_x2_phi2.json");
    std::stringstream fixture;
    fixture << f.rdbuf();
    CHECK(r.out == fixture.str());
    CHECK(run({"oracle", "-N", "20", "-x", "2", "--phi", "2"}).code == 4);
    r = run({"oracle", "-N", "5", "-x", "1", "--phi", "3", "--rho", "1"});
    REQUIRE(r.code == 0);
    CHECK(lines(r.out)[3] == "0,15/32,0.46875");
  }

  TEST_CASE("offset") {
    const auto r = run({"offset", "-N", "300", "-x", "40", "--rho", "0.95", "--threshold", "0.001"});
    REQUIRE(r.code == 0);
    CHECK(lines(r.out)[3].rfind("300,40,0.95,0.001,", 0) == 0);
    check_reproducible("offset", r);
  }

  TEST_CASE("json output embeds config and version") {
    const auto r = run({"analyze", "-N", "200", "--format", "json"});
    REQUIRE(r.code == 0);
    const auto doc = Json::parse(r.out);
    CHECK(doc["version"] == "0.1.0");
    CHECK(doc["config"]["file_size_N"] == 200);
    CHECK(doc["config"]["format"] == "json");
    write(temp_path("from_json.json"), doc["config"].dump());
    CHECK(run({"analyze", "--config", temp_path("from_json.json")}).out == r.out);
  }

  TEST_CASE("help and version") {
    CHECK(run({"--version"}).code == 0);
    CHECK(run({"--help"}).code == 0);
    CHECK(run({}).code == 2);
  }
}
