#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "et14/runner.hpp"
#include "et14/errors.hpp"

using namespace et14;

namespace {

RunConfig small_verify(std::uint64_t seed) {
  RunConfig cfg;
  cfg.command = "verify";
  cfg.seed = seed;
  cfg.samples = 25;
  cfg.families = 3;
  return cfg;
}

}  // namespace

TEST_CASE("identical configurations produce byte-identical summaries") {
  const auto a = run_command(small_verify(9)).summary.to_json().dump(2);
  const auto b = run_command(small_verify(9)).summary.to_json().dump(2);
  CHECK(a == b);
  const auto c = run_command(small_verify(10)).summary.to_json().dump(2);
  CHECK(a != c);
}

TEST_CASE("thread fan-out does not change the report") {
  auto cfg = small_verify(11);
  const auto a = run_command(cfg).summary.to_json().dump(2);
  cfg.threads = 4;
  const auto b = run_command(cfg).summary.to_json().dump(2);
  CHECK(a == b);
}

TEST_CASE("verify rejects an empty sample set") {
  auto cfg = small_verify(1);
  cfg.samples = 0;
  CHECK_THROWS_AS(run_command(cfg), ParseError);
}

TEST_CASE("tampered H0 fails the frame-change check") {
  auto cfg = small_verify(3);
  cfg.tamper_q1 = true;
  const auto r = run_command(cfg);
  CHECK(r.exit_code == 1);
  bool galilean_failed = false;
  for (const auto& c : r.summary.checks)
    if (c.name == "galilean_h" && !c.pass) galilean_failed = true;
  CHECK(galilean_failed);
}

TEST_CASE("reduce validates the state schema") {
  const char* path = "bad_state.json";
  {
    std::ofstream f(path);
    f << R"({"lambda": 0.1, "lambda_i": [0,0,0],
            "lambda_ij": [1,0,0, 0,1,0, 0,0,1],
            "lambda_ill": [0,0,0], "lambda_ppll": 0.5})";
  }
  RunConfig cfg;
  cfg.command = "reduce";
  cfg.state_path = path;
  CHECK_THROWS_AS(run_command(cfg), ParseError);
  std::remove(path);

  RunConfig missing;
  missing.command = "convexity";
  missing.closure_path = "no_such_file.json";
  CHECK_THROWS_AS(run_command(missing), ParseError);
}

TEST_CASE("row export writers") {
  std::vector<StateRow> rows{{0, "check_a", 1.5e-12, "digest0"},
                             {1, "check_b", 2.0, "digest1"}};
  const auto jl = rows_to_jsonl(rows);
  CHECK(jl.find("\"check\":\"check_a\"") != std::string::npos);
  CHECK(std::count(jl.begin(), jl.end(), '\n') == 2);
  const auto csv = rows_to_csv(rows);
  CHECK(csv.rfind("index,check,residual,state\n", 0) == 0);
  CHECK(csv.find("check_b") != std::string::npos);
}

TEST_CASE("subsystem command carries the demo facts") {
  RunConfig cfg;
  cfg.command = "subsystem";
  cfg.seed = 5;
  cfg.samples = 20;
  const auto r = run_command(cfg);
  CHECK(r.exit_code == 0);
  bool saw_demo = false;
  for (const auto& c : r.summary.checks)
    if (c.name == "noncommutativity") {
      saw_demo = true;
      CHECK(c.pass);
      CHECK(c.detail.at("fact_b_residual").at(0).get<double>() == 16.0);
    }
  CHECK(saw_demo);
}

TEST_CASE("scan mode reports a verdict table deterministically") {
  RunConfig cfg;
  cfg.command = "convexity";
  cfg.seed = 21;
  cfg.scan_k_degree = 2;
  cfg.scan_k_count = 10;
  const auto a = run_command(cfg);
  const auto b = run_command(cfg);
  CHECK(a.summary.to_json().dump() == b.summary.to_json().dump());
  CHECK(a.rows.size() == 10);
}
