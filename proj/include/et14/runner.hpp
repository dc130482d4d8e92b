#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "et14/report.hpp"

namespace et14 {

/// Everything a command run depends on; (command, seed, flags) fully
/// determine every output byte.
struct RunConfig {
  std::string command;  // verify | convexity | reduce | subsystem
  std::uint64_t seed = 1;
  int samples = 200;
  std::string form = "x";  // x | eta | sub5
  std::string closure_path;
  std::string state_path;
  std::string out_path;
  std::string rows_path;
  std::string format = "json";  // json | csv
  double tol_identity = 1e-9;
  double tol_fd = 1e-5;
  double tol_negative = 1e-3;
  int threads = 1;
  int families = 10;
  int degree = 3;
  bool tamper_q1 = false;
  bool reproduce_form5_failure = false;
  int scan_k_degree = 0;
  int scan_k_count = 0;

  nlohmann::ordered_json to_json() const;
};

struct RunResult {
  int exit_code = 0;
  Summary summary;
  std::vector<StateRow> rows;
};

/// Executes the command in-process. Configuration/IO problems throw (the CLI
/// maps them to exit 2); identity failures yield exit_code 1.
RunResult run_command(const RunConfig& config);

}  // namespace et14
