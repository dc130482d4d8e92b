#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace et14 {

/// One named identity check with its worst normalized residual. `paper_ref`
/// is the stable equation tag the reports key on (eq3, eq4_h, eq11, ...).
struct CheckResult {
  std::string name;
  std::string paper_ref;
  double max_rel{};
  bool pass{};
  nlohmann::ordered_json detail;  // optional extras (witness values etc.)
};

struct Summary {
  std::string command;
  nlohmann::ordered_json config;
  std::vector<CheckResult> checks;

  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  nlohmann::ordered_json to_json() const;
};

/// Per-state residual rows, written as JSON lines and optionally CSV.
struct StateRow {
  int index{};
  std::string check;
  double residual{};
  std::string digest;
};

std::string rows_to_jsonl(const std::vector<StateRow>& rows);
std::string rows_to_csv(const std::vector<StateRow>& rows);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace et14
