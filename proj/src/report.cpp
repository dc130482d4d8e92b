#include "et14/report.hpp"

#include <fstream>
#include <sstream>

#include "et14/errors.hpp"

namespace et14 {

nlohmann::ordered_json Summary::to_json() const {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["config"] = config;
  nlohmann::ordered_json checks_j = nlohmann::ordered_json::array();
  for (const auto& c : checks) {
    nlohmann::ordered_json cj;
    cj["name"] = c.name;
    cj["paper_ref"] = c.paper_ref;
    cj["max_rel"] = c.max_rel;
    cj["pass"] = c.pass;
    if (!c.detail.is_null()) cj["detail"] = c.detail;
    checks_j.push_back(cj);
  }
  j["checks"] = checks_j;
  j["pass"] = pass();
  return j;
}

std::string rows_to_jsonl(const std::vector<StateRow>& rows) {
  std::ostringstream os;
  for (const auto& r : rows) {
    nlohmann::ordered_json j;
    j["index"] = r.index;
    j["check"] = r.check;
    j["residual"] = r.residual;
    j["state"] = r.digest;
    os << j.dump() << "\n";
  }
  return os.str();
}

std::string rows_to_csv(const std::vector<StateRow>& rows) {
  std::ostringstream os;
  os << "index,check,residual,state\n";
  for (const auto& r : rows)
    os << r.index << "," << r.check << "," << nlohmann::json(r.residual).dump() << ","
       << r.digest << "\n";
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot open output file: " + path);
  f << content;
  if (!f.good()) throw ParseError("write failed: " + path);
}

}  // namespace et14
