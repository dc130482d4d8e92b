#include "et14/json_io.hpp"

#include "et14/errors.hpp"

namespace et14 {

nlohmann::ordered_json state_to_json(const MultiplierState& s) {
  nlohmann::ordered_json j;
  j["lambda"] = s.lambda;
  j["lambda_i"] = {s.lambda_i[0], s.lambda_i[1], s.lambda_i[2]};
  j["lambda_ij"] = {s.lambda_ij.a[0], s.lambda_ij.a[1], s.lambda_ij.a[2],
                    s.lambda_ij.a[3], s.lambda_ij.a[4], s.lambda_ij.a[5]};
  j["lambda_ill"] = {s.lambda_ill[0], s.lambda_ill[1], s.lambda_ill[2]};
  j["lambda_ppll"] = s.lambda_ppll;
  return j;
}

MultiplierState state_from_json(const nlohmann::json& j) {
  MultiplierState s;
  s.lambda = j.at("lambda").get<double>();
  const auto& li = j.at("lambda_i");
  const auto& lij = j.at("lambda_ij");
  const auto& lill = j.at("lambda_ill");
  if (li.size() != 3 || lill.size() != 3)
    throw ParseError("lambda_i and lambda_ill need 3 entries each");
  if (lij.size() != 6)
    throw ParseError("lambda_ij must have 6 entries, order (11,22,33,12,13,23)");
  for (int i = 0; i < 3; ++i) s.lambda_i[i] = li[i].get<double>();
  for (int i = 0; i < 6; ++i) s.lambda_ij.a[i] = lij[i].get<double>();
  for (int i = 0; i < 3; ++i) s.lambda_ill[i] = lill[i].get<double>();
  s.lambda_ppll = j.at("lambda_ppll").get<double>();
  return s;
}

nlohmann::ordered_json bundle_to_json(const InvariantBundle& b) {
  nlohmann::ordered_json j;
  for (int i = 0; i < 8; ++i) j["X" + std::to_string(i + 1)] = b.x[i];
  j["Q1"] = b.q1;
  j["Q2"] = b.q2;
  j["Q3"] = b.q3;
  nlohmann::ordered_json aux;
  aux["w_w"] = b.aux.ww;
  aux["w_Lw"] = b.aux.wLw;
  aux["w_L2w"] = b.aux.wL2w;
  aux["w_L3w"] = b.aux.wL3w;
  aux["v_w"] = b.aux.vw;
  aux["v_Lw"] = b.aux.vLw;
  aux["v_v"] = b.aux.vv;
  aux["v_Lv"] = b.aux.vLv;
  aux["v_L2v"] = b.aux.vL2v;
  j["aux"] = aux;
  return j;
}

nlohmann::ordered_json eta_to_json(const EtaBundle& e) {
  nlohmann::ordered_json j;
  for (int i = 0; i < 8; ++i) j["eta" + std::to_string(i + 1)] = e.e[i];
  return j;
}

nlohmann::ordered_json yz_to_json(const YZBundle& yz) {
  nlohmann::ordered_json j;
  j["Y5"] = yz.y5;
  j["Y6"] = yz.y6;
  j["Y7"] = yz.y7;
  j["Y8"] = yz.y8;
  j["Z5"] = yz.z5;
  j["Z7"] = yz.z7;
  j["Z8"] = yz.z8;
  return j;
}

nlohmann::ordered_json s1_to_json(const S1Set& s1) {
  nlohmann::ordered_json j;
  j["Q1"] = s1.q1;
  j["Q2"] = s1.q2;
  j["Q3"] = s1.q3;
  j["w_w"] = s1.ww;
  j["w_Lw"] = s1.wLw;
  j["w_L2w"] = s1.wL2w;
  j["X5"] = s1.x5;
  j["X6"] = s1.x6;
  j["X7"] = s1.x7;
  j["X8"] = s1.x8;
  j["lambda_ppll"] = s1.ppll;
  return j;
}

nlohmann::ordered_json canonical_frame_to_json(const CanonicalFrame& f) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json rot = nlohmann::ordered_json::array();
  for (int i = 0; i < 3; ++i) rot.push_back({f.rotation[i][0], f.rotation[i][1], f.rotation[i][2]});
  j["rotation"] = rot;
  j["canonical_state"] = state_to_json(f.canonical);
  j["case"] = frame_case_name(f.case_tag);
  return j;
}

nlohmann::ordered_json verdict_to_json(const VerdictReport& v,
                                       const std::optional<DeltaState>& counterexample,
                                       const std::vector<double>& limit_sequence) {
  nlohmann::ordered_json j;
  j["minors"] = v.minors;
  j["verdict"] = verdict_name(v.verdict);
  if (v.failing_minor >= 0) j["failing_minor"] = v.failing_minor;
  j["counterexample"] = counterexample ? state_to_json(*counterexample)
                                       : nlohmann::ordered_json(nullptr);
  if (!limit_sequence.empty()) j["limit_sequence"] = limit_sequence;
  return j;
}

}  // namespace et14
