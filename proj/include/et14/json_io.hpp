#pragma once

#include <nlohmann/json.hpp>

#include "et14/convexity.hpp"
#include "et14/frame.hpp"
#include "et14/invariants.hpp"
#include "et14/state.hpp"

namespace et14 {

nlohmann::ordered_json state_to_json(const MultiplierState& s);
MultiplierState state_from_json(const nlohmann::json& j);

nlohmann::ordered_json bundle_to_json(const InvariantBundle& b);
nlohmann::ordered_json eta_to_json(const EtaBundle& e);
nlohmann::ordered_json yz_to_json(const YZBundle& yz);

nlohmann::ordered_json s1_to_json(const S1Set& s1);
nlohmann::ordered_json canonical_frame_to_json(const CanonicalFrame& f);

nlohmann::ordered_json verdict_to_json(const VerdictReport& v,
                                       const std::optional<DeltaState>& counterexample,
                                       const std::vector<double>& limit_sequence = {});

}  // namespace et14
