#pragma once

#include <string>

#include <json.hpp>

#include "agentdisc/game.hpp"
#include "agentdisc/graphops.hpp"
#include "agentdisc/graphs.hpp"

namespace agentdisc {

// JSON schemas (field names are stable):
//   game graph: {"nodes":[{"name","kind","agents":[...]}], "agents":[...],
//                "edges":[[src,dst]], "info_edges":[[src,dst]]}
//   mechanised graph: {"objects":[...], "e_obj", "e_func", "e_mech", "e_term"}
//                with mechanism nodes named "M_<object>"
//   roundtrip: {"precondition_ok", "precondition", "passed", "differences"}
//   solve: {"profile":[{"decision","observations","rule":[{"context":[...],"action"}]}],
//           "expected_utility":{agent: "p/q"}}
nlohmann::ordered_json to_json(const GameGraph& g);
nlohmann::ordered_json to_json(const EdgeLabelledMechanisedGraph& g);
nlohmann::ordered_json to_json(const RoundtripReport& r);
nlohmann::ordered_json solve_json(const CausalGame& game, const PolicyProfile& profile);

std::string to_text(const GameGraph& g);
std::string to_text(const EdgeLabelledMechanisedGraph& g);
std::string to_text(const RoundtripReport& r);
// "D := 1, EU(agent1) = 7/10"; rules over observations are listed per context.
std::string solve_text(const CausalGame& game, const PolicyProfile& profile);

}  // namespace agentdisc
