#pragma once

#include <string>

#include "agentdisc/graphs.hpp"

namespace agentdisc {

// Graphviz text. Decisions are squares, utilities diamonds, chance nodes
// circles, mechanisms small filled black circles. Information and mechanism
// edges are dashed, functional edges dotted, terminal edges bold. Agents get
// one colour each. Output depends only on the graph.
std::string export_dot(const GameGraph& g, const std::string& title = "game");
std::string export_dot(const EdgeLabelledMechanisedGraph& g, const std::string& title = "mechanised");

}  // namespace agentdisc
