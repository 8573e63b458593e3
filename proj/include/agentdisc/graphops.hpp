#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "agentdisc/graphs.hpp"

namespace agentdisc {

// Is every path between xs and ys blocked given zs? Active-trail search.
// Throws std::invalid_argument on unknown nodes or zs meeting xs or ys.
bool d_separated(std::size_t n, const EdgeSet& edges, const std::set<std::size_t>& xs,
                 const std::set<std::size_t>& ys, const std::set<std::size_t>& zs);

// Fresh parent of v d-connected to the owner's utilities downstream of d,
// given d and its parents. Throws std::invalid_argument when v == d or d is
// not a decision.
bool s_reachable(const GameGraph& g, std::size_t d, std::size_t v);

// Nonempty directed path src -> dst whose interior avoids `avoid`.
bool directed_path_avoiding(const EdgeSet& edges, std::size_t n, std::size_t src, std::size_t dst,
                            const std::set<std::size_t>& avoid);

// Game graph to edge-labelled mechanised graph: s-reachability gives the
// mechanism edges, owner utilities reached without passing another owner
// utility give the terminal edges.
EdgeLabelledMechanisedGraph mechanise(const GameGraph& g);

struct AgentSubgraph {
  std::size_t agent = 0;
  std::set<std::size_t> nodes;
  EdgeSet edges;  // (decision, utility)
  friend bool operator==(const AgentSubgraph&, const AgentSubgraph&) = default;
};

std::vector<AgentSubgraph> agent_subgraphs(const GameGraph& g);

struct DecisionUtilitySubgraph {
  std::set<std::size_t> nodes;
  EdgeSet edges;
};

DecisionUtilitySubgraph decision_utility_subgraph(const GameGraph& g);

struct CheckResult {
  bool ok = true;
  std::string diagnostic;
};

// Every weakly connected component of the decision-utility subgraph is one
// agent's subgraph with at least one decision and one utility.
CheckResult check_assumption1(const GameGraph& g);

struct RoundtripReport {
  bool precondition_ok = true;
  std::string precondition;  // diagnostic when the precondition fails
  bool passed = false;       // meaningful only when precondition_ok
  std::vector<std::string> differences;
};

// identify_agents(mechanise(g)) == g, after checking Assumption 1.
RoundtripReport verify_left_inverse_game(const GameGraph& g);

// mechanise(identify_agents(c)) == c, after checking that every mechanism
// node with an incoming mechanism edge also has an incoming terminal edge.
RoundtripReport verify_left_inverse_mech(const EdgeLabelledMechanisedGraph& c);

}  // namespace agentdisc
