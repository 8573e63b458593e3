#pragma once

#include <cstdint>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "agentdisc/graphs.hpp"
#include "agentdisc/interventional_oracle.hpp"

namespace agentdisc {

inline constexpr std::uint64_t kDefaultProbeBudget = 1'000'000'000;

// kDefaultProbeBudget, or the AGENTDISC_BUDGET environment variable when set.
std::uint64_t default_probe_budget();

struct DiscoveryOptions {
  std::uint64_t budget = default_probe_budget();  // oracle probes per run
};

struct DiscoveryStats {
  std::uint64_t probes = 0;
};

using NodeEdge = std::pair<Node, Node>;  // (source, target)

// Edge (W, V) iff some intervention on every node but V and W, and two
// settings of W, give different answers for V. Objects range over their
// outcomes, mechanisms over their candidates; nodes outside `nodes` are left
// alone. Throws BudgetExhausted with the edges found so far.
std::set<NodeEdge> leave_one_out(const InterventionalOracle& oracle, std::span<const Node> nodes,
                                 const DiscoveryOptions& options = {}, DiscoveryStats* stats = nullptr);

// Leave-one-out over all object and mechanism nodes, shape check, then
// terminal labelling with structural cuts of the children of W and of V.
EdgeLabelledMechanisedGraph discover(const InterventionalOracle& oracle, const DiscoveryOptions& options = {},
                                     DiscoveryStats* stats = nullptr);

// Decisions are heads of terminal edges, utilities their tails; colours are
// the weakly connected components of the terminal edges, in node order.
GameGraph identify_agents(const EdgeLabelledMechanisedGraph& g);

GameGraph discover_game(const InterventionalOracle& oracle, const DiscoveryOptions& options = {},
                        DiscoveryStats* stats = nullptr);

}  // namespace agentdisc
