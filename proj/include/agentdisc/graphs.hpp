#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace agentdisc {

class CausalGame;

using EdgeSet = std::set<std::pair<std::size_t, std::size_t>>;

// Object nodes 0..n-1 with one mechanism node M_i per object. e_func holds
// (mechanism i, object j) pairs; the other sets are within one layer.
struct EdgeLabelledMechanisedGraph {
  std::vector<std::string> objects;
  EdgeSet e_obj;
  EdgeSet e_func;
  EdgeSet e_mech;
  EdgeSet e_term;

  std::size_t size() const noexcept { return objects.size(); }
  // Throws ShapeError unless e_term is within e_mech, every object has exactly
  // one functional parent and the object layer is acyclic.
  void validate() const;

  friend bool operator==(const EdgeLabelledMechanisedGraph&, const EdgeLabelledMechanisedGraph&) = default;
};

enum class NodeKind { chance, decision, utility, decision_utility };

inline bool is_decision(NodeKind k) { return k == NodeKind::decision || k == NodeKind::decision_utility; }
inline bool is_utility(NodeKind k) { return k == NodeKind::utility || k == NodeKind::decision_utility; }
std::string to_string(NodeKind kind);

// Typed DAG with an agent colouring. A node may carry several colours (a
// utility shared by two agents). Information edges are the edges into
// decisions.
struct GameGraph {
  std::vector<std::string> nodes;
  std::vector<NodeKind> kinds;
  std::vector<std::set<std::size_t>> colours;
  std::vector<std::string> colour_names;
  EdgeSet edges;

  std::size_t size() const noexcept { return nodes.size(); }
  EdgeSet info_edges() const;
  std::vector<std::size_t> decisions() const;
  std::vector<std::size_t> utilities() const;
  std::vector<std::size_t> decisions_of(std::size_t colour) const;
  std::vector<std::size_t> utilities_of(std::size_t colour) const;
  // Throws ShapeError on a cycle, an uncoloured decision or utility, or a
  // coloured chance node.
  void validate() const;
  // Colourings agree up to renaming: same multiset of per-colour node sets.
  bool same_colouring(const GameGraph& other) const;

  friend bool operator==(const GameGraph& a, const GameGraph& b) {
    return a.nodes == b.nodes && a.kinds == b.kinds && a.edges == b.edges && a.same_colouring(b);
  }
};

GameGraph game_graph_of(const CausalGame& game);

// Kahn order of a digraph on n nodes; empty optional-like result (size < n) on a cycle.
std::vector<std::size_t> topological_order(std::size_t n, const EdgeSet& edges);
bool is_acyclic(std::size_t n, const EdgeSet& edges);

}  // namespace agentdisc
