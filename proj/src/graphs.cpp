#include "agentdisc/graphs.hpp"

#include <algorithm>
#include <map>

#include "agentdisc/errors.hpp"
#include "agentdisc/game.hpp"

namespace agentdisc {

std::vector<std::size_t> topological_order(std::size_t n, const EdgeSet& edges) {
  std::vector<std::size_t> indegree(n, 0);
  std::vector<std::vector<std::size_t>> out(n);
  for (const auto& [a, b] : edges) {
    out[a].push_back(b);
    ++indegree[b];
  }
  std::vector<std::size_t> order;
  std::set<std::size_t> ready;
  for (std::size_t v = 0; v < n; ++v)
    if (indegree[v] == 0) ready.insert(v);
  while (!ready.empty()) {
    const std::size_t v = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(v);
    for (auto c : out[v])
      if (--indegree[c] == 0) ready.insert(c);
  }
  return order;
}

bool is_acyclic(std::size_t n, const EdgeSet& edges) { return topological_order(n, edges).size() == n; }

void EdgeLabelledMechanisedGraph::validate() const {
  const std::size_t n = objects.size();
  auto check_range = [&](const EdgeSet& s, const char* what) {
    for (const auto& [a, b] : s)
      if (a >= n || b >= n) throw ShapeError(std::string(what) + " edge refers to an unknown node");
  };
  check_range(e_obj, "object");
  check_range(e_func, "functional");
  check_range(e_mech, "mechanism");
  check_range(e_term, "terminal");
  for (const auto& [a, b] : e_obj)
    if (a == b) throw ShapeError("self-loop on '" + objects[a] + "'");
  for (const auto& [a, b] : e_mech)
    if (a == b) throw ShapeError("self-loop on 'M_" + objects[a] + "'");
  for (const auto& e : e_term)
    if (!e_mech.contains(e))
      throw ShapeError("terminal edge M_" + objects[e.first] + " -> M_" + objects[e.second] +
                       " is not a mechanism edge");
  std::vector<std::size_t> func_parents(n, 0);
  for (const auto& [m, v] : e_func) ++func_parents[v];
  for (std::size_t v = 0; v < n; ++v)
    if (func_parents[v] != 1)
      throw ShapeError("object '" + objects[v] + "' has " + std::to_string(func_parents[v]) +
                       " mechanism parents, expected exactly one");
  if (!is_acyclic(n, e_obj)) throw ShapeError("object-level graph has a cycle");
}

std::string to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::chance: return "chance";
    case NodeKind::decision: return "decision";
    case NodeKind::utility: return "utility";
    case NodeKind::decision_utility: return "decision_utility";
  }
  return "chance";
}

EdgeSet GameGraph::info_edges() const {
  EdgeSet out;
  for (const auto& e : edges)
    if (is_decision(kinds[e.second])) out.insert(e);
  return out;
}

std::vector<std::size_t> GameGraph::decisions() const {
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < size(); ++v)
    if (is_decision(kinds[v])) out.push_back(v);
  return out;
}

std::vector<std::size_t> GameGraph::utilities() const {
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < size(); ++v)
    if (is_utility(kinds[v])) out.push_back(v);
  return out;
}

std::vector<std::size_t> GameGraph::decisions_of(std::size_t colour) const {
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < size(); ++v)
    if (is_decision(kinds[v]) && colours[v].contains(colour)) out.push_back(v);
  return out;
}

std::vector<std::size_t> GameGraph::utilities_of(std::size_t colour) const {
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < size(); ++v)
    if (is_utility(kinds[v]) && colours[v].contains(colour)) out.push_back(v);
  return out;
}

void GameGraph::validate() const {
  const std::size_t n = nodes.size();
  if (kinds.size() != n || colours.size() != n) throw ShapeError("game graph node tables disagree in length");
  for (const auto& [a, b] : edges) {
    if (a >= n || b >= n) throw ShapeError("game graph edge refers to an unknown node");
    if (a == b) throw ShapeError("self-loop on '" + nodes[a] + "'");
  }
  if (!is_acyclic(n, edges)) throw ShapeError("game graph has a cycle");
  for (std::size_t v = 0; v < n; ++v) {
    for (auto c : colours[v])
      if (c >= colour_names.size()) throw ShapeError("node '" + nodes[v] + "' has an unknown colour");
    if (kinds[v] == NodeKind::chance && !colours[v].empty())
      throw ShapeError("chance node '" + nodes[v] + "' is coloured");
    if (kinds[v] != NodeKind::chance && colours[v].empty())
      throw ShapeError("node '" + nodes[v] + "' has no colour");
    if (is_decision(kinds[v]) && colours[v].size() != 1)
      throw ShapeError("decision '" + nodes[v] + "' must have exactly one colour");
  }
}

bool GameGraph::same_colouring(const GameGraph& other) const {
  auto groups = [](const GameGraph& g) {
    std::map<std::size_t, std::set<std::size_t>> by_colour;
    for (std::size_t v = 0; v < g.colours.size(); ++v)
      for (auto c : g.colours[v]) by_colour[c].insert(v);
    std::multiset<std::set<std::size_t>> out;
    for (auto& [c, s] : by_colour) out.insert(std::move(s));
    return out;
  };
  return groups(*this) == groups(other);
}

GameGraph game_graph_of(const CausalGame& game) {
  const ObjectGraph& g = game.graph();
  GameGraph out;
  out.nodes = g.names();
  out.colour_names = game.agents();
  out.kinds.resize(g.size());
  out.colours.resize(g.size());
  for (std::size_t v = 0; v < g.size(); ++v) {
    switch (game.kind(v)) {
      case VariableKind::chance: out.kinds[v] = NodeKind::chance; break;
      case VariableKind::decision: out.kinds[v] = NodeKind::decision; break;
      case VariableKind::utility: out.kinds[v] = NodeKind::utility; break;
    }
    out.colours[v].insert(game.owners(v).begin(), game.owners(v).end());
    for (auto p : g.parents(v)) out.edges.emplace(p, v);
  }
  return out;
}

}  // namespace agentdisc
