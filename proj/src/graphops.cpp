#include "agentdisc/graphops.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <map>
#include <stdexcept>

#include "agentdisc/discovery.hpp"

namespace agentdisc {

namespace {

struct Adjacency {
  std::vector<std::vector<std::size_t>> parents, children;
  Adjacency(std::size_t n, const EdgeSet& edges) : parents(n), children(n) {
    for (const auto& [a, b] : edges) {
      if (a >= n || b >= n) throw std::invalid_argument("edge refers to an unknown node");
      children[a].push_back(b);
      parents[b].push_back(a);
    }
  }
};

std::vector<bool> descendants(const Adjacency& adj, std::size_t v) {
  std::vector<bool> seen(adj.children.size(), false);
  std::deque<std::size_t> queue(adj.children[v].begin(), adj.children[v].end());
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop_front();
    if (seen[u]) continue;
    seen[u] = true;
    for (auto c : adj.children[u]) queue.push_back(c);
  }
  return seen;
}

std::string join_names(const std::vector<std::string>& names, const std::set<std::size_t>& nodes,
                       const std::string& prefix = {}) {
  std::string out = "{";
  bool first = true;
  for (auto v : nodes) {
    if (!first) out += ", ";
    out += prefix + names[v];
    first = false;
  }
  return out + "}";
}

}  // namespace

bool d_separated(std::size_t n, const EdgeSet& edges, const std::set<std::size_t>& xs,
                 const std::set<std::size_t>& ys, const std::set<std::size_t>& zs) {
  for (const auto* s : {&xs, &ys, &zs})
    for (auto v : *s)
      if (v >= n) throw std::invalid_argument("unknown node in d-separation query");
  for (auto z : zs)
    if (xs.contains(z) || ys.contains(z)) throw std::invalid_argument("conditioning set meets the query sets");
  for (auto x : xs)
    if (ys.contains(x)) return false;
  const Adjacency adj(n, edges);

  std::vector<bool> observed_ancestor(n, false);
  std::deque<std::size_t> queue(zs.begin(), zs.end());
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop_front();
    if (observed_ancestor[u]) continue;
    observed_ancestor[u] = true;
    for (auto p : adj.parents[u]) queue.push_back(p);
  }

  // (node, arrived from a child) visits.
  std::vector<std::array<bool, 2>> visited(n, {false, false});
  std::deque<std::pair<std::size_t, bool>> trail;
  for (auto x : xs) trail.emplace_back(x, true);
  while (!trail.empty()) {
    const auto [u, up] = trail.front();
    trail.pop_front();
    if (visited[u][up]) continue;
    visited[u][up] = true;
    const bool observed = zs.contains(u);
    if (!observed && ys.contains(u)) return false;
    if (up) {
      if (observed) continue;
      for (auto p : adj.parents[u]) trail.emplace_back(p, true);
      for (auto c : adj.children[u]) trail.emplace_back(c, false);
    } else {
      if (!observed)
        for (auto c : adj.children[u]) trail.emplace_back(c, false);
      if (observed_ancestor[u])
        for (auto p : adj.parents[u]) trail.emplace_back(p, true);
    }
  }
  return true;
}

bool s_reachable(const GameGraph& g, std::size_t d, std::size_t v) {
  const std::size_t n = g.size();
  if (d >= n || v >= n) throw std::invalid_argument("unknown node in s-reachability query");
  if (!is_decision(g.kinds[d])) throw std::invalid_argument("'" + g.nodes[d] + "' is not a decision");
  if (v == d) throw std::invalid_argument("s-reachability needs a node other than the decision");
  const Adjacency adj(n, g.edges);
  const auto below = descendants(adj, d);
  std::set<std::size_t> targets;
  for (auto c : g.colours[d])
    for (auto u : g.utilities_of(c))
      if (below[u]) targets.insert(u);
  if (targets.empty()) return false;
  std::set<std::size_t> family(adj.parents[d].begin(), adj.parents[d].end());
  family.insert(d);
  EdgeSet extended = g.edges;
  extended.emplace(n, v);
  return !d_separated(n + 1, extended, {n}, targets, family);
}

bool directed_path_avoiding(const EdgeSet& edges, std::size_t n, std::size_t src, std::size_t dst,
                            const std::set<std::size_t>& avoid) {
  if (src >= n || dst >= n) throw std::invalid_argument("unknown node in path query");
  const Adjacency adj(n, edges);
  std::vector<bool> seen(n, false);
  std::deque<std::size_t> queue(adj.children[src].begin(), adj.children[src].end());
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop_front();
    if (u == dst) return true;
    if (seen[u] || avoid.contains(u)) continue;
    seen[u] = true;
    for (auto c : adj.children[u]) queue.push_back(c);
  }
  return false;
}

EdgeLabelledMechanisedGraph mechanise(const GameGraph& g) {
  g.validate();
  const std::size_t n = g.size();
  EdgeLabelledMechanisedGraph out;
  out.objects = g.nodes;
  out.e_obj = g.edges;
  for (std::size_t v = 0; v < n; ++v) out.e_func.emplace(v, v);
  for (std::size_t a = 0; a < g.colour_names.size(); ++a) {
    const auto owned = g.utilities_of(a);
    const std::set<std::size_t> utilities(owned.begin(), owned.end());
    for (auto d : g.decisions_of(a)) {
      for (std::size_t v = 0; v < n; ++v) {
        if (v == d) continue;
        if (s_reachable(g, d, v)) out.e_mech.emplace(v, d);
        if (utilities.contains(v)) {
          std::set<std::size_t> others = utilities;
          others.erase(v);
          if (directed_path_avoiding(g.edges, n, d, v, others)) out.e_term.emplace(v, d);
        }
      }
    }
  }
  return out;
}

std::vector<AgentSubgraph> agent_subgraphs(const GameGraph& g) {
  std::vector<AgentSubgraph> out;
  for (std::size_t a = 0; a < g.colour_names.size(); ++a) {
    AgentSubgraph sub;
    sub.agent = a;
    const auto decisions = g.decisions_of(a);
    const auto utilities = g.utilities_of(a);
    sub.nodes.insert(decisions.begin(), decisions.end());
    sub.nodes.insert(utilities.begin(), utilities.end());
    const std::set<std::size_t> owned(utilities.begin(), utilities.end());
    for (auto d : decisions)
      for (auto u : utilities) {
        if (u == d) continue;
        std::set<std::size_t> others = owned;
        others.erase(u);
        if (directed_path_avoiding(g.edges, g.size(), d, u, others)) sub.edges.emplace(d, u);
      }
    out.push_back(std::move(sub));
  }
  return out;
}

DecisionUtilitySubgraph decision_utility_subgraph(const GameGraph& g) {
  DecisionUtilitySubgraph out;
  for (auto d : g.decisions()) out.nodes.insert(d);
  for (auto u : g.utilities()) out.nodes.insert(u);
  for (const auto& sub : agent_subgraphs(g)) out.edges.insert(sub.edges.begin(), sub.edges.end());
  return out;
}

CheckResult check_assumption1(const GameGraph& g) {
  const auto du = decision_utility_subgraph(g);
  const auto subs = agent_subgraphs(g);
  std::map<std::size_t, std::vector<std::size_t>> adjacent;
  for (const auto& [a, b] : du.edges) {
    adjacent[a].push_back(b);
    adjacent[b].push_back(a);
  }
  std::set<std::size_t> seen;
  for (auto start : du.nodes) {
    if (seen.contains(start)) continue;
    std::set<std::size_t> component;
    std::deque<std::size_t> queue{start};
    while (!queue.empty()) {
      const std::size_t u = queue.front();
      queue.pop_front();
      if (!component.insert(u).second) continue;
      for (auto x : adjacent[u]) queue.push_back(x);
    }
    seen.insert(component.begin(), component.end());
    EdgeSet edges;
    for (const auto& e : du.edges)
      if (component.contains(e.first)) edges.insert(e);
    const std::string name = join_names(g.nodes, component);
    bool has_decision = false, has_utility = false;
    for (auto v : component) {
      has_decision = has_decision || is_decision(g.kinds[v]);
      has_utility = has_utility || is_utility(g.kinds[v]);
    }
    if (!has_decision || !has_utility)
      return {false, "component " + name + " lacks a " + (has_decision ? "utility" : "decision")};
    bool matches = false;
    for (const auto& sub : subs) matches = matches || (sub.nodes == component && sub.edges == edges);
    if (!matches) return {false, "component " + name + " is not the subgraph of a single agent"};
  }
  return {true, {}};
}

RoundtripReport verify_left_inverse_game(const GameGraph& g) {
  RoundtripReport report;
  if (auto check = check_assumption1(g); !check.ok) {
    report.precondition_ok = false;
    report.precondition = "assumption 1 fails: " + check.diagnostic;
    return report;
  }
  const GameGraph back = identify_agents(mechanise(g));
  if (back.nodes != g.nodes) report.differences.push_back("node lists differ");
  for (std::size_t v = 0; v < std::min(back.size(), g.size()); ++v)
    if (back.kinds[v] != g.kinds[v])
      report.differences.push_back("'" + g.nodes[v] + "' is " + to_string(back.kinds[v]) + ", expected " +
                                   to_string(g.kinds[v]));
  for (const auto& e : g.edges)
    if (!back.edges.contains(e)) report.differences.push_back("missing edge " + g.nodes[e.first] + " -> " + g.nodes[e.second]);
  for (const auto& e : back.edges)
    if (!g.edges.contains(e)) report.differences.push_back("extra edge " + g.nodes[e.first] + " -> " + g.nodes[e.second]);
  if (!back.same_colouring(g)) report.differences.push_back("agent colourings differ");
  report.passed = report.differences.empty();
  return report;
}

RoundtripReport verify_left_inverse_mech(const EdgeLabelledMechanisedGraph& c) {
  RoundtripReport report;
  c.validate();
  std::set<std::size_t> failing;
  for (const auto& [w, v] : c.e_mech) {
    bool terminal = false;
    for (const auto& [x, y] : c.e_term) terminal = terminal || (y == v && x != v);
    if (!terminal) failing.insert(v);
  }
  if (!failing.empty()) {
    report.precondition_ok = false;
    report.precondition = "mechanism edges without an incoming terminal edge at " + join_names(c.objects, failing, "M_");
    return report;
  }
  const EdgeLabelledMechanisedGraph back = mechanise(identify_agents(c));
  auto compare = [&](const EdgeSet& want, const EdgeSet& got, const std::string& label, bool mech_src,
                     bool mech_dst) {
    auto name = [&](std::size_t v, bool mech) { return (mech ? "M_" : "") + c.objects[v]; };
    for (const auto& e : want)
      if (!got.contains(e))
        report.differences.push_back("missing " + label + " edge " + name(e.first, mech_src) + " -> " + name(e.second, mech_dst));
    for (const auto& e : got)
      if (!want.contains(e))
        report.differences.push_back("extra " + label + " edge " + name(e.first, mech_src) + " -> " + name(e.second, mech_dst));
  };
  compare(c.e_obj, back.e_obj, "object", false, false);
  compare(c.e_func, back.e_func, "functional", true, false);
  compare(c.e_mech, back.e_mech, "mechanism", true, true);
  compare(c.e_term, back.e_term, "terminal", true, true);
  report.passed = report.differences.empty();
  return report;
}

}  // namespace agentdisc
