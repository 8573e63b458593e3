#include "agentdisc/report.hpp"

#include <sstream>

#include "agentdisc/rational.hpp"

namespace agentdisc {

namespace {

using nlohmann::ordered_json;

ordered_json edge_list(const EdgeSet& edges, const std::vector<std::string>& names, const std::string& src_prefix,
                       const std::string& dst_prefix) {
  ordered_json out = ordered_json::array();
  for (const auto& [a, b] : edges) out.push_back({src_prefix + names[a], dst_prefix + names[b]});
  return out;
}

std::string edge_text(const EdgeSet& edges, const std::vector<std::string>& names, const std::string& src_prefix,
                      const std::string& dst_prefix) {
  std::string out = "{";
  bool first = true;
  for (const auto& [a, b] : edges) {
    if (!first) out += ", ";
    out += src_prefix + names[a] + " -> " + dst_prefix + names[b];
    first = false;
  }
  return out + "}";
}

// Contexts of a decision in mixed radix, first observation most significant.
std::vector<std::vector<std::size_t>> contexts(const ObjectGraph& g, std::size_t d) {
  std::vector<std::vector<std::size_t>> out{{}};
  for (auto p : g.parents(d)) {
    std::vector<std::vector<std::size_t>> next;
    for (const auto& prefix : out)
      for (std::size_t o = 0; o < g.domain(p).size(); ++o) {
        auto c = prefix;
        c.push_back(o);
        next.push_back(std::move(c));
      }
    out = std::move(next);
  }
  return out;
}

}  // namespace

ordered_json to_json(const GameGraph& g) {
  ordered_json nodes = ordered_json::array();
  for (std::size_t v = 0; v < g.size(); ++v) {
    ordered_json agents = ordered_json::array();
    for (auto c : g.colours[v]) agents.push_back(g.colour_names[c]);
    nodes.push_back({{"name", g.nodes[v]}, {"kind", to_string(g.kinds[v])}, {"agents", agents}});
  }
  ordered_json out;
  out["nodes"] = nodes;
  out["agents"] = g.colour_names;
  out["edges"] = edge_list(g.edges, g.nodes, "", "");
  out["info_edges"] = edge_list(g.info_edges(), g.nodes, "", "");
  return out;
}

ordered_json to_json(const EdgeLabelledMechanisedGraph& g) {
  ordered_json out;
  out["objects"] = g.objects;
  out["e_obj"] = edge_list(g.e_obj, g.objects, "", "");
  out["e_func"] = edge_list(g.e_func, g.objects, "M_", "");
  out["e_mech"] = edge_list(g.e_mech, g.objects, "M_", "M_");
  out["e_term"] = edge_list(g.e_term, g.objects, "M_", "M_");
  return out;
}

ordered_json to_json(const RoundtripReport& r) {
  ordered_json out;
  out["precondition_ok"] = r.precondition_ok;
  out["precondition"] = r.precondition;
  out["passed"] = r.precondition_ok && r.passed;
  out["differences"] = r.differences;
  return out;
}

ordered_json solve_json(const CausalGame& game, const PolicyProfile& profile) {
  const ObjectGraph& g = game.graph();
  ordered_json rules = ordered_json::array();
  for (const auto& rule : profile.rules) {
    ordered_json observations = ordered_json::array();
    for (auto p : g.parents(rule.decision)) observations.push_back(g.name(p));
    ordered_json table = ordered_json::array();
    const auto ctxs = contexts(g, rule.decision);
    for (std::size_t c = 0; c < ctxs.size(); ++c) {
      ordered_json ctx = ordered_json::array();
      for (std::size_t i = 0; i < ctxs[c].size(); ++i) ctx.push_back(g.domain(g.parents(rule.decision)[i]).label(ctxs[c][i]));
      table.push_back({{"context", ctx}, {"action", g.domain(rule.decision).label(rule.actions[c])}});
    }
    rules.push_back({{"decision", g.name(rule.decision)}, {"observations", observations}, {"rule", table}});
  }
  ordered_json eu = ordered_json::object();
  for (std::size_t a = 0; a < game.agents().size(); ++a)
    eu[game.agents()[a]] = to_string(expected_utility(game, profile, a));
  ordered_json out;
  out["profile"] = rules;
  out["expected_utility"] = eu;
  return out;
}

std::string to_text(const GameGraph& g) {
  std::ostringstream out;
  for (std::size_t v = 0; v < g.size(); ++v) {
    out << g.nodes[v] << ": " << to_string(g.kinds[v]);
    for (auto c : g.colours[v]) out << " " << g.colour_names[c];
    out << "\n";
  }
  out << "edges: " << edge_text(g.edges, g.nodes, "", "") << "\n";
  out << "information edges: " << edge_text(g.info_edges(), g.nodes, "", "") << "\n";
  return out.str();
}

std::string to_text(const EdgeLabelledMechanisedGraph& g) {
  std::ostringstream out;
  out << "e_obj: " << edge_text(g.e_obj, g.objects, "", "") << "\n";
  out << "e_func: " << edge_text(g.e_func, g.objects, "M_", "") << "\n";
  out << "e_mech: " << edge_text(g.e_mech, g.objects, "M_", "M_") << "\n";
  out << "e_term: " << edge_text(g.e_term, g.objects, "M_", "M_") << "\n";
  return out.str();
}

std::string to_text(const RoundtripReport& r) {
  if (!r.precondition_ok) return "precondition failed: " + r.precondition + "\n";
  std::string out = r.passed ? "pass\n" : "FAIL\n";
  for (const auto& d : r.differences) out += "  " + d + "\n";
  return out;
}

std::string solve_text(const CausalGame& game, const PolicyProfile& profile) {
  const ObjectGraph& g = game.graph();
  std::vector<std::string> parts;
  for (const auto& rule : profile.rules) {
    const auto& obs = g.parents(rule.decision);
    const auto ctxs = contexts(g, rule.decision);
    for (std::size_t c = 0; c < ctxs.size(); ++c) {
      std::string lhs = g.name(rule.decision);
      if (!obs.empty()) {
        lhs += "[";
        for (std::size_t i = 0; i < obs.size(); ++i) {
          if (i) lhs += ",";
          lhs += g.name(obs[i]) + "=" + g.domain(obs[i]).label(ctxs[c][i]);
        }
        lhs += "]";
      }
      parts.push_back(lhs + " := " + g.domain(rule.decision).label(rule.actions[c]));
    }
  }
  for (std::size_t a = 0; a < game.agents().size(); ++a)
    parts.push_back("EU(" + game.agents()[a] + ") = " + to_string(expected_utility(game, profile, a)));
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? ", " : "") + parts[i];
  return out + "\n";
}

}  // namespace agentdisc
