#include "agentdisc/dot.hpp"

#include <array>
#include <sstream>

#include "agentdisc/discovery.hpp"

namespace agentdisc {

namespace {

constexpr std::array<const char*, 8> kPalette{"#d62728", "#1f77b4", "#2ca02c", "#ff7f0e",
                                              "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string shape(NodeKind kind) {
  switch (kind) {
    case NodeKind::decision: return "shape=square";
    case NodeKind::utility: return "shape=diamond";
    case NodeKind::decision_utility: return "shape=square, peripheries=2";
    case NodeKind::chance: break;
  }
  return "shape=circle";
}

void emit_object_nodes(std::ostringstream& out, const GameGraph& g) {
  for (std::size_t v = 0; v < g.size(); ++v) {
    out << "  " << quote(g.nodes[v]) << " [" << shape(g.kinds[v]);
    if (!g.colours[v].empty()) {
      std::string colours;
      for (auto c : g.colours[v]) {
        if (!colours.empty()) colours += ':';
        colours += kPalette[c % kPalette.size()];
      }
      out << ", style=filled, fillcolor=" << quote(colours);
      if (g.colours[v].size() > 1) out << ", gradientangle=90";
    }
    out << "];\n";
  }
}

}  // namespace

std::string export_dot(const GameGraph& g, const std::string& title) {
  std::ostringstream out;
  out << "digraph " << quote(title) << " {\n";
  out << "  node [fontname=\"Helvetica\"];\n";
  emit_object_nodes(out, g);
  const EdgeSet info = g.info_edges();
  for (const auto& e : g.edges) {
    out << "  " << quote(g.nodes[e.first]) << " -> " << quote(g.nodes[e.second]);
    if (info.contains(e)) out << " [style=dashed]";
    out << ";\n";
  }
  out << "}\n";
  return out.str();
}

std::string export_dot(const EdgeLabelledMechanisedGraph& g, const std::string& title) {
  GameGraph typed;
  try {
    typed = identify_agents(g);
  } catch (const std::exception&) {
    typed.nodes = g.objects;
    typed.kinds.assign(g.size(), NodeKind::chance);
    typed.colours.resize(g.size());
  }
  auto mech = [&](std::size_t v) { return quote("M_" + g.objects[v]); };
  std::ostringstream out;
  out << "digraph " << quote(title) << " {\n";
  out << "  node [fontname=\"Helvetica\"];\n";
  emit_object_nodes(out, typed);
  for (std::size_t v = 0; v < g.size(); ++v)
    out << "  " << mech(v)
        << " [shape=circle, style=filled, fillcolor=black, fontcolor=white, width=0.3, fixedsize=false];\n";
  for (const auto& [a, b] : g.e_obj) out << "  " << quote(g.objects[a]) << " -> " << quote(g.objects[b]) << ";\n";
  for (const auto& [m, v] : g.e_func) out << "  " << mech(m) << " -> " << quote(g.objects[v]) << " [style=dotted];\n";
  for (const auto& e : g.e_mech) {
    out << "  " << mech(e.first) << " -> " << mech(e.second);
    if (g.e_term.contains(e)) out << " [style=bold, penwidth=2.5, color=\"#1f3fbf\"]";
    else out << " [style=dashed]";
    out << ";\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace agentdisc
