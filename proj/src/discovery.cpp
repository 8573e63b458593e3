#include "agentdisc/discovery.hpp"

#include <charconv>
#include <cstdlib>
#include <cstring>
#include <deque>
#include <limits>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>

#include "agentdisc/errors.hpp"

namespace agentdisc {

std::uint64_t default_probe_budget() {
  const char* text = std::getenv("AGENTDISC_BUDGET");
  if (!text || !*text) return kDefaultProbeBudget;
  std::uint64_t value = 0;
  const std::string_view s(text);
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || end != s.data() + s.size() || value == 0)
    throw ModelError("AGENTDISC_BUDGET must be a positive integer, got '" + std::string(s) + "'");
  return value;
}

namespace {

// Maps responses to small ids: pointer identity first, then value equality.
class Interner {
 public:
  std::uint32_t id(const Response& r) {
    const void* key = r.storage_id();
    if (key == last_key_) return last_id_;
    std::uint32_t found;
    if (auto it = by_storage_.find(key); it != by_storage_.end()) {
      found = it->second;
    } else {
      found = static_cast<std::uint32_t>(distinct_.size());
      for (std::uint32_t i = 0; i < distinct_.size(); ++i)
        if (distinct_[i] == r) {
          found = i;
          break;
        }
      if (found == distinct_.size()) distinct_.push_back(r);
      if (by_storage_.size() < kAliasCap) {
        by_storage_.emplace(key, found);
        alive_.push_back(r);
      } else {
        return found;
      }
    }
    last_key_ = key;
    last_id_ = found;
    return found;
  }
  std::size_t distinct() const noexcept { return distinct_.size(); }

 private:
  static constexpr std::size_t kAliasCap = 1 << 16;
  std::unordered_map<const void*, std::uint32_t> by_storage_;
  std::vector<Response> distinct_;
  std::vector<Response> alive_;  // keeps every keyed address valid
  const void* last_key_ = nullptr;
  std::uint32_t last_id_ = 0;
};

// Response ids in a byte buffer whose element width grows on demand.
class IdTable {
 public:
  explicit IdTable(std::size_t n) : n_(n), bytes_(n) {}
  void set(std::size_t i, std::uint32_t id) {
    if (id > max_for_width()) widen(id);
    switch (width_) {
      case 1: bytes_[i] = static_cast<unsigned char>(id); break;
      case 2: {
        const auto v = static_cast<std::uint16_t>(id);
        std::memcpy(&bytes_[2 * i], &v, 2);
        break;
      }
      default: std::memcpy(&bytes_[4 * i], &id, 4);
    }
  }
  bool equal_blocks(std::size_t a, std::size_t b, std::size_t count) const {
    return std::memcmp(&bytes_[a * width_], &bytes_[b * width_], count * width_) == 0;
  }

 private:
  std::uint32_t max_for_width() const noexcept { return width_ == 1 ? 0xFFu : width_ == 2 ? 0xFFFFu : 0xFFFFFFFFu; }
  std::uint32_t get(std::size_t i) const {
    switch (width_) {
      case 1: return bytes_[i];
      case 2: {
        std::uint16_t v;
        std::memcpy(&v, &bytes_[2 * i], 2);
        return v;
      }
      default: {
        std::uint32_t v;
        std::memcpy(&v, &bytes_[4 * i], 4);
        return v;
      }
    }
  }
  void widen(std::uint32_t id) {
    const std::size_t next = id <= 0xFFFFu ? 2 : 4;
    std::vector<unsigned char> wider(n_ * next);
    for (std::size_t i = 0; i < n_; ++i) {
      const std::uint32_t v = get(i);
      if (next == 2) {
        const auto s = static_cast<std::uint16_t>(v);
        std::memcpy(&wider[2 * i], &s, 2);
      } else {
        std::memcpy(&wider[4 * i], &v, 4);
      }
    }
    bytes_ = std::move(wider);
    width_ = next;
  }

  std::size_t n_;
  std::size_t width_ = 1;
  std::vector<unsigned char> bytes_;
};

struct Run {
  const InterventionalOracle& oracle;
  std::uint64_t budget;
  std::uint64_t used = 0;

  std::size_t slot(Node node) const {
    return node.layer == Layer::object ? node.index : oracle.variable_count() + node.index;
  }
  std::size_t radix(Node node) const {
    return node.layer == Layer::object ? oracle.outcome_count(node.index) : oracle.candidate_count(node.index);
  }
  // Reserves `count` probes or reports how many remain.
  bool reserve(std::uint64_t count) {
    if (count > budget - used) return false;
    used += count;
    return true;
  }
};

std::vector<std::pair<std::string, std::string>> named(const InterventionalOracle& oracle,
                                                       const std::set<NodeEdge>& edges) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [w, v] : edges) out.emplace_back(node_name(oracle, w), node_name(oracle, v));
  return out;
}

[[noreturn]] void exhausted(const Run& run, const std::set<NodeEdge>& found, const std::string& stage) {
  throw BudgetExhausted("probe budget of " + std::to_string(run.budget) + " exhausted during " + stage +
                            "; result is a subgraph lower bound",
                        named(run.oracle, found));
}

void loo_target(Run& run, Node target, std::span<const Node> nodes, std::set<NodeEdge>& edges) {
  std::vector<Node> coords;
  for (auto layer : {Layer::mechanism, Layer::object})
    for (const Node& n : nodes)
      if (n.layer == layer && n != target) coords.push_back(n);

  const std::size_t k = coords.size();
  std::vector<std::size_t> radix(k), pos(k);
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < k; ++i) {
    radix[i] = run.radix(coords[i]);
    pos[i] = run.slot(coords[i]);
    if (radix[i] == 0) return;
    total = total > std::numeric_limits<std::uint64_t>::max() / radix[i] ? std::numeric_limits<std::uint64_t>::max()
                                                                          : total * radix[i];
  }
  if (!run.reserve(total)) exhausted(run, edges, "leave-one-out for " + node_name(run.oracle, target));

  std::vector<std::int32_t> setting(2 * run.oracle.variable_count(), kFree);
  for (std::size_t i = 0; i < k; ++i) setting[pos[i]] = 0;
  IdTable table(total);
  Interner interner;
  for (std::uint64_t cell = 0; cell < total; ++cell) {
    table.set(cell, interner.id(run.oracle.probe(target, setting)));
    for (std::size_t c = k; c-- > 0;) {
      if (static_cast<std::size_t>(++setting[pos[c]]) < radix[c]) break;
      setting[pos[c]] = 0;
    }
  }
  if (interner.distinct() < 2) return;

  std::size_t stride = 1;
  for (std::size_t c = k; c-- > 0;) {
    const std::size_t r = radix[c];
    const std::size_t blocks = total / (stride * r);
    bool found = false;
    for (std::size_t b = 0; b < blocks && !found; ++b)
      for (std::size_t d = 0; d + 1 < r && !found; ++d) {
        const std::size_t base = (b * r + d) * stride;
        found = !table.equal_blocks(base, base + stride, stride);
      }
    if (found) edges.emplace(coords[c], target);
    stride *= r;
  }
}

// Does M_V respond to M_W with the mechanisms of `cut` held at structural
// settings and every other mechanism ranging over its candidates?
bool responds(Run& run, std::size_t v, std::size_t w, const std::set<std::size_t>& cut, bool w_structural,
              const std::set<NodeEdge>& found) {
  const InterventionalOracle& oracle = run.oracle;
  const std::size_t n = oracle.variable_count();
  auto range = [&](std::size_t i, bool structural) {
    std::vector<std::int32_t> values;
    if (structural) {
      values = oracle.structural_settings(i);
    } else {
      for (std::size_t c = 0; c < oracle.candidate_count(i); ++c) values.push_back(static_cast<std::int32_t>(c));
    }
    return values;
  };
  const std::vector<std::int32_t> w_values = range(w, w_structural);
  if (w_values.size() < 2) return false;
  std::vector<std::size_t> coords;
  std::vector<std::vector<std::int32_t>> values;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == v || i == w) continue;
    coords.push_back(i);
    values.push_back(range(i, cut.contains(i)));
    if (values.back().empty()) return false;
  }
  std::vector<std::int32_t> setting(2 * n, kFree);
  std::vector<std::size_t> digit(coords.size(), 0);
  for (std::size_t c = 0; c < coords.size(); ++c) setting[n + coords[c]] = values[c][0];
  const Node target = Node::mechanism(v);
  const std::string stage = "terminal labelling of M_" + oracle.variable_name(w) + " -> M_" + oracle.variable_name(v);
  for (;;) {
    if (!run.reserve(w_values.size())) exhausted(run, found, stage);
    setting[n + w] = w_values[0];
    const Response first = oracle.probe(target, setting);
    for (std::size_t j = 1; j < w_values.size(); ++j) {
      setting[n + w] = w_values[j];
      const Response other = oracle.probe(target, setting);
      if (!other.same_storage(first) && !(other == first)) return true;
    }
    std::size_t c = coords.size();
    while (c-- > 0) {
      if (++digit[c] < values[c].size()) {
        setting[n + coords[c]] = values[c][digit[c]];
        break;
      }
      digit[c] = 0;
      setting[n + coords[c]] = values[c][0];
    }
    if (c == static_cast<std::size_t>(-1)) return false;
  }
}

EdgeLabelledMechanisedGraph discover_impl(Run& run) {
  const InterventionalOracle& oracle = run.oracle;
  const std::size_t n = oracle.variable_count();
  std::vector<Node> nodes;
  for (std::size_t i = 0; i < n; ++i) nodes.push_back(Node::object(i));
  for (std::size_t i = 0; i < n; ++i) nodes.push_back(Node::mechanism(i));
  std::set<NodeEdge> edges;
  for (const Node& target : nodes) loo_target(run, target, nodes, edges);

  EdgeLabelledMechanisedGraph g;
  for (std::size_t i = 0; i < n; ++i) g.objects.push_back(oracle.variable_name(i));
  for (const auto& [w, v] : edges) {
    if (w.layer == Layer::object && v.layer == Layer::object) {
      g.e_obj.emplace(w.index, v.index);
    } else if (w.layer == Layer::mechanism && v.layer == Layer::mechanism) {
      g.e_mech.emplace(w.index, v.index);
    } else if (w.layer == Layer::mechanism) {
      g.e_func.emplace(w.index, v.index);
    } else {
      throw ShapeError("graph is not a mechanised SCM: object " + node_name(oracle, w) + " -> mechanism " +
                       node_name(oracle, v));
    }
  }
  g.validate();

  std::vector<std::set<std::size_t>> children(n);
  for (const auto& [a, b] : g.e_obj) children[a].insert(b);
  for (const auto& [w, v] : g.e_mech) {
    std::set<std::size_t> cut_w = children[w];
    cut_w.erase(v);
    if (!responds(run, v, w, cut_w, false, edges)) continue;
    if (responds(run, v, w, children[v], children[v].contains(w), edges)) continue;
    g.e_term.emplace(w, v);
  }
  g.validate();
  return g;
}

}  // namespace

std::set<NodeEdge> leave_one_out(const InterventionalOracle& oracle, std::span<const Node> nodes,
                                 const DiscoveryOptions& options, DiscoveryStats* stats) {
  Run run{oracle, options.budget};
  std::set<NodeEdge> edges;
  try {
    for (const Node& target : nodes) loo_target(run, target, nodes, edges);
  } catch (...) {
    if (stats) stats->probes += run.used;
    throw;
  }
  if (stats) stats->probes += run.used;
  return edges;
}

EdgeLabelledMechanisedGraph discover(const InterventionalOracle& oracle, const DiscoveryOptions& options,
                                     DiscoveryStats* stats) {
  Run run{oracle, options.budget};
  try {
    auto g = discover_impl(run);
    if (stats) stats->probes += run.used;
    return g;
  } catch (...) {
    if (stats) stats->probes += run.used;
    throw;
  }
}

GameGraph identify_agents(const EdgeLabelledMechanisedGraph& g) {
  g.validate();
  const std::size_t n = g.size();
  GameGraph out;
  out.nodes = g.objects;
  out.kinds.assign(n, NodeKind::chance);
  out.colours.resize(n);
  out.edges = g.e_obj;
  std::vector<bool> decision(n, false), utility(n, false);
  std::vector<std::vector<std::size_t>> adjacent(n);
  for (const auto& [w, v] : g.e_term) {
    decision[v] = true;
    utility[w] = true;
    adjacent[w].push_back(v);
    adjacent[v].push_back(w);
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (decision[v] && utility[v]) out.kinds[v] = NodeKind::decision_utility;
    else if (decision[v]) out.kinds[v] = NodeKind::decision;
    else if (utility[v]) out.kinds[v] = NodeKind::utility;
  }
  for (std::size_t start = 0; start < n; ++start) {
    if (out.kinds[start] == NodeKind::chance || !out.colours[start].empty()) continue;
    const std::size_t colour = out.colour_names.size();
    out.colour_names.push_back("agent" + std::to_string(colour + 1));
    std::deque<std::size_t> queue{start};
    out.colours[start].insert(colour);
    while (!queue.empty()) {
      const std::size_t u = queue.front();
      queue.pop_front();
      for (auto x : adjacent[u])
        if (out.colours[x].empty()) {
          out.colours[x].insert(colour);
          queue.push_back(x);
        }
    }
  }
  return out;
}

GameGraph discover_game(const InterventionalOracle& oracle, const DiscoveryOptions& options, DiscoveryStats* stats) {
  return identify_agents(discover(oracle, options, stats));
}

}  // namespace agentdisc
