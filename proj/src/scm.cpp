#include "agentdisc/scm.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "agentdisc/errors.hpp"

namespace agentdisc {

ObjectGraph::ObjectGraph(std::vector<VariableId> variables, std::vector<Domain> domains,
                         std::vector<std::vector<VariableId>> parents)
    : names_(std::move(variables)), domains_(std::move(domains)) {
  if (domains_.size() != names_.size() || parents.size() != names_.size())
    throw ModelError("object graph: variables, domains and parent lists differ in length");
  for (std::size_t v = 0; v < names_.size(); ++v) {
    if (names_[v].empty()) throw ModelError("object graph: empty variable name");
    if (!index_.emplace(names_[v], v).second)
      throw ModelError("object graph: duplicate variable '" + names_[v] + "'");
  }
  parents_.resize(names_.size());
  children_.resize(names_.size());
  for (std::size_t v = 0; v < names_.size(); ++v) {
    std::set<std::size_t> seen;
    for (const auto& p : parents[v]) {
      auto it = index_.find(p);
      if (it == index_.end())
        throw ModelError("variable '" + names_[v] + "' has unknown parent '" + p + "'");
      if (it->second == v) throw ModelError("variable '" + names_[v] + "' is its own parent");
      if (!seen.insert(it->second).second)
        throw ModelError("variable '" + names_[v] + "' lists parent '" + p + "' twice");
      parents_[v].push_back(it->second);
      children_[it->second].push_back(v);
    }
  }
  // Kahn's algorithm, smallest declared index first for a stable order.
  std::vector<std::size_t> indegree(names_.size());
  for (std::size_t v = 0; v < names_.size(); ++v) indegree[v] = parents_[v].size();
  std::set<std::size_t> ready;
  for (std::size_t v = 0; v < names_.size(); ++v)
    if (indegree[v] == 0) ready.insert(v);
  while (!ready.empty()) {
    std::size_t v = *ready.begin();
    ready.erase(ready.begin());
    topo_.push_back(v);
    for (auto c : children_[v])
      if (--indegree[c] == 0) ready.insert(c);
  }
  if (topo_.size() != names_.size()) {
    for (std::size_t v = 0; v < names_.size(); ++v)
      if (indegree[v] != 0) throw ModelError("cycle detected through variable '" + names_[v] + "'");
  }
}

std::optional<std::size_t> ObjectGraph::find(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t ObjectGraph::index_of(std::string_view name) const {
  auto found = find(name);
  if (!found) throw ModelError("unknown variable '" + std::string(name) + "'");
  return *found;
}

std::vector<VariableId> ObjectGraph::parent_names(std::size_t v) const {
  std::vector<VariableId> out;
  for (auto p : parents_.at(v)) out.push_back(names_[p]);
  return out;
}

std::vector<std::size_t> ObjectGraph::parent_sizes(std::size_t v) const {
  std::vector<std::size_t> out;
  for (auto p : parents_.at(v)) out.push_back(domains_[p].size());
  return out;
}

std::map<VariableId, Domain> ObjectGraph::domain_map() const {
  std::map<VariableId, Domain> out;
  for (std::size_t v = 0; v < names_.size(); ++v) out.emplace(names_[v], domains_[v]);
  return out;
}

std::vector<bool> ObjectGraph::ancestors_of(std::span<const std::size_t> targets) const {
  std::vector<bool> mark(names_.size(), false);
  std::vector<std::size_t> stack(targets.begin(), targets.end());
  while (!stack.empty()) {
    std::size_t v = stack.back();
    stack.pop_back();
    if (mark[v]) continue;
    mark[v] = true;
    for (auto p : parents_[v]) stack.push_back(p);
  }
  return mark;
}

std::vector<bool> ObjectGraph::descendants_of(std::size_t v) const {
  std::vector<bool> mark(names_.size(), false);
  std::vector<std::size_t> stack{v};
  while (!stack.empty()) {
    std::size_t u = stack.back();
    stack.pop_back();
    if (mark[u]) continue;
    mark[u] = true;
    for (auto c : children_[u]) stack.push_back(c);
  }
  return mark;
}

Intervention Intervention::hard(const ObjectGraph& graph, const VariableId& target, std::size_t outcome) {
  const std::size_t v = graph.index_of(target);
  const std::size_t size = graph.domain(v).size();
  if (outcome >= size) throw ModelError("outcome out of range for '" + target + "'");
  return Intervention{target, Cpt::constant(target, {}, {}, Distribution::point(size, outcome))};
}

JointDistribution::JointDistribution(std::vector<VariableId> variables, std::vector<std::size_t> sizes,
                                     Entries mass)
    : variables_(std::move(variables)), sizes_(std::move(sizes)) {
  if (variables_.size() != sizes_.size())
    throw std::invalid_argument("joint distribution: variables and sizes differ in length");
  Rational total = 0;
  for (auto& [outcomes, m] : mass) {
    if (outcomes.size() != variables_.size())
      throw std::invalid_argument("joint distribution: entry of the wrong width");
    for (std::size_t i = 0; i < outcomes.size(); ++i)
      if (outcomes[i] >= sizes_[i]) throw std::invalid_argument("joint distribution: outcome out of range");
    if (m < 0) throw std::invalid_argument("joint distribution: negative mass");
    total += m;
    if (m != 0) mass_.emplace(outcomes, m);
  }
  if (total != 1) throw std::invalid_argument("joint distribution sums to " + to_string(total));
}

std::optional<std::size_t> JointDistribution::position(std::string_view variable) const {
  for (std::size_t i = 0; i < variables_.size(); ++i)
    if (variables_[i] == variable) return i;
  return std::nullopt;
}

Rational JointDistribution::probability(const Assignment& event) const {
  std::vector<std::pair<std::size_t, std::size_t>> fixed;
  for (const auto& [name, outcome] : event) {
    auto pos = position(name);
    if (!pos) throw ModelError("unknown variable '" + name + "' in event");
    fixed.emplace_back(*pos, outcome);
  }
  Rational total = 0;
  for (const auto& [outcomes, m] : mass_) {
    bool match = true;
    for (auto [pos, o] : fixed)
      if (outcomes[pos] != o) match = false;
    if (match) total += m;
  }
  return total;
}

Rational JointDistribution::probability(const std::vector<std::size_t>& outcomes) const {
  auto it = mass_.find(outcomes);
  return it == mass_.end() ? Rational(0) : it->second;
}

Distribution JointDistribution::distribution_of(std::string_view variable) const {
  auto pos = position(variable);
  if (!pos) throw ModelError("unknown variable '" + std::string(variable) + "'");
  std::vector<Rational> mass(sizes_[*pos], Rational(0));
  for (const auto& [outcomes, m] : mass_) mass[outcomes[*pos]] += m;
  return Distribution(std::move(mass));
}

namespace {

struct Factor {
  const Cpt* cpt = nullptr;
  std::vector<std::size_t> parents;
  std::int32_t fixed = -1;
};

std::vector<Factor> resolve(const ObjectGraph& graph, const std::vector<Cpt>& cpts,
                            const std::vector<Intervention>& interventions) {
  if (cpts.size() != graph.size())
    throw ModelError("expected " + std::to_string(graph.size()) + " CPTs, got " +
                     std::to_string(cpts.size()));
  std::vector<Factor> factors(graph.size());
  auto bind = [&](std::size_t v, const Cpt& cpt, bool replacement) {
    const auto& declared = graph.parents(v);
    if (cpt.child() != graph.name(v))
      throw ModelError("CPT for '" + cpt.child() + "' supplied for variable '" + graph.name(v) + "'");
    if (cpt.child_size() != graph.domain(v).size())
      throw ModelError("CPT for '" + graph.name(v) + "' has the wrong number of outcomes");
    if (!replacement && cpt.parents().size() != declared.size())
      throw ModelError("CPT for '" + graph.name(v) + "' does not match the declared parents");
    Factor f;
    f.cpt = &cpt;
    for (std::size_t i = 0; i < cpt.parents().size(); ++i) {
      auto p = graph.find(cpt.parents()[i]);
      if (!p || std::find(declared.begin(), declared.end(), *p) == declared.end())
        throw ModelError("CPT for '" + graph.name(v) + "' uses '" + cpt.parents()[i] +
                         "', which is not a declared parent");
      if (graph.domain(*p).size() != cpt.parent_sizes()[i])
        throw ModelError("CPT for '" + graph.name(v) + "' has the wrong size for parent '" +
                         cpt.parents()[i] + "'");
      f.parents.push_back(*p);
    }
    factors[v] = std::move(f);
  };
  for (std::size_t v = 0; v < graph.size(); ++v) bind(v, cpts[v], false);
  std::set<std::size_t> seen;
  for (const auto& iv : interventions) {
    const std::size_t v = graph.index_of(iv.target);
    if (!seen.insert(v).second) throw ModelError("two interventions on '" + iv.target + "'");
    bind(v, iv.replacement, true);
  }
  return factors;
}

// Depth-first product-form enumeration over `order`, skipping zero mass.
template <class Leaf>
void enumerate(const std::vector<Factor>& factors, const std::vector<std::size_t>& order,
               std::vector<std::size_t>& values, Leaf&& leaf) {
  std::vector<std::size_t> scratch;
  std::function<void(std::size_t, const Rational&)> step = [&](std::size_t pos, const Rational& w) {
    if (pos == order.size()) {
      leaf(w);
      return;
    }
    const std::size_t v = order[pos];
    const Factor& f = factors[v];
    if (f.fixed >= 0) {
      values[v] = static_cast<std::size_t>(f.fixed);
      step(pos + 1, w);
      return;
    }
    std::size_t row = 0;
    const auto& sizes = f.cpt->parent_sizes();
    for (std::size_t i = 0; i < f.parents.size(); ++i) row = row * sizes[i] + values[f.parents[i]];
    const Distribution& d = f.cpt->row(row);
    for (std::size_t o = 0; o < d.size(); ++o) {
      if (d[o] == 0) continue;
      values[v] = o;
      if (d[o] == 1)
        step(pos + 1, w);
      else
        step(pos + 1, Rational(w * d[o]));
    }
  };
  step(0, Rational(1));
}

}  // namespace

JointDistribution joint_distribution(const ObjectGraph& graph, const std::vector<Cpt>& cpts,
                                     const std::vector<Intervention>& interventions) {
  const auto factors = resolve(graph, cpts, interventions);
  std::vector<std::size_t> sizes;
  for (std::size_t v = 0; v < graph.size(); ++v) sizes.push_back(graph.domain(v).size());
  std::vector<std::size_t> values(graph.size(), 0);
  JointDistribution::Entries mass;
  enumerate(factors, graph.topological_order(), values,
            [&](const Rational& w) { mass[values] += w; });
  return JointDistribution(graph.names(), std::move(sizes), std::move(mass));
}

JointDistribution marginal(const JointDistribution& joint, const std::vector<VariableId>& keep) {
  std::vector<std::size_t> positions;
  std::vector<std::size_t> sizes;
  for (const auto& k : keep) {
    auto pos = joint.position(k);
    if (!pos) throw ModelError("unknown variable '" + k + "' in marginal");
    positions.push_back(*pos);
    sizes.push_back(joint.sizes()[*pos]);
  }
  JointDistribution::Entries mass;
  std::vector<std::size_t> key(positions.size());
  for (const auto& [outcomes, m] : joint.entries()) {
    for (std::size_t i = 0; i < positions.size(); ++i) key[i] = outcomes[positions[i]];
    mass[key] += m;
  }
  return JointDistribution(keep, std::move(sizes), std::move(mass));
}

std::optional<Distribution> conditional(const JointDistribution& joint, const VariableId& target,
                                        const Assignment& given) {
  auto t = joint.position(target);
  if (!t) throw ModelError("unknown variable '" + target + "' in conditional");
  if (given.count(target)) throw ModelError("conditioning on the target '" + target + "'");
  std::vector<std::pair<std::size_t, std::size_t>> fixed;
  for (const auto& [name, outcome] : given) {
    auto pos = joint.position(name);
    if (!pos) throw ModelError("unknown variable '" + name + "' in evidence");
    fixed.emplace_back(*pos, outcome);
  }
  std::vector<Rational> mass(joint.sizes()[*t], Rational(0));
  Rational evidence = 0;
  for (const auto& [outcomes, m] : joint.entries()) {
    bool match = true;
    for (auto [pos, o] : fixed)
      if (outcomes[pos] != o) match = false;
    if (!match) continue;
    evidence += m;
    mass[outcomes[*t]] += m;
  }
  if (evidence == 0) return std::nullopt;
  for (auto& m : mass) m /= evidence;
  return Distribution(std::move(mass));
}

namespace {

Distribution enumerate_marginal(const ObjectGraph& graph, const std::vector<Factor>& factors,
                                std::size_t target) {
  // Ancestors of the target in the graph after substitution.
  std::vector<bool> needed(graph.size(), false);
  std::vector<std::size_t> stack{target};
  while (!stack.empty()) {
    std::size_t v = stack.back();
    stack.pop_back();
    if (needed[v]) continue;
    needed[v] = true;
    if (factors[v].fixed < 0)
      for (auto p : factors[v].parents) stack.push_back(p);
  }
  std::vector<std::size_t> order;
  for (auto v : graph.topological_order())
    if (needed[v]) order.push_back(v);
  const Factor& t = factors[target];
  if (t.fixed >= 0) return Distribution::point(graph.domain(target).size(), static_cast<std::size_t>(t.fixed));
  if (order.size() == 1) return t.cpt->row(0);

  std::vector<std::size_t> values(graph.size(), 0);
  std::vector<Rational> mass(graph.domain(target).size(), Rational(0));
  enumerate(factors, order, values, [&](const Rational& w) { mass[values[target]] += w; });
  return Distribution(std::move(mass));
}

}  // namespace

Distribution variable_marginal(const ObjectGraph& graph, const std::vector<Cpt>& cpts,
                               const std::vector<Intervention>& interventions, std::size_t target) {
  if (target >= graph.size()) throw ModelError("variable index out of range");
  return enumerate_marginal(graph, resolve(graph, cpts, interventions), target);
}

Distribution variable_marginal(const ObjectGraph& graph, std::span<const Cpt* const> cpts,
                               std::span<const std::int32_t> hard, std::size_t target) {
  std::vector<Factor> factors(graph.size());
  for (std::size_t v = 0; v < graph.size(); ++v) {
    factors[v].cpt = cpts[v];
    factors[v].parents = graph.parents(v);
    factors[v].fixed = hard.empty() ? -1 : hard[v];
  }
  const Factor& t = factors[target];
  if (t.fixed < 0) {
    bool all_fixed = true;
    for (auto p : t.parents) all_fixed = all_fixed && factors[p].fixed >= 0;
    if (all_fixed) {
      std::size_t row = 0;
      const auto& sizes = t.cpt->parent_sizes();
      for (std::size_t i = 0; i < t.parents.size(); ++i)
        row = row * sizes[i] + static_cast<std::size_t>(factors[t.parents[i]].fixed);
      return t.cpt->row(row);
    }
  }
  return enumerate_marginal(graph, factors, target);
}

}  // namespace agentdisc
