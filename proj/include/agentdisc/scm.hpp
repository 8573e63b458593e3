#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "agentdisc/core.hpp"

namespace agentdisc {

// Object-level DAG. Validated on construction: unique names, known parents,
// no self-loops, no cycles.
class ObjectGraph {
 public:
  ObjectGraph() = default;
  ObjectGraph(std::vector<VariableId> variables, std::vector<Domain> domains,
              std::vector<std::vector<VariableId>> parents);

  std::size_t size() const noexcept { return names_.size(); }
  const VariableId& name(std::size_t v) const { return names_.at(v); }
  const std::vector<VariableId>& names() const noexcept { return names_; }
  const Domain& domain(std::size_t v) const { return domains_.at(v); }
  std::optional<std::size_t> find(std::string_view name) const;
  // Throws ModelError for unknown names.
  std::size_t index_of(std::string_view name) const;

  const std::vector<std::size_t>& parents(std::size_t v) const { return parents_.at(v); }
  const std::vector<std::size_t>& children(std::size_t v) const { return children_.at(v); }
  std::vector<VariableId> parent_names(std::size_t v) const;
  std::vector<std::size_t> parent_sizes(std::size_t v) const;
  const std::vector<std::size_t>& topological_order() const noexcept { return topo_; }
  std::map<VariableId, Domain> domain_map() const;

  // v itself plus everything with a directed path into it.
  std::vector<bool> ancestors_of(std::span<const std::size_t> targets) const;
  std::vector<bool> descendants_of(std::size_t v) const;

 private:
  std::vector<VariableId> names_;
  std::vector<Domain> domains_;
  std::vector<std::vector<std::size_t>> parents_;
  std::vector<std::vector<std::size_t>> children_;
  std::vector<std::size_t> topo_;
  std::map<VariableId, std::size_t, std::less<>> index_;
};

// Replaces the CPT of `target`. A constant CPT is a hard do(); anything else
// is a soft intervention. The replacement's parents must be a subset of the
// target's declared parents.
struct Intervention {
  VariableId target;
  Cpt replacement;

  static Intervention hard(const ObjectGraph& graph, const VariableId& target, std::size_t outcome);
};

// Exact joint distribution over a list of variables. Zero-mass entries are
// not stored.
class JointDistribution {
 public:
  using Entries = std::map<std::vector<std::size_t>, Rational>;

  JointDistribution(std::vector<VariableId> variables, std::vector<std::size_t> sizes, Entries mass);

  const std::vector<VariableId>& variables() const noexcept { return variables_; }
  const std::vector<std::size_t>& sizes() const noexcept { return sizes_; }
  const Entries& entries() const noexcept { return mass_; }
  std::optional<std::size_t> position(std::string_view variable) const;

  // Probability of a partial assignment.
  Rational probability(const Assignment& event) const;
  Rational probability(const std::vector<std::size_t>& outcomes) const;
  // Single-variable marginal.
  Distribution distribution_of(std::string_view variable) const;

  friend bool operator==(const JointDistribution&, const JointDistribution&) = default;

 private:
  std::vector<VariableId> variables_;
  std::vector<std::size_t> sizes_;
  Entries mass_;
};

// Product-form joint in topological order with intervened CPTs substituted
// first. `cpts[v]` is the CPT of graph variable v.
JointDistribution joint_distribution(const ObjectGraph& graph, const std::vector<Cpt>& cpts,
                                     const std::vector<Intervention>& interventions = {});

JointDistribution marginal(const JointDistribution& joint, const std::vector<VariableId>& keep);

// nullopt when P(given) = 0.
std::optional<Distribution> conditional(const JointDistribution& joint, const VariableId& target,
                                        const Assignment& given);

// Marginal of one variable, enumerating only its ancestors.
Distribution variable_marginal(const ObjectGraph& graph, const std::vector<Cpt>& cpts,
                               const std::vector<Intervention>& interventions, std::size_t target);

// Lower-level form: cpts[v] uses the graph's parents; hard[v] >= 0 fixes v.
Distribution variable_marginal(const ObjectGraph& graph, std::span<const Cpt* const> cpts,
                               std::span<const std::int32_t> hard, std::size_t target);

}  // namespace agentdisc
