#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "agentdisc/core.hpp"
#include "agentdisc/scm.hpp"

namespace agentdisc {

enum class VariableKind { chance, decision, utility };

std::string to_string(VariableKind kind);

struct VariableSpec {
  VariableId name;
  Domain domain = Domain::binary();
  std::vector<VariableId> parents;  // for a decision: its observations
  VariableKind kind = VariableKind::chance;
  std::vector<std::string> agents;  // one owner for a decision; one or more for a utility
  std::optional<Cpt> cpt;           // required unless the variable is a decision
  std::vector<Rational> values;     // utility value per outcome
};

// Finite causal game: an object graph whose variables are chance nodes,
// decisions owned by one agent, or utilities owned by one or more agents.
class CausalGame {
 public:
  CausalGame(std::vector<std::string> agents, std::vector<VariableSpec> variables);

  const std::vector<std::string>& agents() const noexcept { return agents_; }
  std::size_t agent_index(std::string_view agent) const;
  const ObjectGraph& graph() const noexcept { return graph_; }
  std::size_t size() const noexcept { return graph_.size(); }
  const std::vector<VariableSpec>& specs() const noexcept { return specs_; }

  VariableKind kind(std::size_t v) const { return specs_.at(v).kind; }
  bool is_decision(std::size_t v) const { return kind(v) == VariableKind::decision; }
  bool is_utility(std::size_t v) const { return kind(v) == VariableKind::utility; }
  const std::vector<std::size_t>& owners(std::size_t v) const { return owners_.at(v); }
  // Declared CPT; throws ModelError for decisions.
  const Cpt& cpt(std::size_t v) const;
  const std::vector<Rational>& utility_values(std::size_t v) const { return specs_.at(v).values; }

  const std::vector<std::size_t>& decisions() const noexcept { return decisions_; }
  const std::vector<std::size_t>& utilities() const noexcept { return utilities_; }
  std::vector<std::size_t> utilities_of(std::size_t agent) const;
  std::size_t context_count(std::size_t decision) const;

 private:
  std::vector<std::string> agents_;
  std::vector<VariableSpec> specs_;
  ObjectGraph graph_;
  std::vector<std::vector<std::size_t>> owners_;
  std::vector<std::size_t> decisions_;
  std::vector<std::size_t> utilities_;
};

// Deterministic decision rule: one action per context, contexts in mixed
// radix over the decision's observations (first observation most significant).
struct DecisionRule {
  std::size_t decision = 0;
  std::vector<std::size_t> actions;

  Cpt to_cpt(const CausalGame& game) const;
  friend bool operator==(const DecisionRule&, const DecisionRule&) = default;
};

struct PolicyProfile {
  std::vector<DecisionRule> rules;  // sorted by decision index

  const DecisionRule* find(std::size_t decision) const;
  friend bool operator==(const PolicyProfile&, const PolicyProfile&) = default;
};

// Context index of an assignment to the decision's observations.
std::size_t context_index(const CausalGame& game, std::size_t decision, const Assignment& context);

std::pair<ObjectGraph, std::vector<Cpt>> induced_scm(const CausalGame& game, const PolicyProfile& profile);

Rational expected_utility(const CausalGame& game, const PolicyProfile& profile, std::size_t agent,
                          const std::vector<Intervention>& interventions = {});

// Actions maximising the owner's expected downstream utility in `context`,
// other rules held fixed. A context of probability zero is scored by the
// trembling-hand limit (rows mixed with epsilon-uniform, epsilon -> 0); if it
// stays unreachable every action is returned.
std::vector<std::size_t> best_response_in_context(const CausalGame& game, const PolicyProfile& profile,
                                                  std::size_t decision, std::size_t context,
                                                  const std::vector<Intervention>& interventions = {});

struct SolveOptions {
  std::size_t profile_guard = 10'000'000;
};

// Lexicographically first profile in which every rule picks the first best
// response in every context.
PolicyProfile solve(const CausalGame& game, const std::vector<Intervention>& interventions = {},
                    const SolveOptions& options = {});

// Same, with mechanisms[v] standing in for the CPT of every non-decision v.
// A non-null entry for a decision fixes it; only null decisions are solved.
PolicyProfile solve(const CausalGame& game, std::span<const Cpt* const> mechanisms,
                    const std::vector<Intervention>& interventions, const SolveOptions& options = {});

}  // namespace agentdisc
