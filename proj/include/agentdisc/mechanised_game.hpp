#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "agentdisc/core.hpp"
#include "agentdisc/game.hpp"
#include "agentdisc/interventional_oracle.hpp"
#include "agentdisc/scm.hpp"

namespace agentdisc {

// One dependency rule for a non-decision mechanism: when every listed
// mechanism currently equals the given CPT, the dependent mechanism takes
// `use`. Rules are tried in order; no match means the declared CPT.
struct DependencyCase {
  std::vector<std::pair<std::size_t, Cpt>> when;
  Cpt use;
};

struct MechanismSpec {
  // Restricted: `candidates` is the whole candidate set (the declared CPT is
  // added if missing). Otherwise the candidates are every deterministic CPT,
  // then the declared CPT, then `candidates` as extras.
  bool restricted = false;
  std::vector<Cpt> candidates;
  std::vector<DependencyCase> dependencies;
};

class MechanisedCausalGame {
 public:
  MechanisedCausalGame(CausalGame game, std::vector<MechanismSpec> mechanisms, std::string name = {},
                       std::string description = {}, std::size_t cpt_guard = kDefaultCptGuard);

  const CausalGame& game() const noexcept { return game_; }
  const std::string& name() const noexcept { return name_; }
  const std::string& description() const noexcept { return description_; }
  std::size_t size() const noexcept { return game_.size(); }

  const MechanismSpec& spec(std::size_t v) const { return specs_.at(v); }
  // Candidates first, then any structural settings not already among them.
  const std::vector<Cpt>& vocabulary(std::size_t v) const { return vocab_.at(v); }
  std::size_t candidate_count(std::size_t v) const { return candidate_counts_.at(v); }
  const std::vector<std::int32_t>& structural_settings(std::size_t v) const { return structural_.at(v); }
  std::optional<std::size_t> vocabulary_index(std::size_t v, const Cpt& cpt) const;
  bool restricted() const;
  bool has_dependencies() const;

  // Canonical CPT object for a solved decision rule.
  Cpt rule_cpt(std::size_t decision, const std::vector<std::size_t>& actions) const;

 private:
  CausalGame game_;
  std::vector<MechanismSpec> specs_;
  std::string name_;
  std::string description_;
  std::vector<std::vector<Cpt>> vocab_;
  std::vector<std::size_t> candidate_counts_;
  std::vector<std::vector<std::int32_t>> structural_;
  std::vector<bool> full_rules_;
  struct RulePool;
  std::shared_ptr<RulePool> pool_;
};

// Mechanism value per variable, in variable order.
using MechanismAssignment = std::vector<Cpt>;

struct OracleQuery {
  std::map<VariableId, Cpt> mech_interventions;
  std::vector<Intervention> object_interventions;
};

struct OracleResponse {
  MechanismAssignment mechanisms;  // point mass
  JointDistribution objects;
};

// Intervened mechanisms verbatim; other non-decision mechanisms by their
// dependency rules iterated to a fixed point; other decisions by solve().
MechanismAssignment respond(const MechanisedCausalGame& model, const std::map<VariableId, Cpt>& mech_interventions);
MechanismAssignment respond(const MechanisedCausalGame& model, std::span<const Cpt* const> mech_interventions);

OracleResponse query(const MechanisedCausalGame& model, const OracleQuery& q);

std::map<VariableId, Cpt> mechanism_value_distribution(const MechanisedCausalGame& model, const OracleQuery& q);

// Constant CPTs of v: the structural mechanism interventions.
std::vector<Cpt> structural_interventions_for(const MechanisedCausalGame& model, const VariableId& v);

// Serves a mechanised game through the interventional-oracle interface.
class GameOracle final : public InterventionalOracle {
 public:
  explicit GameOracle(const MechanisedCausalGame& model);
  explicit GameOracle(MechanisedCausalGame&&) = delete;

  std::size_t variable_count() const override { return model_.size(); }
  const std::string& variable_name(std::size_t v) const override { return model_.game().graph().name(v); }
  std::size_t outcome_count(std::size_t v) const override { return model_.game().graph().domain(v).size(); }
  std::size_t candidate_count(std::size_t v) const override { return model_.candidate_count(v); }
  std::vector<std::int32_t> structural_settings(std::size_t v) const override {
    return model_.structural_settings(v);
  }
  Response probe(Node target, Setting setting) const override;

  const MechanisedCausalGame& model() const noexcept { return model_; }

 private:
  const MechanismAssignment& assignment(Setting setting) const;

  const MechanisedCausalGame& model_;
  std::uint64_t id_;
};

}  // namespace agentdisc
