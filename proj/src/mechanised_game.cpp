#include "agentdisc/mechanised_game.hpp"

#include <atomic>
#include <limits>
#include <mutex>

#include "agentdisc/errors.hpp"

namespace agentdisc {

struct MechanisedCausalGame::RulePool {
  std::mutex mutex;
  std::map<std::pair<std::size_t, std::vector<std::size_t>>, Cpt> rules;
};

namespace {

void check_shape(const ObjectGraph& g, std::size_t v, const Cpt& c, const std::string& what) {
  if (c.child() != g.name(v) || c.parents() != g.parent_names(v) || c.parent_sizes() != g.parent_sizes(v) ||
      c.child_size() != g.domain(v).size())
    throw ModelError(what + " for '" + g.name(v) + "' does not match its declared parents and domain");
}

bool contains(const std::vector<Cpt>& list, const Cpt& c) {
  for (const auto& x : list)
    if (x == c) return true;
  return false;
}

}  // namespace

MechanisedCausalGame::MechanisedCausalGame(CausalGame game, std::vector<MechanismSpec> mechanisms,
                                           std::string name, std::string description, std::size_t cpt_guard)
    : game_(std::move(game)),
      specs_(std::move(mechanisms)),
      name_(std::move(name)),
      description_(std::move(description)),
      pool_(std::make_shared<RulePool>()) {
  const ObjectGraph& g = game_.graph();
  const std::size_t n = g.size();
  if (specs_.empty()) specs_.resize(n);
  if (specs_.size() != n) throw ModelError("expected one mechanism section per variable");
  const auto domains = g.domain_map();
  vocab_.resize(n);
  candidate_counts_.resize(n);
  structural_.resize(n);
  full_rules_.assign(n, false);

  for (std::size_t v = 0; v < n; ++v) {
    const MechanismSpec& spec = specs_[v];
    for (const auto& c : spec.candidates) check_shape(g, v, c, "candidate mechanism");
    std::vector<Cpt> list;
    if (spec.restricted) {
      for (const auto& c : spec.candidates)
        if (!contains(list, c)) list.push_back(c);
      if (!game_.is_decision(v) && !contains(list, game_.cpt(v))) list.push_back(game_.cpt(v));
      if (list.empty()) throw ModelError("restricted mechanism of '" + g.name(v) + "' has no candidates");
    } else {
      list = enumerate_deterministic_cpts(g.name(v), g.parent_names(v), domains, cpt_guard);
      full_rules_[v] = game_.is_decision(v);
      if (!game_.is_decision(v) && !contains(list, game_.cpt(v))) list.push_back(game_.cpt(v));
      for (const auto& c : spec.candidates)
        if (!contains(list, c)) list.push_back(c);
    }
    candidate_counts_[v] = list.size();
    for (const auto& c : constant_cpts(g.name(v), g.parent_names(v), domains)) {
      std::size_t index = list.size();
      for (std::size_t i = 0; i < list.size(); ++i)
        if (list[i] == c) index = i;
      if (index == list.size()) list.push_back(c);
      structural_[v].push_back(static_cast<std::int32_t>(index));
    }
    vocab_[v] = std::move(list);

    if (!spec.dependencies.empty() && game_.is_decision(v))
      throw ModelError("decision '" + g.name(v) + "' cannot have mechanism dependencies");
    for (const auto& dc : spec.dependencies) {
      check_shape(g, v, dc.use, "dependency result");
      for (const auto& [w, cpt] : dc.when) {
        if (w >= n) throw ModelError("dependency of '" + g.name(v) + "' reads an unknown mechanism");
        if (w == v) throw ModelError("mechanism of '" + g.name(v) + "' cannot depend on itself");
        if (game_.is_decision(w))
          throw ModelError("dependency of '" + g.name(v) + "' reads decision mechanism '" + g.name(w) + "'");
        check_shape(g, w, cpt, "dependency condition");
      }
    }
  }
}

std::optional<std::size_t> MechanisedCausalGame::vocabulary_index(std::size_t v, const Cpt& cpt) const {
  const auto& list = vocab_.at(v);
  for (std::size_t i = 0; i < list.size(); ++i)
    if (list[i].same_storage(cpt)) return i;
  for (std::size_t i = 0; i < list.size(); ++i)
    if (list[i] == cpt) return i;
  return std::nullopt;
}

bool MechanisedCausalGame::restricted() const {
  for (const auto& s : specs_)
    if (s.restricted) return true;
  return false;
}

bool MechanisedCausalGame::has_dependencies() const {
  for (const auto& s : specs_)
    if (!s.dependencies.empty()) return true;
  return false;
}

Cpt MechanisedCausalGame::rule_cpt(std::size_t decision, const std::vector<std::size_t>& actions) const {
  const ObjectGraph& g = game_.graph();
  if (full_rules_[decision]) {
    const std::size_t m = g.domain(decision).size();
    std::size_t index = 0;
    for (auto a : actions) index = index * m + a;
    return vocab_[decision][index];
  }
  std::lock_guard lock(pool_->mutex);
  auto key = std::pair{decision, actions};
  auto it = pool_->rules.find(key);
  if (it != pool_->rules.end()) return it->second;
  Cpt made = Cpt::deterministic(g.name(decision), g.parent_names(decision), g.parent_sizes(decision),
                                g.domain(decision).size(), actions);
  for (const auto& c : vocab_[decision])
    if (c == made) {
      made = c;
      break;
    }
  return pool_->rules.emplace(std::move(key), made).first->second;
}

MechanismAssignment respond(const MechanisedCausalGame& model, std::span<const Cpt* const> interventions) {
  const CausalGame& game = model.game();
  const ObjectGraph& g = game.graph();
  const std::size_t n = g.size();
  if (interventions.size() != n) throw ModelError("expected one mechanism slot per variable");

  std::vector<const Cpt*> current(n, nullptr);
  std::vector<std::size_t> dependent;
  for (std::size_t v = 0; v < n; ++v) {
    if (interventions[v]) {
      current[v] = interventions[v];
    } else if (!game.is_decision(v)) {
      current[v] = &game.cpt(v);
      if (!model.spec(v).dependencies.empty()) dependent.push_back(v);
    }
  }

  if (!dependent.empty()) {
    std::size_t bound = 1;
    for (auto v : dependent) {
      const std::size_t c = model.candidate_count(v);
      bound = bound > std::numeric_limits<std::size_t>::max() / c ? std::numeric_limits<std::size_t>::max()
                                                                  : bound * c;
    }
    auto rule = [&](std::size_t v, const std::vector<const Cpt*>& cur) -> const Cpt* {
      for (const auto& dc : model.spec(v).dependencies) {
        bool match = true;
        for (const auto& [w, cpt] : dc.when)
          if (!(*cur[w] == cpt)) {
            match = false;
            break;
          }
        if (match) return &dc.use;
      }
      return &game.cpt(v);
    };
    for (std::size_t iteration = 0;; ++iteration) {
      std::vector<const Cpt*> next = current;
      bool changed = false;
      for (auto v : dependent) {
        next[v] = rule(v, current);
        if (!(*next[v] == *current[v])) changed = true;
      }
      current = std::move(next);
      if (!changed) break;
      if (iteration >= bound)
        throw FixedPointError("mechanism dependencies did not reach a fixed point within " +
                              std::to_string(bound) + " rounds");
    }
  }

  PolicyProfile profile;
  bool any_free = false;
  for (auto d : game.decisions()) any_free = any_free || current[d] == nullptr;
  if (any_free) profile = solve(game, std::span<const Cpt* const>(current), {});

  MechanismAssignment out;
  out.reserve(n);
  for (std::size_t v = 0; v < n; ++v) {
    if (current[v]) {
      out.push_back(*current[v]);
    } else {
      const DecisionRule* r = profile.find(v);
      out.push_back(model.rule_cpt(v, r->actions));
    }
  }
  (void)g;
  return out;
}

MechanismAssignment respond(const MechanisedCausalGame& model, const std::map<VariableId, Cpt>& mech_interventions) {
  const ObjectGraph& g = model.game().graph();
  std::vector<const Cpt*> slots(g.size(), nullptr);
  for (const auto& [name, cpt] : mech_interventions) {
    const std::size_t v = g.index_of(name);
    check_shape(g, v, cpt, "mechanism intervention");
    slots[v] = &cpt;
  }
  return respond(model, std::span<const Cpt* const>(slots));
}

OracleResponse query(const MechanisedCausalGame& model, const OracleQuery& q) {
  MechanismAssignment mechanisms = respond(model, q.mech_interventions);
  JointDistribution objects = joint_distribution(model.game().graph(), mechanisms, q.object_interventions);
  return {std::move(mechanisms), std::move(objects)};
}

std::map<VariableId, Cpt> mechanism_value_distribution(const MechanisedCausalGame& model, const OracleQuery& q) {
  MechanismAssignment mechanisms = respond(model, q.mech_interventions);
  std::map<VariableId, Cpt> out;
  for (std::size_t v = 0; v < mechanisms.size(); ++v) out.emplace(model.game().graph().name(v), mechanisms[v]);
  return out;
}

std::vector<Cpt> structural_interventions_for(const MechanisedCausalGame& model, const VariableId& v) {
  const ObjectGraph& g = model.game().graph();
  const std::size_t i = g.index_of(v);
  return constant_cpts(v, g.parent_names(i), g.domain_map());
}

namespace {
std::atomic<std::uint64_t> next_oracle_id{1};
}

GameOracle::GameOracle(const MechanisedCausalGame& model) : model_(model), id_(next_oracle_id++) {}

const MechanismAssignment& GameOracle::assignment(Setting setting) const {
  struct Cache {
    std::uint64_t owner = 0;
    std::vector<std::int32_t> key;
    MechanismAssignment value;
  };
  thread_local Cache cache;
  const std::size_t n = model_.size();
  const auto mech = setting.subspan(n, n);
  if (cache.owner == id_ && std::equal(mech.begin(), mech.end(), cache.key.begin(), cache.key.end()))
    return cache.value;
  std::vector<const Cpt*> slots(n, nullptr);
  for (std::size_t v = 0; v < n; ++v)
    if (mech[v] != kFree) slots[v] = &model_.vocabulary(v)[static_cast<std::size_t>(mech[v])];
  cache.value = respond(model_, std::span<const Cpt* const>(slots));
  cache.key.assign(mech.begin(), mech.end());
  cache.owner = id_;
  return cache.value;
}

Response GameOracle::probe(Node target, Setting setting) const {
  const std::size_t n = model_.size();
  if (setting.size() != 2 * n) throw ModelError("probe setting must cover every object and mechanism node");
  if (target.index >= n) throw ModelError("probe target out of range");
  for (std::size_t i = 0; i < 2 * n; ++i) {
    const std::int32_t s = setting[i];
    if (s == kFree) continue;
    const std::size_t limit = i < n ? outcome_count(i) : model_.vocabulary(i - n).size();
    if (s < 0 || static_cast<std::size_t>(s) >= limit) throw ModelError("probe setting out of range");
  }
  const std::size_t v = target.index;
  const ObjectGraph& g = model_.game().graph();

  if (target.layer == Layer::mechanism) {
    if (setting[n + v] != kFree) return Response(model_.vocabulary(v)[static_cast<std::size_t>(setting[n + v])]);
    return Response(assignment(setting)[v]);
  }

  if (setting[v] != kFree) return Response(Distribution::point(g.domain(v).size(), static_cast<std::size_t>(setting[v])));
  if (setting[n + v] != kFree) {
    bool parents_fixed = true;
    for (auto p : g.parents(v)) parents_fixed = parents_fixed && setting[p] != kFree;
    if (parents_fixed) {
      const Cpt& cpt = model_.vocabulary(v)[static_cast<std::size_t>(setting[n + v])];
      std::size_t row = 0;
      const auto& parents = g.parents(v);
      for (std::size_t i = 0; i < parents.size(); ++i)
        row = row * cpt.parent_sizes()[i] + static_cast<std::size_t>(setting[parents[i]]);
      return Response(cpt.row(row));
    }
  }
  const MechanismAssignment& mechanisms = assignment(setting);
  std::vector<const Cpt*> cpts(n);
  for (std::size_t i = 0; i < n; ++i) cpts[i] = &mechanisms[i];
  return Response(variable_marginal(g, std::span<const Cpt* const>(cpts), setting.subspan(0, n), v));
}

}  // namespace agentdisc
