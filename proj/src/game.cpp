#include "agentdisc/game.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include "agentdisc/errors.hpp"

namespace agentdisc {

std::string to_string(VariableKind kind) {
  switch (kind) {
    case VariableKind::chance: return "chance";
    case VariableKind::decision: return "decision";
    case VariableKind::utility: return "utility";
  }
  return "?";
}

namespace {

ObjectGraph build_graph(const std::vector<VariableSpec>& specs) {
  std::vector<VariableId> names;
  std::vector<Domain> domains;
  std::vector<std::vector<VariableId>> parents;
  for (const auto& s : specs) {
    names.push_back(s.name);
    domains.push_back(s.domain);
    parents.push_back(s.parents);
  }
  return ObjectGraph(std::move(names), std::move(domains), std::move(parents));
}

}  // namespace

CausalGame::CausalGame(std::vector<std::string> agents, std::vector<VariableSpec> variables)
    : agents_(std::move(agents)), specs_(std::move(variables)), graph_(build_graph(specs_)) {
  std::set<std::string> seen;
  for (const auto& a : agents_) {
    if (a.empty()) throw ModelError("agent names must be non-empty");
    if (!seen.insert(a).second) throw ModelError("duplicate agent '" + a + "'");
  }
  owners_.resize(specs_.size());
  for (std::size_t v = 0; v < specs_.size(); ++v) {
    const auto& s = specs_[v];
    std::set<std::size_t> owner_set;
    for (const auto& a : s.agents) {
      auto it = std::find(agents_.begin(), agents_.end(), a);
      if (it == agents_.end()) throw ModelError("variable '" + s.name + "' names unknown agent '" + a + "'");
      if (!owner_set.insert(static_cast<std::size_t>(it - agents_.begin())).second)
        throw ModelError("variable '" + s.name + "' lists agent '" + a + "' twice");
    }
    owners_[v].assign(owner_set.begin(), owner_set.end());
    switch (s.kind) {
      case VariableKind::decision:
        if (owners_[v].size() != 1) throw ModelError("decision '" + s.name + "' must have exactly one agent");
        if (s.cpt) throw ModelError("decision '" + s.name + "' must not have a CPT");
        if (!s.values.empty()) throw ModelError("decision '" + s.name + "' must not have utility values");
        decisions_.push_back(v);
        break;
      case VariableKind::chance:
        if (!owners_[v].empty()) throw ModelError("chance variable '" + s.name + "' must not have an agent");
        if (!s.values.empty()) throw ModelError("chance variable '" + s.name + "' must not have utility values");
        break;
      case VariableKind::utility:
        if (owners_[v].empty()) throw ModelError("utility '" + s.name + "' needs at least one agent");
        if (s.values.size() != s.domain.size())
          throw ModelError("utility '" + s.name + "' needs one value per outcome");
        utilities_.push_back(v);
        break;
    }
    if (s.kind != VariableKind::decision) {
      if (!s.cpt) throw ModelError("variable '" + s.name + "' has no CPT");
      const Cpt& c = *s.cpt;
      if (c.child() != s.name || c.parents() != s.parents || c.parent_sizes() != graph_.parent_sizes(v) ||
          c.child_size() != s.domain.size())
        throw ModelError("CPT of '" + s.name + "' does not match its declared parents and domain");
    }
  }
}

std::size_t CausalGame::agent_index(std::string_view agent) const {
  for (std::size_t i = 0; i < agents_.size(); ++i)
    if (agents_[i] == agent) return i;
  throw ModelError("unknown agent '" + std::string(agent) + "'");
}

const Cpt& CausalGame::cpt(std::size_t v) const {
  const auto& s = specs_.at(v);
  if (!s.cpt) throw ModelError("decision '" + s.name + "' has no CPT");
  return *s.cpt;
}

std::vector<std::size_t> CausalGame::utilities_of(std::size_t agent) const {
  std::vector<std::size_t> out;
  for (auto u : utilities_) {
    const auto& o = owners_[u];
    if (std::find(o.begin(), o.end(), agent) != o.end()) out.push_back(u);
  }
  return out;
}

std::size_t CausalGame::context_count(std::size_t decision) const {
  return product_of(graph_.parent_sizes(decision));
}

Cpt DecisionRule::to_cpt(const CausalGame& game) const {
  const auto& g = game.graph();
  return Cpt::deterministic(g.name(decision), g.parent_names(decision), g.parent_sizes(decision),
                            g.domain(decision).size(), actions);
}

const DecisionRule* PolicyProfile::find(std::size_t decision) const {
  for (const auto& r : rules)
    if (r.decision == decision) return &r;
  return nullptr;
}

std::size_t context_index(const CausalGame& game, std::size_t decision, const Assignment& context) {
  const auto& g = game.graph();
  std::size_t index = 0;
  if (context.size() != g.parents(decision).size())
    throw ModelError("context for '" + g.name(decision) + "' must bind exactly its observations");
  for (auto p : g.parents(decision)) {
    auto it = context.find(g.name(p));
    if (it == context.end()) throw ModelError("context is missing observation '" + g.name(p) + "'");
    if (it->second >= g.domain(p).size()) throw ModelError("context outcome out of range for '" + g.name(p) + "'");
    index = index * g.domain(p).size() + it->second;
  }
  return index;
}

namespace {

// Truncated polynomial in epsilon.
using Poly = std::vector<Rational>;

struct Source {
  const Cpt* cpt = nullptr;
  const std::vector<std::size_t>* actions = nullptr;
  std::vector<std::size_t> parents;
  std::vector<std::size_t> parent_sizes;
  std::size_t size = 0;
  bool perturb = true;
  bool intervened = false;
};

class Evaluator {
 public:
  Evaluator(const CausalGame& game, std::span<const Cpt* const> mechanisms,
            const std::vector<Intervention>& interventions)
      : game_(game), graph_(game.graph()), interventions_(interventions) {
    const std::size_t n = graph_.size();
    if (!mechanisms.empty() && mechanisms.size() != n)
      throw ModelError("expected one mechanism per variable");
    sources_.resize(n);
    for (std::size_t v = 0; v < n; ++v) {
      Source& s = sources_[v];
      s.size = graph_.domain(v).size();
      s.parents = graph_.parents(v);
      s.parent_sizes = graph_.parent_sizes(v);
      const Cpt* m = mechanisms.empty() ? nullptr : mechanisms[v];
      if (!game.is_decision(v)) {
        s.cpt = m ? m : &game.cpt(v);
      } else if (m) {
        s.cpt = m;
      }
      if (s.cpt) check(v, *s.cpt, false);
    }
    std::set<std::size_t> seen;
    for (const auto& iv : interventions_) {
      const std::size_t v = graph_.index_of(iv.target);
      if (!seen.insert(v).second) throw ModelError("two interventions on '" + iv.target + "'");
      Source& s = sources_[v];
      check(v, iv.replacement, true);
      s.cpt = &iv.replacement;
      s.actions = nullptr;
      s.parents.clear();
      s.parent_sizes = iv.replacement.parent_sizes();
      for (const auto& p : iv.replacement.parents()) s.parents.push_back(graph_.index_of(p));
      s.perturb = false;
      s.intervened = true;
    }
  }


  void set_rule(std::size_t d, const std::vector<std::size_t>* actions) {
    if (sources_[d].intervened) return;
    sources_[d].actions = actions;
  }

  // Argmax action set for every context of decision d.
  std::vector<std::vector<std::size_t>> argmax_sets(std::size_t d) const {
    const std::size_t contexts = game_.context_count(d);
    const std::size_t actions = graph_.domain(d).size();
    std::vector<std::size_t> everything(actions);
    for (std::size_t a = 0; a < actions; ++a) everything[a] = a;
    std::vector<std::vector<std::size_t>> out(contexts, everything);

    const std::vector<std::size_t> utils = downstream_utilities(d);
    if (utils.empty() || sources_[d].intervened) return out;

    Setup st = setup(d, utils);
    std::vector<std::vector<Rational>> score(contexts, std::vector<Rational>(actions, Rational(0)));
    std::vector<Rational> reach(contexts, Rational(0));
    for (std::size_t a = 0; a < actions; ++a) exact_pass(st, a, a == 0 ? &reach : nullptr, score);

    for (std::size_t c = 0; c < contexts; ++c) {
      if (reach[c] == 0 && !tremble_scores(st, c, score[c])) continue;
      out[c] = argmax(score[c]);
    }
    return out;
  }

  std::vector<std::size_t> first_best_rule(std::size_t d) const {
    auto sets = argmax_sets(d);
    std::vector<std::size_t> rule(sets.size());
    for (std::size_t c = 0; c < sets.size(); ++c) rule[c] = sets[c].front();
    return rule;
  }

 private:
  struct Setup {
    std::size_t decision;
    std::vector<std::size_t> order;
    std::vector<std::size_t> observations;
    std::vector<std::size_t> utilities;
  };

  void check(std::size_t v, const Cpt& c, bool replacement) const {
    if (c.child() != graph_.name(v) || c.child_size() != graph_.domain(v).size())
      throw ModelError("mechanism for '" + graph_.name(v) + "' has the wrong child or domain");
    if (!replacement && c.parent_sizes() != graph_.parent_sizes(v))
      throw ModelError("mechanism for '" + graph_.name(v) + "' does not match the declared parents");
    if (replacement) {
      const auto& declared = graph_.parents(v);
      for (std::size_t i = 0; i < c.parents().size(); ++i) {
        auto p = graph_.find(c.parents()[i]);
        if (!p || std::find(declared.begin(), declared.end(), *p) == declared.end() ||
            graph_.domain(*p).size() != c.parent_sizes()[i])
          throw ModelError("intervention on '" + graph_.name(v) + "' uses an undeclared parent");
      }
    }
  }

  std::vector<std::size_t> downstream_utilities(std::size_t d) const {
    const std::size_t owner = game_.owners(d).front();
    const auto below = graph_.descendants_of(d);
    std::vector<std::size_t> out;
    for (auto u : game_.utilities_of(owner))
      if (below[u] && u != d) out.push_back(u);
    return out;
  }

  Setup setup(std::size_t d, const std::vector<std::size_t>& utils) const {
    Setup st{d, {}, graph_.parents(d), utils};
    std::vector<bool> needed(graph_.size(), false);
    std::vector<std::size_t> stack(utils.begin(), utils.end());
    stack.insert(stack.end(), st.observations.begin(), st.observations.end());
    stack.push_back(d);
    while (!stack.empty()) {
      std::size_t v = stack.back();
      stack.pop_back();
      if (needed[v]) continue;
      needed[v] = true;
      if (v == d) continue;
      for (auto p : sources_[v].parents) stack.push_back(p);
    }
    for (auto v : graph_.topological_order())
      if (needed[v]) st.order.push_back(v);
    return st;
  }

  std::size_t row_of(const Source& s, const std::vector<std::size_t>& values) const {
    std::size_t row = 0;
    for (std::size_t i = 0; i < s.parents.size(); ++i) row = row * s.parent_sizes[i] + values[s.parents[i]];
    return row;
  }

  // Probability of outcome o in the current row of v.
  const Rational& mass(const Source& s, std::size_t row, std::size_t o) const {
    static const Rational zero(0), one(1);
    if (s.actions) return (*s.actions)[row] == o ? one : zero;
    return s.cpt->row(row)[o];
  }

  std::size_t context_of(const Setup& st, const std::vector<std::size_t>& values) const {
    std::size_t c = 0;
    for (auto p : st.observations) c = c * graph_.domain(p).size() + values[p];
    return c;
  }

  Rational utility_at(const Setup& st, const std::vector<std::size_t>& values) const {
    Rational total = 0;
    for (auto u : st.utilities) total += game_.utility_values(u)[values[u]];
    return total;
  }

  void exact_pass(const Setup& st, std::size_t action, std::vector<Rational>* reach,
                  std::vector<std::vector<Rational>>& score) const {
    std::vector<std::size_t> values(graph_.size(), 0);
    struct Walk {
      const Evaluator& self;
      const Setup& st;
      std::size_t action;
      std::vector<std::size_t>& values;
      std::vector<Rational>* reach;
      std::vector<std::vector<Rational>>& score;

      void go(std::size_t pos, const Rational& w) {
        if (pos == st.order.size()) {
          const std::size_t c = self.context_of(st, values);
          if (reach) (*reach)[c] += w;
          Rational u = self.utility_at(st, values);
          if (u != 0) score[c][action] += w * u;
          return;
        }
        const std::size_t v = st.order[pos];
        if (v == st.decision) {
          values[v] = action;
          go(pos + 1, w);
          return;
        }
        const Source& s = self.sources_[v];
        const std::size_t row = self.row_of(s, values);
        if (s.actions) {
          values[v] = (*s.actions)[row];
          go(pos + 1, w);
          return;
        }
        const Distribution& d = s.cpt->row(row);
        for (std::size_t o = 0; o < d.size(); ++o) {
          if (d[o] == 0) continue;
          values[v] = o;
          if (d[o] == 1)
            go(pos + 1, w);
          else
            go(pos + 1, Rational(w * d[o]));
        }
      }
    } walk{*this, st, action, values, reach, score};
    walk.go(0, Rational(1));
  }

  // Lowest-order epsilon coefficients for a context of probability zero.
  // Returns false when the context is unreachable even with trembles.
  bool tremble_scores(const Setup& st, std::size_t context, std::vector<Rational>& out) const {
    const std::size_t actions = out.size();
    std::vector<std::size_t> forced(graph_.size(), std::numeric_limits<std::size_t>::max());
    {
      std::size_t rest = context;
      for (std::size_t i = st.observations.size(); i > 0; --i) {
        const std::size_t p = st.observations[i - 1];
        const std::size_t size = graph_.domain(p).size();
        forced[p] = rest % size;
        rest /= size;
      }
    }
    std::size_t perturbable = 0;
    for (auto v : st.order)
      if (v != st.decision && sources_[v].perturb) ++perturbable;

    for (std::size_t k = 1; k <= perturbable; ++k) {
      Poly reach(k + 1, Rational(0));
      std::vector<Poly> num(actions, Poly(k + 1, Rational(0)));
      for (std::size_t a = 0; a < actions; ++a)
        tremble_pass(st, a, k, forced, a == 0 ? &reach : nullptr, num[a]);
      if (reach[k] == 0) continue;
      for (std::size_t a = 0; a < actions; ++a) out[a] = num[a][k];
      return true;
    }
    return false;
  }

  void tremble_pass(const Setup& st, std::size_t action, std::size_t k, const std::vector<std::size_t>& forced,
                    Poly* reach, Poly& num) const {
    std::vector<std::size_t> values(graph_.size(), 0);
    std::vector<Poly> buffers(st.order.size() + 1, Poly(k + 1, Rational(0)));
    struct Walk {
      const Evaluator& self;
      const Setup& st;
      std::size_t action;
      std::size_t k;
      const std::vector<std::size_t>& forced;
      std::vector<std::size_t>& values;
      std::vector<Poly>& buffers;
      Poly* reach;
      Poly& num;

      void go(std::size_t pos, std::size_t zeros) {
        const Poly& w = buffers[pos];
        if (pos == st.order.size()) {
          if (reach)
            for (std::size_t i = 0; i <= k; ++i) (*reach)[i] += w[i];
          Rational u = self.utility_at(st, values);
          if (u != 0)
            for (std::size_t i = 0; i <= k; ++i) num[i] += w[i] * u;
          return;
        }
        const std::size_t v = st.order[pos];
        Poly& next = buffers[pos + 1];
        if (v == st.decision) {
          values[v] = action;
          next = w;
          go(pos + 1, zeros);
          return;
        }
        const Source& s = self.sources_[v];
        const std::size_t row = self.row_of(s, values);
        const bool is_forced = forced[v] != std::numeric_limits<std::size_t>::max();
        const Rational spread(1, s.size);
        for (std::size_t o = 0; o < s.size; ++o) {
          if (is_forced && o != forced[v]) continue;
          const Rational& p = self.mass(s, row, o);
          values[v] = o;
          if (!s.perturb) {
            if (p == 0) continue;
            for (std::size_t i = 0; i <= k; ++i) next[i] = w[i] * p;
            go(pos + 1, zeros);
            continue;
          }
          if (p == 0) {
            if (zeros + 1 > k) continue;
            next[0] = 0;
            for (std::size_t i = 1; i <= k; ++i) next[i] = w[i - 1] * spread;
            go(pos + 1, zeros + 1);
          } else {
            const Rational q = spread - p;
            for (std::size_t i = k + 1; i > 0; --i) {
              const std::size_t j = i - 1;
              next[j] = w[j] * p;
              if (j > 0) next[j] += w[j - 1] * q;
            }
            go(pos + 1, zeros);
          }
        }
      }
    } walk{*this, st, action, k, forced, values, buffers, reach, num};
    buffers[0][0] = 1;
    walk.go(0, 0);
  }

  static std::vector<std::size_t> argmax(const std::vector<Rational>& scores) {
    std::vector<std::size_t> best;
    const Rational* top = nullptr;
    for (std::size_t a = 0; a < scores.size(); ++a) {
      if (!top || scores[a] > *top) {
        top = &scores[a];
        best.assign(1, a);
      } else if (scores[a] == *top) {
        best.push_back(a);
      }
    }
    return best;
  }

  const CausalGame& game_;
  const ObjectGraph& graph_;
  std::vector<Intervention> interventions_;
  std::vector<Source> sources_;
};

void require_complete(const CausalGame& game, const PolicyProfile& profile) {
  for (auto d : game.decisions())
    if (!profile.find(d)) throw ModelError("profile has no rule for decision '" + game.graph().name(d) + "'");
  for (const auto& r : profile.rules) {
    if (r.decision >= game.size() || !game.is_decision(r.decision))
      throw ModelError("profile rule for a non-decision variable");
    if (r.actions.size() != game.context_count(r.decision))
      throw ModelError("rule for '" + game.graph().name(r.decision) + "' does not cover every context");
    for (auto a : r.actions)
      if (a >= game.graph().domain(r.decision).size())
        throw ModelError("rule for '" + game.graph().name(r.decision) + "' uses an unknown action");
  }
}

}  // namespace

std::pair<ObjectGraph, std::vector<Cpt>> induced_scm(const CausalGame& game, const PolicyProfile& profile) {
  require_complete(game, profile);
  std::vector<Cpt> cpts;
  for (std::size_t v = 0; v < game.size(); ++v)
    cpts.push_back(game.is_decision(v) ? profile.find(v)->to_cpt(game) : game.cpt(v));
  return {game.graph(), std::move(cpts)};
}

Rational expected_utility(const CausalGame& game, const PolicyProfile& profile, std::size_t agent,
                          const std::vector<Intervention>& interventions) {
  if (agent >= game.agents().size()) throw ModelError("unknown agent index");
  auto [graph, cpts] = induced_scm(game, profile);
  const auto utils = game.utilities_of(agent);
  if (utils.empty()) return 0;
  const auto joint = joint_distribution(graph, cpts, interventions);
  Rational total = 0;
  for (const auto& [outcomes, m] : joint.entries())
    for (auto u : utils) total += m * game.utility_values(u)[outcomes[u]];
  return total;
}

std::vector<std::size_t> best_response_in_context(const CausalGame& game, const PolicyProfile& profile,
                                                  std::size_t decision, std::size_t context,
                                                  const std::vector<Intervention>& interventions) {
  require_complete(game, profile);
  if (decision >= game.size() || !game.is_decision(decision)) throw ModelError("not a decision");
  if (context >= game.context_count(decision)) throw ModelError("context index out of range");
  Evaluator eval(game, {}, interventions);
  for (const auto& r : profile.rules) eval.set_rule(r.decision, &r.actions);
  return eval.argmax_sets(decision)[context];
}

PolicyProfile solve(const CausalGame& game, const std::vector<Intervention>& interventions,
                    const SolveOptions& options) {
  return solve(game, std::span<const Cpt* const>{}, interventions, options);
}

PolicyProfile solve(const CausalGame& game, std::span<const Cpt* const> mechanisms,
                    const std::vector<Intervention>& interventions, const SolveOptions& options) {
  Evaluator eval(game, mechanisms, interventions);
  std::vector<std::size_t> free;
  for (auto d : game.decisions())
    if (mechanisms.empty() || !mechanisms[d]) free.push_back(d);
  if (free.empty()) return {};

  std::size_t profiles = 1;
  for (auto d : free) {
    const std::size_t rules = deterministic_cpt_count(game.graph().domain(d).size(), game.context_count(d));
    const std::size_t size = std::max<std::size_t>(profiles, 1);
    profiles = (rules != 0 && size > std::numeric_limits<std::size_t>::max() / rules)
                   ? std::numeric_limits<std::size_t>::max()
                   : size * rules;
  }
  if (profiles > options.profile_guard)
    throw SizeGuardError("joint decision-rule space of " +
                         (profiles == std::numeric_limits<std::size_t>::max() ? std::string("too many")
                                                                              : std::to_string(profiles)) +
                         " profiles is over the guard of " + std::to_string(options.profile_guard));

  const std::size_t last = free.back();
  std::vector<std::vector<std::size_t>> rules;
  for (auto d : free) rules.emplace_back(game.context_count(d), 0);
  for (std::size_t i = 0; i < free.size(); ++i) eval.set_rule(free[i], &rules[i]);

  while (true) {
    rules.back() = eval.first_best_rule(last);
    bool fixed_point = true;
    for (std::size_t i = 0; i + 1 < free.size() && fixed_point; ++i)
      fixed_point = eval.first_best_rule(free[i]) == rules[i];
    if (fixed_point) {
      PolicyProfile profile;
      for (std::size_t i = 0; i < free.size(); ++i) profile.rules.push_back({free[i], rules[i]});
      return profile;
    }
    // Next prefix in lexicographic order; the last decision is derived, not enumerated.
    bool advanced = false;
    for (std::size_t i = free.size() - 1; i > 0 && !advanced; --i) {
      auto& r = rules[i - 1];
      const std::size_t actions = game.graph().domain(free[i - 1]).size();
      for (std::size_t c = r.size(); c > 0; --c) {
        if (++r[c - 1] < actions) {
          advanced = true;
          break;
        }
        r[c - 1] = 0;
      }
    }
    if (!advanced) throw NoEquilibriumError("no profile is a best response in every decision context");
  }
}

}  // namespace agentdisc
