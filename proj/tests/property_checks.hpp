#pragma once

#include <random>
#include <sstream>
#include <string>

#include "agentdisc/discovery.hpp"
#include "agentdisc/game.hpp"
#include "agentdisc/graphops.hpp"
#include "agentdisc/mechanised_game.hpp"
#include "agentdisc/scm.hpp"
#include "support.hpp"

namespace agentdisc::properties {

using agentdisc::testing::fixture;
using agentdisc::testing::mouse;
using agentdisc::testing::q;

struct RandomModel {
  ObjectGraph graph;
  std::vector<Cpt> cpts;
  std::vector<Intervention> interventions;
  std::size_t grain = 1;  // every probability is a multiple of 1/grain
};

// Random DAG over n binary variables: each earlier node is a parent with probability 1/2, at most max_parents.
inline RandomModel random_model(std::mt19937& rng, std::size_t n, std::size_t grain, std::size_t max_parents) {
  std::vector<VariableId> names;
  std::vector<std::vector<VariableId>> parents(n);
  for (std::size_t v = 0; v < n; ++v) names.push_back("V" + std::to_string(v));
  std::bernoulli_distribution coin(0.5);
  for (std::size_t v = 0; v < n; ++v)
    for (std::size_t p = 0; p < v; ++p)
      if (parents[v].size() < max_parents && coin(rng)) parents[v].push_back(names[p]);
  RandomModel m{ObjectGraph(names, std::vector<Domain>(n, Domain::binary()), parents), {}, {}, grain};
  std::uniform_int_distribution<std::size_t> mass(0, grain);
  for (std::size_t v = 0; v < n; ++v) {
    std::vector<Distribution> rows;
    for (std::size_t r = 0; r < (std::size_t{1} << parents[v].size()); ++r) {
      const Rational p1 = Rational(mass(rng)) / grain;
      rows.push_back(Distribution({1 - p1, p1}));
    }
    m.cpts.emplace_back(names[v], parents[v], std::vector<std::size_t>(parents[v].size(), 2), 2, rows);
  }
  return m;
}

// Exogenous form: U_v uniform on {0, ..., grain-1}; V = 1 iff (U_v + 1/2) / grain > P(V = 0 | pa).
inline JointDistribution exogenous_enumeration(const RandomModel& m) {
  const std::size_t n = m.graph.size();
  std::vector<std::optional<std::size_t>> fixed(n);
  for (const auto& iv : m.interventions) fixed[m.graph.index_of(iv.target)] = iv.replacement.row(0).point_outcome();
  JointDistribution::Entries mass;
  const Rational weight = Rational(1) / boost::multiprecision::pow(boost::multiprecision::cpp_int(m.grain), static_cast<unsigned>(n));
  std::vector<std::size_t> u(n, 0), x(n, 0);
  while (true) {
    for (auto v : m.graph.topological_order()) {
      if (fixed[v]) {
        x[v] = *fixed[v];
        continue;
      }
      std::vector<std::size_t> pa;
      for (auto p : m.graph.parents(v)) pa.push_back(x[p]);
      const Rational threshold = m.cpts[v].row_for(pa)[0];
      x[v] = (Rational(2 * u[v] + 1) / (2 * m.grain)) > threshold ? 1 : 0;
    }
    mass[x] += weight;
    std::size_t i = 0;
    for (; i < n; ++i) {
      if (++u[i] < m.grain) break;
      u[i] = 0;
    }
    if (i == n) break;
  }
  for (auto it = mass.begin(); it != mass.end();) it = it->second == 0 ? mass.erase(it) : std::next(it);
  return JointDistribution(m.graph.names(), std::vector<std::size_t>(n, 2), mass);
}

inline CausalGame scale_agent(const CausalGame& g, std::size_t agent, const Rational& factor) {
  auto specs = g.specs();
  for (std::size_t v = 0; v < specs.size(); ++v) {
    const auto& owners = g.owners(v);
    if (g.is_utility(v) && std::find(owners.begin(), owners.end(), agent) != owners.end())
      for (auto& value : specs[v].values) value *= factor;
  }
  return CausalGame(g.agents(), specs);
}

// Every deterministic profile, rules in canonical order.
inline std::vector<PolicyProfile> all_profiles(const CausalGame& g) {
  std::vector<PolicyProfile> out{{}};
  for (auto d : g.decisions()) {
    const std::size_t contexts = g.context_count(d), actions = g.graph().domain(d).size();
    std::vector<PolicyProfile> next;
    for (const auto& prefix : out) {
      std::vector<std::size_t> rule(contexts, 0);
      while (true) {
        auto p = prefix;
        p.rules.push_back(DecisionRule{d, rule});
        next.push_back(std::move(p));
        std::size_t i = contexts;
        while (i > 0 && ++rule[i - 1] == actions) rule[--i] = 0;
        if (i == 0) break;
      }
    }
    out = std::move(next);
  }
  return out;
}

// Each check returns an empty string on success, otherwise the first counterexample.

// (a) Product-form joint equals brute-force enumeration of exogenous noise.
inline std::string check_joint_matches_exogenous(int trials = 200) {
  std::mt19937 rng(20240501);
  std::uniform_int_distribution<std::size_t> size(1, 8), grain(2, 4), coin(0, 3);
  for (int trial = 0; trial < trials; ++trial) {
    auto m = random_model(rng, size(rng), grain(rng), 3);
    for (std::size_t v = 0; v < m.graph.size(); ++v)
      if (coin(rng) == 0) m.interventions.push_back(Intervention::hard(m.graph, m.graph.name(v), coin(rng) % 2));
    if (!(joint_distribution(m.graph, m.cpts, m.interventions) == exogenous_enumeration(m)))
      return "joint differs from exogenous enumeration in trial " + std::to_string(trial);
  }
  return {};
}

// (b) d-separation implies exact conditional independence.
inline std::string check_d_separation_implies_independence(int trials = 100) {
  std::mt19937 rng(7);
  std::uniform_int_distribution<std::size_t> size(2, 5);
  std::size_t separated_checks = 0;
  for (int trial = 0; trial < trials; ++trial) {
    const auto m = random_model(rng, size(rng), 5, 4);
    const std::size_t n = m.graph.size();
    EdgeSet edges;
    for (std::size_t v = 0; v < n; ++v)
      for (auto p : m.graph.parents(v)) edges.emplace(p, v);
    const auto joint = joint_distribution(m.graph, m.cpts);
    const auto names = m.graph.names();
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = x + 1; y < n; ++y)
        for (std::size_t zmask = 0; zmask < (std::size_t{1} << n); ++zmask) {
          if (zmask & ((std::size_t{1} << x) | (std::size_t{1} << y))) continue;
          std::set<std::size_t> zs;
          std::vector<VariableId> zvars;
          for (std::size_t z = 0; z < n; ++z)
            if (zmask >> z & 1) zs.insert(z), zvars.push_back(names[z]);
          if (!d_separated(n, edges, {x}, {y}, zs)) continue;
          ++separated_checks;
          for (const auto& zval : enumerate_assignments(zvars, m.graph.domain_map())) {
            const Rational pz = joint.probability(zval);
            for (std::size_t a = 0; a < 2; ++a)
              for (std::size_t b = 0; b < 2; ++b) {
                auto xz = zval, yz = zval, xyz = zval;
                xz[names[x]] = xyz[names[x]] = a;
                yz[names[y]] = xyz[names[y]] = b;
                if (joint.probability(xyz) * pz != joint.probability(xz) * joint.probability(yz)) {
                  std::ostringstream out;
                  out << "trial " << trial << ": " << names[x] << " and " << names[y]
                      << " d-separated but dependent given mask " << zmask;
                  return out.str();
                }
              }
          }
        }
  }
  if (separated_checks < 100) return "too few separated triples: " + std::to_string(separated_checks);
  return {};
}

// (c) For one agent, solve attains the maximum expected utility over all deterministic profiles.
inline std::string check_solve_maximises_single_agent_utility() {
  std::vector<std::pair<std::string, CausalGame>> games;
  for (const char* name : {"mouse", "recommender", "mamdp", "thermometer_btc", "thermometer_tc", "thermometer_bt"})
    games.emplace_back(name, fixture(name).game());
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> tenth(0, 10);
  for (int i = 0; i < 20; ++i) {
    const Rational p = q(tenth(rng), 10), r = q(tenth(rng), 10);
    games.emplace_back("mouse(" + to_string(p) + ", " + to_string(r) + ")", mouse(p, r).game());
  }
  for (const auto& [name, g] : games) {
    if (g.agents().size() != 1) return name + " is not single-agent";
    const Rational got = expected_utility(g, solve(g), 0);
    for (const auto& p : all_profiles(g))
      if (expected_utility(g, p, 0) > got) return name + ": solve is beaten by another profile";
  }
  return {};
}

// (d) Positive scaling of one agent's utility values leaves solve unchanged and scales its EU.
inline std::string check_solve_invariant_under_scaling() {
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> num(1, 9), den(1, 7);
  for (const char* name : {"mouse", "recommender", "actor_critic", "mamdp", "cirl", "ndu", "thermometer_btc",
                           "thermometer_tc", "thermometer_bt"}) {
    const auto g = fixture(name).game();
    const auto base = solve(g);
    for (std::size_t a = 0; a < g.agents().size(); ++a)
      for (int k = 0; k < 3; ++k) {
        const Rational factor = Rational(num(rng)) / den(rng);
        const auto scaled = scale_agent(g, a, factor);
        if (!(solve(scaled) == base)) return std::string(name) + ": profile changed under factor " + to_string(factor);
        if (expected_utility(scaled, base, a) != factor * expected_utility(g, base, a))
          return std::string(name) + ": expected utility did not scale";
      }
  }
  return {};
}

// (e) Thermometer variable subsets classify as (decision, chance, utility), (decision, utility), (decision, utility).
inline std::string check_thermometer_classification() {
  const std::vector<std::pair<const char*, std::vector<NodeKind>>> cases{
      {"thermometer_btc", {NodeKind::decision, NodeKind::chance, NodeKind::utility}},
      {"thermometer_tc", {NodeKind::decision, NodeKind::utility}},
      {"thermometer_bt", {NodeKind::decision, NodeKind::utility}}};
  for (const auto& [name, kinds] : cases) {
    const auto model = fixture(name);
    GameOracle oracle(model);
    if (discover_game(oracle).kinds != kinds) return std::string(name) + " misclassified";
  }
  return {};
}

}  // namespace agentdisc::properties
