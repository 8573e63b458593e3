#include <gtest/gtest.h>

#include "agentdisc/errors.hpp"
#include "agentdisc/mechanised_game.hpp"
#include "agentdisc/model_io.hpp"
#include "support.hpp"

using namespace agentdisc;
using agentdisc::testing::fixture;
using agentdisc::testing::mouse;
using agentdisc::testing::q;

namespace {

Cpt noisy_copy(const VariableId& child, const VariableId& parent, const Rational& same) {
  return Cpt(child, {parent}, {2}, 2, {Distribution({same, 1 - same}), Distribution({1 - same, same})});
}

Cpt constant_rule(const VariableId& d, std::size_t action) { return Cpt::deterministic(d, {}, {}, 2, {action}); }

}  // namespace

TEST(Vocabulary, FullModeHasEveryDeterministicCptThenDeclaredThenConstants) {
  const auto m = mouse(q(3, 4), q(9, 10));
  EXPECT_FALSE(m.restricted());
  EXPECT_EQ(m.candidate_count(0), 2u);
  EXPECT_EQ(m.candidate_count(1), 5u);  // 4 deterministic + declared
  EXPECT_EQ(m.vocabulary(1)[4], m.game().cpt(1));
  EXPECT_EQ(m.vocabulary(1).size(), 5u);  // constants already present
  EXPECT_EQ(m.structural_settings(1), (std::vector<std::int32_t>{0, 3}));
}

TEST(Vocabulary, RestrictedModeAppendsMissingConstants) {
  const auto m = fixture("mamdp");
  EXPECT_TRUE(m.restricted());
  const std::size_t s2 = m.game().graph().index_of("S2");
  EXPECT_EQ(m.candidate_count(s2), 3u);
  EXPECT_EQ(m.vocabulary(s2).size(), 5u);
  for (auto s : m.structural_settings(s2)) EXPECT_TRUE(m.vocabulary(s2)[s].is_constant());
}

TEST(Respond, MouseDecisionFollowsCheese) {
  const auto m = mouse(q(3, 4), q(9, 10));
  EXPECT_EQ(respond(m, std::map<VariableId, Cpt>{})[0], constant_rule("D", 1));
  const auto flipped = respond(m, {{"U", noisy_copy("U", "X", q(1, 10))}});
  EXPECT_EQ(flipped[0], constant_rule("D", 0));
  EXPECT_EQ(flipped[2], noisy_copy("U", "X", q(1, 10)));
}

TEST(Respond, AllInterventionsReturnedVerbatim) {
  const auto m = mouse(q(3, 4), q(9, 10));
  const std::map<VariableId, Cpt> all{{"D", constant_rule("D", 0)},
                                      {"X", noisy_copy("X", "D", q(1, 3))},
                                      {"U", noisy_copy("U", "X", q(2, 3))}};
  const auto got = respond(m, all);
  EXPECT_EQ(got[0], all.at("D"));
  EXPECT_EQ(got[1], all.at("X"));
  EXPECT_EQ(got[2], all.at("U"));
}

TEST(Respond, CriticBestRespondsToFixedActor) {
  const auto m = fixture("actor_critic");
  const auto& game = m.game();
  for (std::size_t a = 0; a < 2; ++a) {
    std::size_t best = 0;
    Rational best_eu = -1000;
    for (std::size_t qa = 0; qa < 4; ++qa) {
      const PolicyProfile p{{DecisionRule{0, {a}}, DecisionRule{1, {qa}}}};
      const Rational eu = expected_utility(game, p, game.agent_index("critic"));
      if (eu > best_eu) best_eu = eu, best = qa;
    }
    const auto got = respond(m, {{"A", constant_rule("A", a)}});
    EXPECT_EQ(got[1], Cpt::deterministic("Q", {}, {}, 4, {best})) << "A := " << a;
  }
}

TEST(Respond, IdempotentInInterventions) {
  for (const char* name : {"mouse", "recommender", "actor_critic"}) {
    const auto m = fixture(name);
    const auto first = respond(m, std::map<VariableId, Cpt>{});
    std::map<VariableId, Cpt> again;
    for (std::size_t v = 0; v < m.size(); ++v) again.emplace(m.game().graph().name(v), first[v]);
    EXPECT_EQ(respond(m, again), first) << name;
  }
}

TEST(Respond, DependencyRuleFires) {
  const auto m = fixture("recommender");
  const auto& g = m.game().graph();
  const std::size_t u = g.index_of("U"), d = g.index_of("D");
  const Cpt adopt = Cpt::deterministic("H2", {"H1", "D"}, {2, 2}, 2, {0, 1, 0, 1});
  const auto got = respond(m, {{"H2", adopt}});
  EXPECT_EQ(got[u], Cpt::deterministic("U", {"D", "M"}, {2, 2}, 2, {0, 0, 1, 1}));
  EXPECT_EQ(got[d], Cpt::deterministic("D", {"M"}, {2}, 2, {1, 1}));
  EXPECT_EQ(respond(m, std::map<VariableId, Cpt>{})[u], m.game().cpt(u));
}

TEST(Respond, OscillatingDependenciesFailLoudly) {
  const auto m = parse_model(R"(format_version: 1
agents: []
variables:
  - {name: A, parents: [], cpt: [[1/2, 1/2]]}
  - {name: B, parents: [], cpt: [[1/2, 1/2]]}
mechanisms:
  A:
    dependencies:
      - {when: {B: {cpt: [[1/2, 1/2]]}}, use: {table: ["1"]}}
  B:
    dependencies:
      - {when: {A: {cpt: [[1/2, 1/2]]}}, use: {table: ["1"]}}
)");
  EXPECT_THROW(respond(m, std::map<VariableId, Cpt>{}), FixedPointError);
  EXPECT_NO_THROW(respond(m, {{"A", m.game().cpt(0)}}));
}

TEST(Respond, ZeroModelNeverResponds) {
  const auto m = fixture("zero");
  const auto base = respond(m, std::map<VariableId, Cpt>{});
  for (std::size_t w = 0; w < m.size(); ++w)
    for (const auto& c : m.vocabulary(w)) {
      const auto got = respond(m, {{m.game().graph().name(w), c}});
      for (std::size_t v = 0; v < m.size(); ++v)
        if (v != w) EXPECT_EQ(got[v], base[v]);
    }
}

TEST(Query, MouseDefaults) {
  const auto m = mouse(q(3, 4), q(9, 10));
  const auto r = query(m, {});
  EXPECT_EQ(r.mechanisms[0], constant_rule("D", 1));
  EXPECT_EQ(r.mechanisms[1], noisy_copy("X", "D", q(3, 4)));
  EXPECT_EQ(r.mechanisms[2], noisy_copy("U", "X", q(9, 10)));
  EXPECT_EQ(r.objects.probability(Assignment{{"U", 1}}), q(7, 10));
}

TEST(Query, ObjectInterventionDoesNotReachMechanisms) {
  const auto m = mouse(q(3, 4), q(9, 10));
  OracleQuery oq;
  oq.object_interventions = {Intervention::hard(m.game().graph(), "X", 0)};
  const auto r = query(m, oq);
  EXPECT_EQ(r.objects.probability(Assignment{{"U", 1}}), q(1, 10));
  EXPECT_EQ(r.mechanisms, query(m, {}).mechanisms);
}

TEST(Query, FullInterventionsGivePointMass) {
  const auto m = mouse(q(3, 4), q(9, 10));
  OracleQuery oq;
  for (const auto* v : {"D", "X", "U"}) oq.object_interventions.push_back(Intervention::hard(m.game().graph(), v, 1));
  oq.mech_interventions = {{"D", constant_rule("D", 0)}};
  EXPECT_EQ(query(m, oq).objects.entries().size(), 1u);
}

TEST(MechanismValueDistribution, Examples) {
  const auto m = mouse(q(3, 4), q(9, 10));
  OracleQuery oq;
  oq.mech_interventions = {{"X", noisy_copy("X", "D", q(3, 4))}, {"U", noisy_copy("U", "X", q(9, 10))}};
  const auto got = mechanism_value_distribution(m, oq);
  EXPECT_EQ(got.at("D"), constant_rule("D", 1));
  EXPECT_EQ(got.at("X"), oq.mech_interventions.at("X"));
  const auto tie = mechanism_value_distribution(mouse(q(3, 4), q(1, 2)), {});
  EXPECT_EQ(tie.at("D"), constant_rule("D", 0));
}

TEST(StructuralInterventions, AreConstantsIndependentOfParents) {
  const auto m = mouse(q(3, 4), q(9, 10));
  const auto xs = structural_interventions_for(m, "X");
  ASSERT_EQ(xs.size(), 2u);
  EXPECT_EQ(xs[0].outcomes(), (std::vector<std::size_t>{0, 0}));
  EXPECT_EQ(xs[1].outcomes(), (std::vector<std::size_t>{1, 1}));
  for (const auto& c : xs)
    for (std::size_t r = 0; r < c.row_count(); ++r) EXPECT_EQ(c.row(r), c.row(0));
  EXPECT_EQ(structural_interventions_for(m, "D").size(), 2u);
}

// Every probe agrees with the same question asked through query().
TEST(GameOracle, ProbesMatchQuery) {
  const auto m = mouse(q(3, 4), q(9, 10));
  GameOracle oracle(m);
  const std::size_t n = m.size();
  std::vector<std::int32_t> setting(2 * n);
  std::size_t checked = 0;
  // Each object free or fixed to 0/1; each mechanism free or one of its first three vocabulary entries.
  for (std::size_t code = 0; code < 27 * 64; ++code) {
    std::size_t rest = code;
    for (std::size_t v = 0; v < n; ++v, rest /= 3) setting[v] = static_cast<std::int32_t>(rest % 3) - 1;
    for (std::size_t v = 0; v < n; ++v, rest /= 4) {
      const auto k = static_cast<std::int32_t>(rest % 4) - 1;
      setting[n + v] = k < static_cast<std::int32_t>(m.vocabulary(v).size()) ? k : kFree;
    }
    OracleQuery oq;
    for (std::size_t v = 0; v < n; ++v) {
      const auto& name = m.game().graph().name(v);
      if (setting[v] != kFree) oq.object_interventions.push_back(Intervention::hard(m.game().graph(), name, setting[v]));
      if (setting[n + v] != kFree) oq.mech_interventions.emplace(name, m.vocabulary(v)[setting[n + v]]);
    }
    const auto expected = query(m, oq);
    for (std::size_t v = 0; v < n; ++v) {
      EXPECT_EQ(oracle.probe(Node::object(v), setting).distribution(),
                expected.objects.distribution_of(m.game().graph().name(v)));
      if (setting[n + v] == kFree) EXPECT_EQ(oracle.probe(Node::mechanism(v), setting).mechanism(), expected.mechanisms[v]);
      ++checked;
    }
  }
  EXPECT_EQ(checked, 27u * 64u * 3u);
}

TEST(GameOracle, RejectsOutOfRangeSettings) {
  const auto m = mouse(q(3, 4), q(9, 10));
  GameOracle oracle(m);
  const std::vector<std::int32_t> bad{2, kFree, kFree, kFree, kFree, kFree};
  EXPECT_ANY_THROW(oracle.probe(Node::object(2), bad));
  const std::vector<std::int32_t> short_setting{kFree};
  EXPECT_ANY_THROW(oracle.probe(Node::object(2), short_setting));
}
