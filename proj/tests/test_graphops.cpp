#include <gtest/gtest.h>

#include "agentdisc/discovery.hpp"
#include "agentdisc/errors.hpp"
#include "agentdisc/graphops.hpp"
#include "agentdisc/mechanised_game.hpp"
#include "support.hpp"

using namespace agentdisc;
using agentdisc::testing::fixture;

namespace {

GameGraph declared(const char* name) { return game_graph_of(fixture(name).game()); }

std::size_t idx(const GameGraph& g, const std::string& name) {
  return static_cast<std::size_t>(std::find(g.nodes.begin(), g.nodes.end(), name) - g.nodes.begin());
}

EdgeSet named(const GameGraph& g, std::initializer_list<std::pair<const char*, const char*>> pairs) {
  EdgeSet out;
  for (const auto& [a, b] : pairs) out.emplace(idx(g, a), idx(g, b));
  return out;
}

const char* kAllFixtures[] = {"mouse", "recommender", "actor_critic", "mamdp", "zero", "cirl", "ndu",
                              "thermometer_btc", "thermometer_tc", "thermometer_bt"};

}  // namespace

TEST(DSeparated, ChainAndCollider) {
  const EdgeSet chain{{0, 1}, {1, 2}};
  EXPECT_TRUE(d_separated(3, chain, {0}, {2}, {1}));
  EXPECT_FALSE(d_separated(3, chain, {0}, {2}, {}));
  const EdgeSet collider{{0, 1}, {2, 1}};
  EXPECT_TRUE(d_separated(3, collider, {0}, {2}, {}));
  EXPECT_FALSE(d_separated(3, collider, {0}, {2}, {1}));
}

TEST(DSeparated, ColliderDescendantOpensPath) {
  const EdgeSet g{{0, 1}, {2, 1}, {1, 3}};
  EXPECT_FALSE(d_separated(4, g, {0}, {2}, {3}));
}

TEST(DSeparated, MouseGraph) {
  const auto g = declared("mouse");
  EXPECT_TRUE(d_separated(g.size(), g.edges, {idx(g, "D")}, {idx(g, "U")}, {idx(g, "X")}));
}

TEST(DSeparated, RejectsBadArguments) {
  const EdgeSet chain{{0, 1}, {1, 2}};
  EXPECT_THROW(d_separated(3, chain, {0}, {7}, {}), std::invalid_argument);
  EXPECT_THROW(d_separated(3, chain, {0}, {2}, {0}), std::invalid_argument);
}

TEST(SReachable, Mouse) {
  const auto g = declared("mouse");
  EXPECT_TRUE(s_reachable(g, idx(g, "D"), idx(g, "X")));
  EXPECT_TRUE(s_reachable(g, idx(g, "D"), idx(g, "U")));
  EXPECT_THROW(s_reachable(g, idx(g, "D"), idx(g, "D")), std::invalid_argument);
  EXPECT_THROW(s_reachable(g, idx(g, "X"), idx(g, "U")), std::invalid_argument);
}

TEST(SReachable, Recommender) {
  const auto g = declared("recommender");
  EXPECT_TRUE(s_reachable(g, idx(g, "D"), idx(g, "U")));
  EXPECT_FALSE(s_reachable(g, idx(g, "D"), idx(g, "M")));
  EXPECT_FALSE(s_reachable(g, idx(g, "D"), idx(g, "H2")));
}

TEST(SReachable, ActorCritic) {
  const auto g = declared("actor_critic");
  for (const char* v : {"A", "Y", "S", "R", "W"}) EXPECT_TRUE(s_reachable(g, idx(g, "Q"), idx(g, v))) << v;
  EXPECT_FALSE(s_reachable(g, idx(g, "A"), idx(g, "S")));
}

TEST(DirectedPathAvoiding, Examples) {
  const auto mouse = declared("mouse");
  EXPECT_TRUE(directed_path_avoiding(mouse.edges, mouse.size(), idx(mouse, "D"), idx(mouse, "U"), {}));
  EXPECT_FALSE(directed_path_avoiding(mouse.edges, mouse.size(), idx(mouse, "D"), idx(mouse, "D"), {}));
  EXPECT_FALSE(directed_path_avoiding(mouse.edges, mouse.size(), idx(mouse, "D"), idx(mouse, "U"), {idx(mouse, "X")}));
  const auto mamdp = declared("mamdp");
  EXPECT_TRUE(directed_path_avoiding(mamdp.edges, mamdp.size(), idx(mamdp, "D1"), idx(mamdp, "U"), {}));
}

TEST(Mechanise, MouseFigure) {
  const auto g = declared("mouse");
  const auto m = mechanise(g);
  EXPECT_EQ(m.e_obj, g.edges);
  EXPECT_EQ(m.e_mech, named(g, {{"X", "D"}, {"U", "D"}}));
  EXPECT_EQ(m.e_term, named(g, {{"U", "D"}}));
  EXPECT_EQ(m.e_func.size(), 3u);
}

TEST(Mechanise, ActorCriticFigure) {
  const auto g = declared("actor_critic");
  const auto m = mechanise(g);
  EXPECT_EQ(m.e_mech, named(g, {{"Q", "A"}, {"Y", "A"}, {"A", "Q"}, {"S", "Q"}, {"R", "Q"}, {"W", "Q"}, {"Y", "Q"}}));
  EXPECT_EQ(m.e_term, named(g, {{"Y", "A"}, {"W", "Q"}}));
}

TEST(Mechanise, RecommenderLacksTrainedModelEdge) {
  const auto g = declared("recommender");
  const auto m = mechanise(g);
  EXPECT_EQ(m.e_mech, named(g, {{"U", "D"}}));
  EXPECT_EQ(m.e_term, named(g, {{"U", "D"}}));
}

TEST(Mechanise, InvariantsOnEveryFixture) {
  for (const char* name : kAllFixtures) {
    const auto g = declared(name);
    const auto m = mechanise(g);
    EXPECT_NO_THROW(m.validate()) << name;
    for (const auto& e : m.e_term) EXPECT_TRUE(m.e_mech.contains(e)) << name;
    for (auto d : g.decisions())
      for (std::size_t v = 0; v < g.size(); ++v)
        if (v != d) EXPECT_EQ(s_reachable(g, d, v), m.e_mech.contains({v, d})) << name;
  }
}

TEST(AgentSubgraphs, Examples) {
  const auto mouse = declared("mouse");
  const auto du = decision_utility_subgraph(mouse);
  EXPECT_EQ(du.edges, named(mouse, {{"D", "U"}}));
  const auto ac = declared("actor_critic");
  const auto subs = agent_subgraphs(ac);
  ASSERT_EQ(subs.size(), 2u);
  EXPECT_EQ(subs[0].edges, named(ac, {{"A", "Y"}}));
  EXPECT_EQ(subs[1].edges, named(ac, {{"Q", "W"}}));
  const auto zero = decision_utility_subgraph(declared("zero"));
  EXPECT_TRUE(zero.nodes.empty());
  EXPECT_TRUE(zero.edges.empty());
}

TEST(AgentSubgraphs, PathsMayNotPassOtherOwnUtilities) {
  GameGraph g;
  g.nodes = {"D", "U1", "U2"};
  g.kinds = {NodeKind::decision, NodeKind::utility, NodeKind::utility};
  g.colours = {{0}, {0}, {0}};
  g.colour_names = {"a"};
  g.edges = {{0, 1}, {1, 2}};
  EXPECT_EQ(agent_subgraphs(g)[0].edges, (EdgeSet{{0, 1}}));
}

TEST(CheckAssumption1, Fixtures) {
  EXPECT_TRUE(check_assumption1(declared("mouse")).ok);
  EXPECT_TRUE(check_assumption1(declared("actor_critic")).ok);
  EXPECT_TRUE(check_assumption1(declared("zero")).ok);
  const auto cirl = check_assumption1(declared("cirl"));
  EXPECT_FALSE(cirl.ok);
  EXPECT_NE(cirl.diagnostic.find("H1"), std::string::npos);
  const auto ndu = check_assumption1(declared("ndu"));
  EXPECT_FALSE(ndu.ok);
  EXPECT_NE(ndu.diagnostic.find("A"), std::string::npos);
}

TEST(VerifyLeftInverseGame, Fixtures) {
  for (const char* name : {"mouse", "recommender", "actor_critic", "mamdp", "zero", "thermometer_btc"}) {
    const auto r = verify_left_inverse_game(declared(name));
    EXPECT_TRUE(r.precondition_ok) << name << ": " << r.precondition;
    EXPECT_TRUE(r.passed) << name;
  }
  const auto ndu = verify_left_inverse_game(declared("ndu"));
  EXPECT_FALSE(ndu.precondition_ok);
  EXPECT_NE(ndu.precondition.find("assumption 1"), std::string::npos);
}

TEST(VerifyLeftInverseGame, ReportsDifferences) {
  // A utility with no decision behind it cannot be recovered.
  GameGraph g;
  g.nodes = {"D", "U", "V"};
  g.kinds = {NodeKind::decision, NodeKind::utility, NodeKind::utility};
  g.colours = {{0}, {0}, {0}};
  g.colour_names = {"a"};
  g.edges = {{0, 1}};
  const auto r = verify_left_inverse_game(g);
  EXPECT_FALSE(r.precondition_ok);
}

TEST(VerifyLeftInverseMech, DiscoveredGraphs) {
  for (const char* name : {"mouse", "zero", "mamdp"}) {
    const auto fixture_model = fixture(name);
    GameOracle oracle(fixture_model);
    const auto r = verify_left_inverse_mech(discover(oracle));
    EXPECT_TRUE(r.precondition_ok) << name;
    EXPECT_TRUE(r.passed) << name;
  }
  const auto fixture_model = fixture("recommender");
  GameOracle oracle(fixture_model);
  const auto r = verify_left_inverse_mech(discover(oracle));
  EXPECT_FALSE(r.precondition_ok);
  EXPECT_NE(r.precondition.find("M_U"), std::string::npos);
}

TEST(VerifyLeftInverseMech, ReportsDifferences) {
  // A terminal edge whose object layer has no path from decision to utility.
  EdgeLabelledMechanisedGraph c;
  c.objects = {"D", "U"};
  c.e_func = {{0, 0}, {1, 1}};
  c.e_mech = c.e_term = {{1, 0}};
  const auto r = verify_left_inverse_mech(c);
  EXPECT_TRUE(r.precondition_ok);
  EXPECT_FALSE(r.passed);
  EXPECT_FALSE(r.differences.empty());
}

TEST(GameGraph, ValidateAndColouringEquality) {
  auto g = declared("actor_critic");
  EXPECT_NO_THROW(g.validate());
  auto renamed = g;
  renamed.colour_names = {"x", "y"};
  EXPECT_EQ(g, renamed);
  auto swapped = g;
  for (auto& c : swapped.colours)
    if (!c.empty()) c = {1 - *c.begin()};
  EXPECT_EQ(g, swapped);
  auto merged = g;
  for (auto& c : merged.colours)
    if (!c.empty()) c = {0};
  EXPECT_NE(g, merged);
  auto bad = g;
  bad.colours[idx(g, "S")] = {0};
  EXPECT_THROW(bad.validate(), ShapeError);
  bad = g;
  bad.edges.emplace(idx(g, "W"), idx(g, "A"));
  EXPECT_THROW(bad.validate(), ShapeError);
}

TEST(EdgeLabelledMechanisedGraph, ValidateRejectsMalformed) {
  EdgeLabelledMechanisedGraph c;
  c.objects = {"A", "B"};
  c.e_func = {{0, 0}, {1, 1}};
  EXPECT_NO_THROW(c.validate());
  auto t = c;
  t.e_term = {{0, 1}};
  EXPECT_THROW(t.validate(), ShapeError);
  auto f = c;
  f.e_func = {{0, 0}};
  EXPECT_THROW(f.validate(), ShapeError);
  auto cyc = c;
  cyc.e_obj = {{0, 1}, {1, 0}};
  EXPECT_THROW(cyc.validate(), ShapeError);
  auto mech_cycle = c;
  mech_cycle.e_mech = {{0, 1}, {1, 0}};
  EXPECT_NO_THROW(mech_cycle.validate());
}

TEST(TopologicalOrder, DetectsCycles) {
  EXPECT_EQ(topological_order(3, {{0, 1}, {1, 2}}), (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_FALSE(is_acyclic(2, {{0, 1}, {1, 0}}));
}
