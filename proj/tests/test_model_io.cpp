#include <gtest/gtest.h>

#include <regex>

#include "agentdisc/errors.hpp"
#include "agentdisc/model_io.hpp"
#include "support.hpp"

using namespace agentdisc;
using agentdisc::testing::fixture;
using agentdisc::testing::q;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_model(text, "m.yaml");
  } catch (const ModelError& e) {
    return e.what();
  }
  return "";
}

const std::string kHeader = "format_version: 1\nagents: [a]\nvariables:\n";

}  // namespace

TEST(ParseModel, MouseFixtureProbabilities) {
  const auto m = fixture("mouse");
  const auto& g = m.game();
  const std::size_t x = g.graph().index_of("X"), u = g.graph().index_of("U");
  EXPECT_EQ(g.cpt(x).row(1)[1], q(3, 4));
  EXPECT_EQ(g.cpt(x).row(0)[0], q(3, 4));
  EXPECT_EQ(g.cpt(u).row(1)[1], q(9, 10));
  EXPECT_TRUE(g.is_decision(g.graph().index_of("D")));
  EXPECT_EQ(g.owners(u), std::vector<std::size_t>{0});
  EXPECT_EQ(g.utility_values(u), (std::vector<Rational>{q(0), q(1)}));
}

TEST(ParseModel, DefaultsAndTables) {
  const auto m = parse_model(kHeader +
                             "  - {name: W, parents: [], domain: [lo, mid, hi], cpt: [0.2, 0.3, 0.5]}\n"
                             "  - {name: V, parents: [W], table: [\"1\", \"0\", \"1\"]}\n");
  const auto& g = m.game();
  EXPECT_EQ(g.graph().domain(0).labels(), (std::vector<std::string>{"lo", "mid", "hi"}));
  EXPECT_EQ(g.cpt(0).row(0)[2], q(1, 2));
  EXPECT_EQ(g.graph().domain(1), Domain::binary());
  EXPECT_EQ(g.cpt(1).outcomes(), (std::vector<std::size_t>{1, 0, 1}));
}

TEST(ParseModel, ErrorsArePositioned) {
  const std::regex positioned(R"(^m\.yaml:\d+:\d+: .+)");
  const std::vector<std::string> bad{
      kHeader + "  - {name: X, parents: [], cpt: [[0.5, 0.4]]}\n",
      kHeader + "  - {name: X, parents: [Nope], cpt: [[0.5, 0.5], [0.5, 0.5]]}\n",
      kHeader + "  - {name: D, kind: decision, agent: ghost, parents: []}\n",
      kHeader + "  - {name: X, parents: [], cpt: [[1/2, 1/2]], colour: red}\n",
      "format_version: 2\nvariables: []\n",
      kHeader + "  - {name: X, parents: [], cpt: [[1/2, 1/2]]}\n  - {name: X, parents: [], cpt: [[1/2, 1/2]]}\n",
      kHeader + "  - {name: X, parents: [], table: [\"2\"]}\n",
      kHeader + "  - {name: X, parents: [], cpt: [[one, 0]]}\n",
      kHeader + "  - {name: U, kind: utility, agent: a, parents: [], cpt: [[1/2, 1/2]]}\n",
      kHeader + "  - {name: X, parents: [], cpt: [[1/2, 1/2]]\n",
  };
  for (const auto& text : bad) {
    const std::string what = error_of(text);
    EXPECT_TRUE(std::regex_match(what, positioned)) << "got: '" << what << "' for\n" << text;
  }
}

TEST(ParseModel, RowSumErrorNamesTheRow) {
  const std::string what = error_of(kHeader +
                                    "  - {name: D, parents: [], cpt: [[1/2, 1/2]]}\n"
                                    "  - name: X\n"
                                    "    parents: [D]\n"
                                    "    cpt:\n"
                                    "      - [1/2, 1/2]\n"
                                    "      - [0.5, 0.4]\n");
  EXPECT_NE(what.find("m.yaml:9:"), std::string::npos) << what;
  EXPECT_NE(what.find("row 1"), std::string::npos) << what;
  EXPECT_NE(what.find("9/10"), std::string::npos) << what;
}

TEST(ParseModel, UnknownParentAndDanglingAgentNamed) {
  EXPECT_NE(error_of(kHeader + "  - {name: X, parents: [Nope], cpt: [[1, 0], [0, 1]]}\n").find("Nope"),
            std::string::npos);
  EXPECT_NE(error_of(kHeader + "  - {name: D, kind: decision, agent: ghost, parents: []}\n").find("ghost"),
            std::string::npos);
}

TEST(ParseModel, MechanismSection) {
  const auto m = fixture("mamdp");
  EXPECT_TRUE(m.restricted());
  const auto r = fixture("recommender");
  EXPECT_TRUE(r.has_dependencies());
  const std::size_t u = r.game().graph().index_of("U");
  ASSERT_EQ(r.spec(u).dependencies.size(), 1u);
  EXPECT_EQ(r.spec(u).dependencies[0].use.outcomes(), (std::vector<std::size_t>{0, 0, 1, 1}));
}

TEST(ParseModel, DecisionsMayNotDeclareMechanismDependencies) {
  const std::string what = error_of(kHeader +
                                    "  - {name: D, kind: decision, agent: a, parents: []}\n"
                                    "  - {name: X, parents: [], cpt: [[1/2, 1/2]]}\n"
                                    "mechanisms:\n"
                                    "  D:\n"
                                    "    dependencies:\n"
                                    "      - {when: {X: {table: [\"1\"]}}, use: {table: [\"1\"]}}\n");
  EXPECT_FALSE(what.empty());
}

TEST(SerialiseModel, RoundTripsEveryFixture) {
  for (const auto& entry : std::filesystem::directory_iterator(FIXTURE_DIR)) {
    if (entry.path().extension() != ".yaml") continue;
    const auto m = load_model(entry.path().string());
    const std::string once = serialise_model(m);
    const auto again = parse_model(once, "roundtrip");
    EXPECT_EQ(serialise_model(again), once) << entry.path();
    for (std::size_t v = 0; v < m.size(); ++v) {
      EXPECT_EQ(again.vocabulary(v), m.vocabulary(v)) << entry.path() << " variable " << v;
      if (!m.game().is_decision(v)) EXPECT_EQ(again.game().cpt(v), m.game().cpt(v));
    }
    EXPECT_EQ(again.game().agents(), m.game().agents());
  }
}

TEST(SerialiseModel, ExactRationals) {
  const auto m = parse_model(kHeader + "  - {name: X, parents: [], cpt: [0.1, 0.9]}\n");
  const std::string text = serialise_model(m);
  EXPECT_NE(text.find("1/10"), std::string::npos) << text;
}

TEST(ResolveModelPath, ExtensionAndFixtureFallback) {
  EXPECT_EQ(resolve_model_path(std::string(FIXTURE_DIR) + "/mouse").filename(), "mouse.yaml");
  EXPECT_TRUE(std::filesystem::exists(resolve_model_path("fixtures/mouse")));
  EXPECT_THROW(load_model("/nonexistent/model"), ModelError);
}
