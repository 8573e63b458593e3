#pragma once

#include <string>

#include "agentdisc/mechanised_game.hpp"
#include "agentdisc/model_io.hpp"

namespace agentdisc::testing {

inline Rational q(long num, long den = 1) { return Rational(num) / den; }

// Mouse with P(X = D) = p and P(U = X) = r.
inline std::string mouse_text(const Rational& p, const Rational& r) {
  const auto row = [](const Rational& same, bool flip) {
    const std::string a = to_string(same), b = to_string(1 - same);
    return flip ? "[" + b + ", " + a + "]" : "[" + a + ", " + b + "]";
  };
  return "format_version: 1\n"
         "agents: [agent1]\n"
         "variables:\n"
         "  - {name: D, kind: decision, agent: agent1, parents: []}\n"
         "  - name: X\n"
         "    parents: [D]\n"
         "    cpt: [" + row(p, false) + ", " + row(p, true) + "]\n"
         "  - name: U\n"
         "    kind: utility\n"
         "    agent: agent1\n"
         "    parents: [X]\n"
         "    cpt: [" + row(r, false) + ", " + row(r, true) + "]\n"
         "    values: [0, 1]\n";
}

inline MechanisedCausalGame mouse(const Rational& p, const Rational& r) { return parse_model(mouse_text(p, r)); }

inline MechanisedCausalGame fixture(const std::string& name) {
  return load_model(std::string(FIXTURE_DIR) + "/" + name + ".yaml");
}

}  // namespace agentdisc::testing
