#include "agentdisc/cli.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <functional>

#include <CLI11.hpp>

#include "agentdisc/discovery.hpp"
#include "agentdisc/dot.hpp"
#include "agentdisc/errors.hpp"
#include "agentdisc/graphops.hpp"
#include "agentdisc/model_io.hpp"
#include "agentdisc/report.hpp"

namespace agentdisc {

namespace {

struct Flags {
  std::uint64_t budget = 0;
  std::string format = "text";
  bool restricted_ok = false;
  std::string model;
  std::string graph = "game";
  std::vector<std::string> fixtures;
};

std::vector<std::string> fixture_names() {
  std::vector<std::string> out;
  for (const auto& entry : std::filesystem::directory_iterator(fixture_directory()))
    if (entry.is_regular_file() && entry.path().extension() == ".yaml") out.push_back(entry.path().stem().string());
  std::sort(out.begin(), out.end());
  return out;
}

DiscoveryOptions options_of(const Flags& f) {
  DiscoveryOptions o;
  if (f.budget) o.budget = f.budget;
  return o;
}

void warn_restricted(const MechanisedCausalGame& model, const Flags& f, std::ostream& err) {
  if (model.restricted() && !f.restricted_ok)
    err << "warning: model uses restricted mechanism candidates; identification is only guaranteed when every "
           "deterministic mechanism is a candidate (pass --restricted-ok to silence)\n";
}

void require_format(const Flags& f, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed)
    if (f.format == a) return;
  throw CLI::ValidationError("--format", "format '" + f.format + "' is not available for this command");
}

void print_graph(const GameGraph& g, const Flags& f, const std::string& title, std::ostream& out) {
  require_format(f, {"text", "json", "dot"});
  if (f.format == "json") out << to_json(g).dump(2) << "\n";
  else if (f.format == "dot") out << export_dot(g, title);
  else out << to_text(g);
}

void print_graph(const EdgeLabelledMechanisedGraph& g, const Flags& f, const std::string& title, std::ostream& out) {
  require_format(f, {"text", "json", "dot"});
  if (f.format == "json") out << to_json(g).dump(2) << "\n";
  else if (f.format == "dot") out << export_dot(g, title);
  else out << to_text(g);
}

std::string title_of(const MechanisedCausalGame& model, const Flags& f) {
  return model.name().empty() ? std::filesystem::path(f.model).stem().string() : model.name();
}

int cmd_solve(const Flags& f, std::ostream& out, std::ostream&) {
  require_format(f, {"text", "json"});
  const auto model = load_model(f.model);
  const auto profile = solve(model.game());
  if (f.format == "json") out << solve_json(model.game(), profile).dump(2) << "\n";
  else out << solve_text(model.game(), profile);
  return kExitOk;
}

int cmd_discover(const Flags& f, std::ostream& out, std::ostream& err) {
  const auto model = load_model(f.model);
  warn_restricted(model, f, err);
  GameOracle oracle(model);
  print_graph(discover(oracle, options_of(f)), f, title_of(model, f), out);
  return kExitOk;
}

int cmd_identify(const Flags& f, std::ostream& out, std::ostream& err) {
  const auto model = load_model(f.model);
  warn_restricted(model, f, err);
  GameOracle oracle(model);
  print_graph(discover_game(oracle, options_of(f)), f, title_of(model, f), out);
  return kExitOk;
}

int cmd_mechanise(const Flags& f, std::ostream& out, std::ostream&) {
  const auto model = load_model(f.model);
  print_graph(mechanise(game_graph_of(model.game())), f, title_of(model, f), out);
  return kExitOk;
}

int cmd_roundtrip(const Flags& f, std::ostream& out, std::ostream& err) {
  require_format(f, {"text", "json"});
  const auto model = load_model(f.model);
  warn_restricted(model, f, err);
  const auto game_report = verify_left_inverse_game(game_graph_of(model.game()));
  GameOracle oracle(model);
  const auto mech_report = verify_left_inverse_mech(discover(oracle, options_of(f)));
  if (f.format == "json") {
    nlohmann::ordered_json j;
    j["game_roundtrip"] = to_json(game_report);
    j["mechanised_roundtrip"] = to_json(mech_report);
    out << j.dump(2) << "\n";
  } else {
    out << "identify(mechanise(game graph)): " << to_text(game_report);
    out << "mechanise(identify(discovered graph)): " << to_text(mech_report);
  }
  return kExitOk;
}

int cmd_export_dot(const Flags& f, std::ostream& out, std::ostream&) {
  const auto model = load_model(f.model);
  const GameGraph g = game_graph_of(model.game());
  if (f.graph == "game") out << export_dot(g, title_of(model, f));
  else out << export_dot(mechanise(g), title_of(model, f));
  return kExitOk;
}

int cmd_fixtures_list(const Flags&, std::ostream& out, std::ostream&) {
  for (const auto& name : fixture_names()) {
    const auto model = load_model((fixture_directory() / (name + ".yaml")).string());
    out << name;
    if (!model.description().empty()) out << ": " << model.description();
    out << "\n";
  }
  return kExitOk;
}

int cmd_fixtures_run(const Flags& f, std::ostream& out, std::ostream& err) {
  std::vector<std::string> names = f.fixtures.empty() ? fixture_names() : f.fixtures;
  bool all_ok = true;
  for (const auto& name : names) {
    const auto start = std::chrono::steady_clock::now();
    std::string status;
    try {
      const auto model = load_model((fixture_directory() / (name + ".yaml")).string());
      GameOracle oracle(model);
      const auto got = to_json(discover_game(oracle, options_of(f)));
      const auto golden_path = fixture_directory() / (name + ".identify.json");
      std::ifstream golden_in(golden_path);
      if (!golden_in) {
        status = "FAIL (no expected graph " + golden_path.filename().string() + ")";
      } else {
        const auto expected = nlohmann::ordered_json::parse(golden_in);
        status = expected == got ? "PASS" : "FAIL (identify output differs from " + golden_path.filename().string() + ")";
        if (expected != got) err << name << " got:\n" << got.dump(2) << "\n";
      }
    } catch (const std::exception& e) {
      status = std::string("FAIL (") + e.what() + ")";
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (status != "PASS") all_ok = false;
    out << status.substr(0, 4) << " " << name << " " << std::fixed << std::setprecision(2) << seconds << "s";
    if (status.size() > 4) out << " " << status.substr(5);
    out << "\n";
  }
  return all_ok ? kExitOk : kExitAlgorithmError;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact causal games, mechanised SCMs and agent discovery"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags flags;
  app.add_option("--budget", flags.budget, "oracle probe budget for discovery (default 1e9 or $AGENTDISC_BUDGET)")
      ->check(CLI::PositiveNumber);
  app.add_option("--format", flags.format, "output format")->check(CLI::IsMember({"text", "json", "dot"}));
  app.add_flag("--restricted-ok", flags.restricted_ok, "suppress the restricted-candidate warning");

  std::function<int(const Flags&, std::ostream&, std::ostream&)> action;
  auto model_command = [&](const std::string& name, const std::string& help, auto fn) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("model", flags.model, "model file (the .yaml extension may be omitted)")->required();
    sub->callback([&action, fn] { action = fn; });
    return sub;
  };
  model_command("solve", "print the equilibrium profile and each agent's expected utility", cmd_solve);
  model_command("discover", "recover the edge-labelled mechanised graph from interventions", cmd_discover);
  model_command("identify", "discover, then identify agents, decisions and utilities", cmd_identify);
  model_command("mechanise", "mechanised graph implied by the declared game graph", cmd_mechanise);
  model_command("roundtrip", "left-inverse checks between game graphs and mechanised graphs", cmd_roundtrip);
  auto* dot = model_command("export-dot", "Graphviz rendering of the declared game graph", cmd_export_dot);
  dot->add_option("--graph", flags.graph, "game or mech")->check(CLI::IsMember({"game", "mech"}));
  auto* fixtures = app.add_subcommand("fixtures", "shipped example models");
  fixtures->require_subcommand(1);
  fixtures->add_subcommand("list", "list the shipped fixtures")->callback([&] { action = cmd_fixtures_list; });
  auto* run = fixtures->add_subcommand("run", "identify every fixture and compare with its expected graph");
  run->add_option("names", flags.fixtures, "fixtures to run (default: all)");
  run->callback([&] { action = cmd_fixtures_run; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitModelError;
  }

  try {
    return action(flags, out, err);
  } catch (const BudgetExhausted& e) {
    err << "error: " << e.what() << "\n";
    err << "edges found before the budget ran out:\n";
    for (const auto& [a, b] : e.partial_edges()) err << "  " << a << " -> " << b << "\n";
    return kExitAlgorithmError;
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitModelError;
  } catch (const ModelError& e) {
    err << "model error: " << e.what() << "\n";
    return kExitModelError;
  } catch (const AlgorithmError& e) {
    err << "algorithm error: " << e.what() << "\n";
    return kExitAlgorithmError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitAlgorithmError;
  }
}

}  // namespace agentdisc
