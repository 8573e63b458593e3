#include "agentdisc/model_io.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "agentdisc/errors.hpp"
#include "agentdisc/rational.hpp"

#ifndef AGENTDISC_FIXTURE_DIR
#define AGENTDISC_FIXTURE_DIR "fixtures"
#endif

namespace agentdisc {

namespace {

struct Parser {
  std::string source;

  [[noreturn]] void fail(const YAML::Node& node, const std::string& message) const {
    const YAML::Mark mark = node.Mark();
    if (mark.is_null()) throw ModelError(source + ": " + message);
    throw ModelError(source + ":" + std::to_string(mark.line + 1) + ":" + std::to_string(mark.column + 1) + ": " +
                     message);
  }

  void expect_map(const YAML::Node& node, const std::string& what) const {
    if (!node.IsMap()) fail(node, what + " must be a mapping");
  }
  void expect_seq(const YAML::Node& node, const std::string& what) const {
    if (!node.IsSequence()) fail(node, what + " must be a list");
  }
  std::string scalar(const YAML::Node& node, const std::string& what) const {
    if (!node.IsScalar()) fail(node, what + " must be a scalar");
    return node.Scalar();
  }
  std::vector<std::string> strings(const YAML::Node& node, const std::string& what) const {
    expect_seq(node, what);
    std::vector<std::string> out;
    for (const auto& item : node) out.push_back(scalar(item, what + " entry"));
    return out;
  }
  void allow_keys(const YAML::Node& node, std::initializer_list<const char*> keys, const std::string& what) const {
    for (const auto& kv : node) {
      const std::string key = scalar(kv.first, "key");
      bool known = false;
      for (const char* k : keys) known = known || key == k;
      if (!known) fail(kv.first, "unknown key '" + key + "' in " + what);
    }
  }
  Rational rational(const YAML::Node& node, const std::string& what) const {
    const std::string text = scalar(node, what);
    try {
      return parse_rational(text);
    } catch (const std::invalid_argument& e) {
      fail(node, what + ": " + e.what());
    }
  }
};

struct VariableShape {
  std::string name;
  Domain domain = Domain::binary();
  std::vector<std::string> parents;
  std::vector<std::size_t> parent_sizes;
};

// A CPT literal: a mapping holding either `cpt` (rows of probabilities) or
// `table` (one outcome label per row).
std::optional<Cpt> parse_cpt(const Parser& p, const YAML::Node& node, const VariableShape& v, bool required) {
  const YAML::Node rows = node["cpt"];
  const YAML::Node table = node["table"];
  if (rows && table) p.fail(node, "give either 'cpt' or 'table' for '" + v.name + "', not both");
  std::size_t row_count = 1;
  for (auto s : v.parent_sizes) row_count *= s;
  if (table) {
    p.expect_seq(table, "table of '" + v.name + "'");
    if (table.size() != row_count)
      p.fail(table, "table of '" + v.name + "' needs " + std::to_string(row_count) + " entries, one per parent assignment");
    std::vector<std::size_t> outcomes;
    for (const auto& entry : table) {
      const std::string label = p.scalar(entry, "table entry");
      auto index = v.domain.find(label);
      if (!index) p.fail(entry, "'" + label + "' is not an outcome of '" + v.name + "'");
      outcomes.push_back(*index);
    }
    return Cpt::deterministic(v.name, v.parents, v.parent_sizes, v.domain.size(), outcomes);
  }
  if (rows) {
    p.expect_seq(rows, "cpt of '" + v.name + "'");
    std::vector<YAML::Node> row_nodes;
    const bool flat = rows.size() > 0 && rows[0].IsScalar();
    if (flat) {
      row_nodes.push_back(rows);
    } else {
      for (const auto& r : rows) row_nodes.push_back(r);
    }
    if (row_nodes.size() != row_count)
      p.fail(rows, "cpt of '" + v.name + "' needs " + std::to_string(row_count) + " rows, one per parent assignment");
    std::vector<Distribution> dists;
    for (std::size_t i = 0; i < row_nodes.size(); ++i) {
      const YAML::Node& r = row_nodes[i];
      p.expect_seq(r, "cpt row");
      if (r.size() != v.domain.size())
        p.fail(r, "row " + std::to_string(i) + " of '" + v.name + "' needs " + std::to_string(v.domain.size()) +
                      " probabilities");
      std::vector<Rational> mass;
      for (const auto& m : r) mass.push_back(p.rational(m, "probability"));
      try {
        dists.emplace_back(std::move(mass));
      } catch (const std::invalid_argument& e) {
        p.fail(r, "row " + std::to_string(i) + " of '" + v.name + "': " + e.what());
      }
    }
    return Cpt(v.name, v.parents, v.parent_sizes, v.domain.size(), std::move(dists));
  }
  if (required) p.fail(node, "variable '" + v.name + "' needs a 'cpt' or 'table'");
  return std::nullopt;
}

Cpt parse_literal(const Parser& p, const YAML::Node& node, const VariableShape& v) {
  p.expect_map(node, "CPT literal for '" + v.name + "'");
  p.allow_keys(node, {"cpt", "table"}, "CPT literal");
  return *parse_cpt(p, node, v, true);
}

}  // namespace

MechanisedCausalGame parse_model(std::string_view text, const std::string& source) {
  Parser p{source};
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw ModelError(source + ":" + std::to_string(e.mark.line + 1) + ":" + std::to_string(e.mark.column + 1) +
                     ": " + e.msg);
  }
  if (!root.IsMap()) throw ModelError(source + ": model document must be a mapping");
  p.allow_keys(root, {"format_version", "name", "description", "agents", "variables", "mechanisms"}, "model");
  const YAML::Node version = root["format_version"];
  if (!version) throw ModelError(source + ": missing 'format_version'");
  if (p.scalar(version, "format_version") != std::to_string(kFormatVersion))
    p.fail(version, "unsupported format_version '" + version.Scalar() + "', expected " + std::to_string(kFormatVersion));
  const std::string name = root["name"] ? p.scalar(root["name"], "name") : std::string();
  const std::string description = root["description"] ? p.scalar(root["description"], "description") : std::string();
  std::vector<std::string> agents;
  if (root["agents"]) agents = p.strings(root["agents"], "agents");
  const std::set<std::string> agent_set(agents.begin(), agents.end());

  const YAML::Node vars = root["variables"];
  if (!vars) throw ModelError(source + ": missing 'variables'");
  p.expect_seq(vars, "variables");

  std::vector<VariableShape> shapes;
  std::map<std::string, std::size_t> index;
  for (const auto& node : vars) {
    p.expect_map(node, "variable");
    p.allow_keys(node, {"name", "domain", "parents", "kind", "agent", "agents", "cpt", "table", "values"}, "variable");
    if (!node["name"]) p.fail(node, "variable needs a 'name'");
    VariableShape s;
    s.name = p.scalar(node["name"], "name");
    if (s.name.empty()) p.fail(node["name"], "variable name must be non-empty");
    if (!index.emplace(s.name, shapes.size()).second) p.fail(node["name"], "duplicate variable '" + s.name + "'");
    if (node["domain"]) {
      try {
        s.domain = Domain(p.strings(node["domain"], "domain"));
      } catch (const std::invalid_argument& e) {
        p.fail(node["domain"], e.what());
      }
    }
    if (node["parents"]) s.parents = p.strings(node["parents"], "parents");
    shapes.push_back(std::move(s));
  }
  std::size_t position = 0;
  for (const auto& node : vars) {
    auto& s = shapes[position++];
    std::set<std::string> seen;
    for (std::size_t i = 0; i < s.parents.size(); ++i) {
      const YAML::Node pn = node["parents"][i];
      auto it = index.find(s.parents[i]);
      if (it == index.end()) p.fail(pn, "unknown parent '" + s.parents[i] + "' of '" + s.name + "'");
      if (s.parents[i] == s.name) p.fail(pn, "'" + s.name + "' cannot be its own parent");
      if (!seen.insert(s.parents[i]).second) p.fail(pn, "parent '" + s.parents[i] + "' listed twice");
      s.parent_sizes.push_back(shapes[it->second].domain.size());
    }
  }

  std::vector<VariableSpec> specs;
  position = 0;
  for (const auto& node : vars) {
    const VariableShape& s = shapes[position++];
    VariableSpec spec;
    spec.name = s.name;
    spec.domain = s.domain;
    spec.parents = s.parents;
    const std::string kind = node["kind"] ? p.scalar(node["kind"], "kind") : "chance";
    if (kind == "chance") spec.kind = VariableKind::chance;
    else if (kind == "decision") spec.kind = VariableKind::decision;
    else if (kind == "utility") spec.kind = VariableKind::utility;
    else p.fail(node["kind"], "kind must be chance, decision or utility, not '" + kind + "'");
    if (node["agent"] && node["agents"]) p.fail(node, "give either 'agent' or 'agents'");
    if (node["agent"]) spec.agents.push_back(p.scalar(node["agent"], "agent"));
    if (node["agents"]) spec.agents = p.strings(node["agents"], "agents");
    for (std::size_t i = 0; i < spec.agents.size(); ++i)
      if (!agent_set.contains(spec.agents[i]))
        p.fail(node["agent"] ? node["agent"] : node["agents"][i], "unknown agent '" + spec.agents[i] + "'");
    if (spec.kind == VariableKind::decision) {
      if (node["cpt"] || node["table"]) p.fail(node, "decision '" + s.name + "' must not have a CPT");
      if (spec.agents.size() != 1) p.fail(node, "decision '" + s.name + "' needs exactly one agent");
    } else {
      spec.cpt = parse_cpt(p, node, s, true);
    }
    if (spec.kind == VariableKind::utility) {
      if (spec.agents.empty()) p.fail(node, "utility '" + s.name + "' needs an agent");
      if (!node["values"]) p.fail(node, "utility '" + s.name + "' needs 'values', one per outcome");
      p.expect_seq(node["values"], "values");
      if (node["values"].size() != s.domain.size())
        p.fail(node["values"], "utility '" + s.name + "' needs " + std::to_string(s.domain.size()) + " values");
      for (const auto& v : node["values"]) spec.values.push_back(p.rational(v, "utility value"));
    } else {
      if (node["values"]) p.fail(node["values"], "only utilities carry 'values'");
      if (spec.kind == VariableKind::chance && !spec.agents.empty())
        p.fail(node, "chance variable '" + s.name + "' must not have an agent");
    }
    specs.push_back(std::move(spec));
  }

  std::vector<MechanismSpec> mechanisms(shapes.size());
  if (const YAML::Node mech = root["mechanisms"]) {
    p.expect_map(mech, "mechanisms");
    for (const auto& kv : mech) {
      const std::string var = p.scalar(kv.first, "mechanism name");
      auto it = index.find(var);
      if (it == index.end()) p.fail(kv.first, "mechanism section for unknown variable '" + var + "'");
      const std::size_t v = it->second;
      const YAML::Node body = kv.second;
      p.expect_map(body, "mechanism section");
      p.allow_keys(body, {"restricted", "candidates", "extras", "dependencies"}, "mechanism section");
      MechanismSpec& m = mechanisms[v];
      if (body["restricted"]) {
        const std::string flag = p.scalar(body["restricted"], "restricted");
        if (flag != "true" && flag != "false") p.fail(body["restricted"], "restricted must be true or false");
        m.restricted = flag == "true";
      }
      if (m.restricted && body["extras"]) p.fail(body["extras"], "restricted mechanisms list 'candidates', not 'extras'");
      if (!m.restricted && body["candidates"])
        p.fail(body["candidates"], "'candidates' needs 'restricted: true'; use 'extras' to add to the full set");
      const YAML::Node list = m.restricted ? body["candidates"] : body["extras"];
      if (m.restricted && !list) p.fail(body, "restricted mechanism of '" + var + "' needs 'candidates'");
      if (list) {
        p.expect_seq(list, "candidate list");
        for (const auto& c : list) m.candidates.push_back(parse_literal(p, c, shapes[v]));
      }
      if (const YAML::Node deps = body["dependencies"]) {
        p.expect_seq(deps, "dependencies");
        if (specs[v].kind == VariableKind::decision)
          p.fail(deps, "decision '" + var + "' cannot have mechanism dependencies");
        for (const auto& d : deps) {
          p.expect_map(d, "dependency");
          p.allow_keys(d, {"when", "use"}, "dependency");
          if (!d["when"] || !d["use"]) p.fail(d, "dependency needs 'when' and 'use'");
          p.expect_map(d["when"], "when");
          std::vector<std::pair<std::size_t, Cpt>> when;
          for (const auto& w : d["when"]) {
            const std::string other = p.scalar(w.first, "mechanism name");
            auto jt = index.find(other);
            if (jt == index.end()) p.fail(w.first, "dependency reads unknown mechanism '" + other + "'");
            if (jt->second == v) p.fail(w.first, "mechanism of '" + var + "' cannot depend on itself");
            if (specs[jt->second].kind == VariableKind::decision)
              p.fail(w.first, "dependency reads decision mechanism '" + other + "'");
            when.emplace_back(jt->second, parse_literal(p, w.second, shapes[jt->second]));
          }
          m.dependencies.push_back({std::move(when), parse_literal(p, d["use"], shapes[v])});
        }
      }
    }
  }

  try {
    CausalGame game(std::move(agents), std::move(specs));
    return MechanisedCausalGame(std::move(game), std::move(mechanisms), name, description);
  } catch (const ModelError& e) {
    throw ModelError(source + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ModelError(source + ": " + e.what());
  }
}

namespace {

void emit_cpt(YAML::Emitter& out, const Cpt& cpt, const Domain& domain) {
  if (auto outcomes = cpt.outcomes()) {
    out << YAML::Key << "table" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (auto o : *outcomes) out << domain.label(o);
    out << YAML::EndSeq;
    return;
  }
  out << YAML::Key << "cpt" << YAML::Value << YAML::BeginSeq;
  for (const auto& row : cpt.rows()) {
    out << YAML::Flow << YAML::BeginSeq;
    for (const auto& m : row.masses()) out << to_string(m);
    out << YAML::EndSeq;
  }
  out << YAML::EndSeq;
}

void emit_literal(YAML::Emitter& out, const Cpt& cpt, const Domain& domain) {
  out << YAML::BeginMap;
  emit_cpt(out, cpt, domain);
  out << YAML::EndMap;
}

}  // namespace

std::string serialise_model(const MechanisedCausalGame& model) {
  const CausalGame& game = model.game();
  const ObjectGraph& g = game.graph();
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "format_version" << YAML::Value << kFormatVersion;
  if (!model.name().empty()) out << YAML::Key << "name" << YAML::Value << model.name();
  if (!model.description().empty()) out << YAML::Key << "description" << YAML::Value << model.description();
  out << YAML::Key << "agents" << YAML::Value << YAML::Flow << game.agents();
  out << YAML::Key << "variables" << YAML::Value << YAML::BeginSeq;
  for (std::size_t v = 0; v < g.size(); ++v) {
    const VariableSpec& s = game.specs()[v];
    out << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << s.name;
    out << YAML::Key << "kind" << YAML::Value << to_string(s.kind);
    out << YAML::Key << "domain" << YAML::Value << YAML::Flow << s.domain.labels();
    out << YAML::Key << "parents" << YAML::Value << YAML::Flow << s.parents;
    if (s.kind == VariableKind::decision) {
      out << YAML::Key << "agent" << YAML::Value << s.agents.front();
    } else if (s.kind == VariableKind::utility) {
      out << YAML::Key << "agents" << YAML::Value << YAML::Flow << s.agents;
    }
    if (s.cpt) emit_cpt(out, *s.cpt, s.domain);
    if (s.kind == VariableKind::utility) {
      out << YAML::Key << "values" << YAML::Value << YAML::Flow << YAML::BeginSeq;
      for (const auto& x : s.values) out << to_string(x);
      out << YAML::EndSeq;
    }
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  bool any = false;
  for (std::size_t v = 0; v < g.size(); ++v) {
    const MechanismSpec& m = model.spec(v);
    if (!m.restricted && m.candidates.empty() && m.dependencies.empty()) continue;
    if (!any) {
      out << YAML::Key << "mechanisms" << YAML::Value << YAML::BeginMap;
      any = true;
    }
    out << YAML::Key << g.name(v) << YAML::Value << YAML::BeginMap;
    if (m.restricted) out << YAML::Key << "restricted" << YAML::Value << true;
    if (!m.candidates.empty()) {
      out << YAML::Key << (m.restricted ? "candidates" : "extras") << YAML::Value << YAML::BeginSeq;
      for (const auto& c : m.candidates) emit_literal(out, c, g.domain(v));
      out << YAML::EndSeq;
    }
    if (!m.dependencies.empty()) {
      out << YAML::Key << "dependencies" << YAML::Value << YAML::BeginSeq;
      for (const auto& d : m.dependencies) {
        out << YAML::BeginMap << YAML::Key << "when" << YAML::Value << YAML::BeginMap;
        for (const auto& [w, cpt] : d.when) {
          out << YAML::Key << g.name(w) << YAML::Value;
          emit_literal(out, cpt, g.domain(w));
        }
        out << YAML::EndMap << YAML::Key << "use" << YAML::Value;
        emit_literal(out, d.use, g.domain(v));
        out << YAML::EndMap;
      }
      out << YAML::EndSeq;
    }
    out << YAML::EndMap;
  }
  if (any) out << YAML::EndMap;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

std::filesystem::path fixture_directory() { return std::filesystem::path(AGENTDISC_FIXTURE_DIR); }

std::filesystem::path resolve_model_path(const std::string& path) {
  namespace fs = std::filesystem;
  std::vector<fs::path> tries{fs::path(path), fs::path(path + ".yaml")};
  const fs::path given(path);
  if (given.has_parent_path() && given.parent_path().filename() == "fixtures") {
    tries.push_back(fixture_directory() / given.filename());
    tries.push_back(fixture_directory() / (given.filename().string() + ".yaml"));
  }
  for (const auto& t : tries)
    if (fs::is_regular_file(t)) return t;
  throw ModelError(path + ": no such model file");
}

MechanisedCausalGame load_model(const std::string& path) {
  const auto resolved = resolve_model_path(path);
  std::ifstream in(resolved, std::ios::binary);
  if (!in) throw ModelError(resolved.string() + ": cannot read model file");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_model(text.str(), resolved.string());
}

}  // namespace agentdisc
