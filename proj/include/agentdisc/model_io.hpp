#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "agentdisc/mechanised_game.hpp"

namespace agentdisc {

inline constexpr int kFormatVersion = 1;

// Parses a YAML model document. Errors are ModelError with
// "<source>:<line>:<column>: <rule>" messages.
MechanisedCausalGame parse_model(std::string_view text, const std::string& source = "<model>");

// Canonical YAML form; parse_model(serialise_model(m)) reproduces m.
std::string serialise_model(const MechanisedCausalGame& model);

// Accepts a path with or without the ".yaml" extension; "fixtures/<name>"
// also resolves against the shipped fixture directory.
std::filesystem::path resolve_model_path(const std::string& path);
MechanisedCausalGame load_model(const std::string& path);

std::filesystem::path fixture_directory();

}  // namespace agentdisc
