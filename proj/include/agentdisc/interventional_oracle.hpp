#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "agentdisc/core.hpp"

namespace agentdisc {

enum class Layer : std::uint8_t { object, mechanism };

// A node of the mechanised graph: object variable i or its mechanism M_i.
struct Node {
  Layer layer = Layer::object;
  std::size_t index = 0;

  static Node object(std::size_t i) { return {Layer::object, i}; }
  static Node mechanism(std::size_t i) { return {Layer::mechanism, i}; }
  friend auto operator<=>(const Node&, const Node&) = default;
};

// Intervention setting over all 2n nodes: objects first, then mechanisms.
// kFree leaves a node alone; otherwise an object takes that outcome index
// and a mechanism takes that entry of its intervention vocabulary.
using Setting = std::span<const std::int32_t>;
inline constexpr std::int32_t kFree = -1;

// Answer to a probe: the distribution of an object target, or the point-mass
// value of a mechanism target.
class Response {
 public:
  explicit Response(Distribution d) : value_(std::move(d)) {}
  explicit Response(Cpt c) : value_(std::move(c)) {}

  bool is_distribution() const noexcept { return value_.index() == 0; }
  const Distribution& distribution() const { return std::get<0>(value_); }
  const Cpt& mechanism() const { return std::get<1>(value_); }
  bool same_storage(const Response& other) const noexcept {
    if (value_.index() != other.value_.index()) return false;
    return is_distribution() ? distribution().same_storage(other.distribution())
                             : mechanism().same_storage(other.mechanism());
  }

  // Address of the shared immutable payload; equal ids imply equal values.
  const void* storage_id() const noexcept {
    return is_distribution() ? distribution().storage_id() : mechanism().storage_id();
  }

  friend bool operator==(const Response& a, const Response& b) { return a.value_ == b.value_; }

 private:
  std::variant<Distribution, Cpt> value_;
};

// The only channel discovery algorithms may use to learn about a model.
// Implementations must be safe to call from several threads at once.
class InterventionalOracle {
 public:
  virtual ~InterventionalOracle() = default;

  virtual std::size_t variable_count() const = 0;
  virtual const std::string& variable_name(std::size_t v) const = 0;
  virtual std::size_t outcome_count(std::size_t v) const = 0;
  // Mechanism settings [0, candidate_count) form the candidate set.
  virtual std::size_t candidate_count(std::size_t v) const = 0;
  // Vocabulary indices of the structural (parent-independent) settings of M_v.
  virtual std::vector<std::int32_t> structural_settings(std::size_t v) const = 0;

  virtual Response probe(Node target, Setting setting) const = 0;
};

inline std::string node_name(const InterventionalOracle& oracle, Node node) {
  const std::string& base = oracle.variable_name(node.index);
  return node.layer == Layer::object ? base : "M_" + base;
}

}  // namespace agentdisc
