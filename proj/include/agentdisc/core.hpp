#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "agentdisc/rational.hpp"

namespace agentdisc {

using VariableId = std::string;

// Ordered outcome labels of a variable. Label order is the tie-breaking
// order used by every enumeration in the library.
class Domain {
 public:
  explicit Domain(std::vector<std::string> labels);

  static Domain binary();

  std::size_t size() const noexcept { return labels_.size(); }
  const std::string& label(std::size_t index) const { return labels_.at(index); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::optional<std::size_t> find(std::string_view label) const;

  friend bool operator==(const Domain&, const Domain&) = default;

 private:
  std::vector<std::string> labels_;
};

using Assignment = std::map<VariableId, std::size_t>;

// Full product space of `vars`, first variable most significant.
std::vector<Assignment> enumerate_assignments(const std::vector<VariableId>& vars,
                                              const std::map<VariableId, Domain>& domains);

// Exact distribution over the outcome indices of one variable.
// Immutable; copies share storage.
class Distribution {
 public:
  // Throws std::invalid_argument unless masses are non-negative and sum to 1.
  explicit Distribution(std::vector<Rational> mass);

  static Distribution point(std::size_t size, std::size_t outcome);
  static Distribution uniform(std::size_t size);

  std::size_t size() const noexcept { return mass_->size(); }
  const Rational& operator[](std::size_t outcome) const { return (*mass_)[outcome]; }
  const std::vector<Rational>& masses() const noexcept { return *mass_; }

  // The outcome carrying all the mass, if any.
  std::optional<std::size_t> point_outcome() const;
  bool same_storage(const Distribution& other) const noexcept { return mass_ == other.mass_; }
  const void* storage_id() const noexcept { return mass_.get(); }

  friend bool operator==(const Distribution& a, const Distribution& b);

 private:
  struct Unchecked {};
  Distribution(Unchecked, std::vector<Rational> mass);

  std::shared_ptr<const std::vector<Rational>> mass_;
};

// Exact comparison; throws std::invalid_argument when the outcome spaces differ.
bool distributions_equal(const Distribution& a, const Distribution& b);

std::string to_string(const Distribution& d);

// Conditional probability table. Rows are indexed by parent assignments in
// mixed radix, first parent most significant. Immutable; copies share storage.
class Cpt {
 public:
  Cpt(VariableId child, std::vector<VariableId> parents, std::vector<std::size_t> parent_sizes,
      std::size_t child_size, std::vector<Distribution> rows);

  static Cpt deterministic(VariableId child, std::vector<VariableId> parents,
                           std::vector<std::size_t> parent_sizes, std::size_t child_size,
                           const std::vector<std::size_t>& outcomes);
  static Cpt constant(VariableId child, std::vector<VariableId> parents,
                      std::vector<std::size_t> parent_sizes, const Distribution& row);

  const VariableId& child() const noexcept { return data_->child; }
  const std::vector<VariableId>& parents() const noexcept { return data_->parents; }
  const std::vector<std::size_t>& parent_sizes() const noexcept { return data_->parent_sizes; }
  std::size_t child_size() const noexcept { return data_->child_size; }
  std::size_t row_count() const noexcept { return data_->rows.size(); }

  const Distribution& row(std::size_t index) const { return data_->rows[index]; }
  const std::vector<Distribution>& rows() const noexcept { return data_->rows; }
  std::size_t row_index(std::span<const std::size_t> parent_outcomes) const;
  const Distribution& row_for(std::span<const std::size_t> parent_outcomes) const {
    return row(row_index(parent_outcomes));
  }

  bool is_deterministic() const noexcept { return data_->deterministic; }
  bool is_constant() const noexcept { return data_->constant; }
  // Outcome per row when deterministic.
  std::optional<std::vector<std::size_t>> outcomes() const;

  bool same_storage(const Cpt& other) const noexcept { return data_ == other.data_; }
  const void* storage_id() const noexcept { return data_.get(); }
  friend bool operator==(const Cpt& a, const Cpt& b);

 private:
  struct Data {
    VariableId child;
    std::vector<VariableId> parents;
    std::vector<std::size_t> parent_sizes;
    std::size_t child_size = 0;
    std::vector<Distribution> rows;
    bool deterministic = false;
    bool constant = false;
  };
  explicit Cpt(std::shared_ptr<const Data> data) : data_(std::move(data)) {}

  std::shared_ptr<const Data> data_;
};

std::string to_string(const Cpt& cpt);

inline constexpr std::size_t kDefaultCptGuard = 4096;

// All deterministic CPTs, lexicographic over row choices (first row most
// significant). This is the canonical decision-rule preference order.
// Throws SizeGuardError naming `child` when more than `guard` would be produced.
std::vector<Cpt> enumerate_deterministic_cpts(const VariableId& child,
                                              const std::vector<VariableId>& parents,
                                              const std::map<VariableId, Domain>& domains,
                                              std::size_t guard = kDefaultCptGuard);

// One constant deterministic CPT per outcome of `child`.
std::vector<Cpt> constant_cpts(const VariableId& child, const std::vector<VariableId>& parents,
                               const std::map<VariableId, Domain>& domains);

// Number of deterministic CPTs, saturating at SIZE_MAX.
std::size_t deterministic_cpt_count(std::size_t child_size, std::size_t row_count);

std::size_t product_of(std::span<const std::size_t> sizes);

}  // namespace agentdisc
