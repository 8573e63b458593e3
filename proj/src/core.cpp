#include "agentdisc/core.hpp"

#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>

#include "agentdisc/errors.hpp"

namespace agentdisc {

Domain::Domain(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) throw std::invalid_argument("domain must have at least one outcome");
  std::set<std::string> seen;
  for (const auto& l : labels_)
    if (!seen.insert(l).second) throw std::invalid_argument("duplicate outcome label '" + l + "'");
}

Domain Domain::binary() { return Domain({"0", "1"}); }

std::optional<std::size_t> Domain::find(std::string_view label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i)
    if (labels_[i] == label) return i;
  return std::nullopt;
}

std::vector<Assignment> enumerate_assignments(const std::vector<VariableId>& vars,
                                              const std::map<VariableId, Domain>& domains) {
  std::vector<std::size_t> sizes;
  for (const auto& v : vars) {
    auto it = domains.find(v);
    if (it == domains.end()) throw std::invalid_argument("unknown variable '" + v + "'");
    sizes.push_back(it->second.size());
  }
  std::vector<Assignment> out;
  std::vector<std::size_t> digits(vars.size(), 0);
  while (true) {
    Assignment a;
    for (std::size_t i = 0; i < vars.size(); ++i) a[vars[i]] = digits[i];
    out.push_back(std::move(a));
    std::size_t i = vars.size();
    while (i > 0) {
      --i;
      if (++digits[i] < sizes[i]) break;
      digits[i] = 0;
      if (i == 0) return out;
    }
    if (vars.empty()) return out;
  }
}

Distribution::Distribution(std::vector<Rational> mass)
    : mass_(std::make_shared<const std::vector<Rational>>(std::move(mass))) {
  if (mass_->empty()) throw std::invalid_argument("distribution over an empty outcome space");
  Rational total = 0;
  for (const auto& m : *mass_) {
    if (m < 0) throw std::invalid_argument("negative probability " + to_string(m));
    total += m;
  }
  if (total != 1) throw std::invalid_argument("probabilities sum to " + to_string(total) + ", not 1");
}

Distribution::Distribution(Unchecked, std::vector<Rational> mass)
    : mass_(std::make_shared<const std::vector<Rational>>(std::move(mass))) {}

Distribution Distribution::point(std::size_t size, std::size_t outcome) {
  if (outcome >= size) throw std::invalid_argument("point mass outside the outcome space");
  static std::mutex mutex;
  static std::map<std::pair<std::size_t, std::size_t>, Distribution> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find({size, outcome});
  if (it != cache.end()) return it->second;
  std::vector<Rational> mass(size, Rational(0));
  mass[outcome] = 1;
  return cache.emplace(std::pair{size, outcome}, Distribution(Unchecked{}, std::move(mass)))
      .first->second;
}

Distribution Distribution::uniform(std::size_t size) {
  if (size == 0) throw std::invalid_argument("distribution over an empty outcome space");
  return Distribution(Unchecked{}, std::vector<Rational>(size, Rational(1, size)));
}

std::optional<std::size_t> Distribution::point_outcome() const {
  for (std::size_t i = 0; i < mass_->size(); ++i)
    if ((*mass_)[i] == 1) return i;
  return std::nullopt;
}

bool operator==(const Distribution& a, const Distribution& b) {
  return a.mass_ == b.mass_ || *a.mass_ == *b.mass_;
}

bool distributions_equal(const Distribution& a, const Distribution& b) {
  if (a.size() != b.size()) throw std::invalid_argument("distributions over different outcome spaces");
  return a == b;
}

std::string to_string(const Distribution& d) {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < d.size(); ++i) os << (i ? ", " : "") << i << ": " << to_string(d[i]);
  os << '}';
  return os.str();
}

std::size_t product_of(std::span<const std::size_t> sizes) {
  std::size_t p = 1;
  for (auto s : sizes) {
    if (s != 0 && p > std::numeric_limits<std::size_t>::max() / s)
      return std::numeric_limits<std::size_t>::max();
    p *= s;
  }
  return p;
}

Cpt::Cpt(VariableId child, std::vector<VariableId> parents, std::vector<std::size_t> parent_sizes,
         std::size_t child_size, std::vector<Distribution> rows) {
  if (child.empty()) throw std::invalid_argument("CPT child must be named");
  if (parents.size() != parent_sizes.size())
    throw std::invalid_argument("CPT for '" + child + "': parent list and sizes differ in length");
  if (rows.size() != product_of(parent_sizes))
    throw std::invalid_argument("CPT for '" + child + "' needs " +
                                std::to_string(product_of(parent_sizes)) + " rows, got " +
                                std::to_string(rows.size()));
  auto data = std::make_shared<Data>();
  data->deterministic = true;
  data->constant = true;
  for (const auto& r : rows) {
    if (r.size() != child_size)
      throw std::invalid_argument("CPT for '" + child + "': row over " + std::to_string(r.size()) +
                                  " outcomes, expected " + std::to_string(child_size));
    if (!r.point_outcome()) data->deterministic = false;
    if (!(r == rows.front())) data->constant = false;
  }
  data->child = std::move(child);
  data->parents = std::move(parents);
  data->parent_sizes = std::move(parent_sizes);
  data->child_size = child_size;
  data->rows = std::move(rows);
  data_ = std::move(data);
}

Cpt Cpt::deterministic(VariableId child, std::vector<VariableId> parents,
                       std::vector<std::size_t> parent_sizes, std::size_t child_size,
                       const std::vector<std::size_t>& outcomes) {
  std::vector<Distribution> rows;
  rows.reserve(outcomes.size());
  for (auto o : outcomes) rows.push_back(Distribution::point(child_size, o));
  return Cpt(std::move(child), std::move(parents), std::move(parent_sizes), child_size, std::move(rows));
}

Cpt Cpt::constant(VariableId child, std::vector<VariableId> parents,
                  std::vector<std::size_t> parent_sizes, const Distribution& row) {
  std::vector<Distribution> rows(product_of(parent_sizes), row);
  const std::size_t size = row.size();
  return Cpt(std::move(child), std::move(parents), std::move(parent_sizes), size, std::move(rows));
}

std::size_t Cpt::row_index(std::span<const std::size_t> parent_outcomes) const {
  const auto& sizes = data_->parent_sizes;
  if (parent_outcomes.size() != sizes.size())
    throw std::invalid_argument("CPT for '" + data_->child + "': wrong number of parent outcomes");
  std::size_t index = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (parent_outcomes[i] >= sizes[i])
      throw std::invalid_argument("CPT for '" + data_->child + "': parent outcome out of range");
    index = index * sizes[i] + parent_outcomes[i];
  }
  return index;
}

std::optional<std::vector<std::size_t>> Cpt::outcomes() const {
  if (!data_->deterministic) return std::nullopt;
  std::vector<std::size_t> out;
  out.reserve(data_->rows.size());
  for (const auto& r : data_->rows) out.push_back(*r.point_outcome());
  return out;
}

bool operator==(const Cpt& a, const Cpt& b) {
  if (a.data_ == b.data_) return true;
  const auto& x = *a.data_;
  const auto& y = *b.data_;
  return x.child_size == y.child_size && x.parent_sizes == y.parent_sizes && x.rows == y.rows &&
         x.child == y.child && x.parents == y.parents;
}

std::string to_string(const Cpt& cpt) {
  std::ostringstream os;
  os << cpt.child();
  if (!cpt.parents().empty()) {
    os << " |";
    for (const auto& p : cpt.parents()) os << ' ' << p;
  }
  os << ": ";
  if (auto det = cpt.outcomes()) {
    os << '[';
    for (std::size_t i = 0; i < det->size(); ++i) os << (i ? " " : "") << (*det)[i];
    os << ']';
  } else {
    for (std::size_t i = 0; i < cpt.row_count(); ++i) os << (i ? " " : "") << to_string(cpt.row(i));
  }
  return os.str();
}

std::size_t deterministic_cpt_count(std::size_t child_size, std::size_t row_count) {
  std::size_t count = 1;
  for (std::size_t r = 0; r < row_count; ++r) {
    if (child_size != 0 && count > std::numeric_limits<std::size_t>::max() / child_size)
      return std::numeric_limits<std::size_t>::max();
    count *= child_size;
  }
  return count;
}

namespace {

struct Shape {
  std::vector<std::size_t> parent_sizes;
  std::size_t child_size;
};

Shape shape_of(const VariableId& child, const std::vector<VariableId>& parents,
               const std::map<VariableId, Domain>& domains) {
  auto find = [&](const VariableId& v) -> const Domain& {
    auto it = domains.find(v);
    if (it == domains.end()) throw std::invalid_argument("unknown variable '" + v + "'");
    return it->second;
  };
  Shape s{{}, find(child).size()};
  for (const auto& p : parents) s.parent_sizes.push_back(find(p).size());
  return s;
}

}  // namespace

std::vector<Cpt> enumerate_deterministic_cpts(const VariableId& child,
                                              const std::vector<VariableId>& parents,
                                              const std::map<VariableId, Domain>& domains,
                                              std::size_t guard) {
  const Shape s = shape_of(child, parents, domains);
  const std::size_t rows = product_of(s.parent_sizes);
  const std::size_t count = deterministic_cpt_count(s.child_size, rows);
  if (count > guard)
    throw SizeGuardError("variable '" + child + "' has " +
                         (count == std::numeric_limits<std::size_t>::max() ? std::string("too many")
                                                                           : std::to_string(count)) +
                         " deterministic CPTs, over the guard of " + std::to_string(guard));
  std::vector<Cpt> out;
  out.reserve(count);
  std::vector<std::size_t> digits(rows, 0);
  for (std::size_t k = 0; k < count; ++k) {
    out.push_back(Cpt::deterministic(child, parents, s.parent_sizes, s.child_size, digits));
    for (std::size_t i = rows; i > 0; --i) {
      if (++digits[i - 1] < s.child_size) break;
      digits[i - 1] = 0;
    }
  }
  return out;
}

std::vector<Cpt> constant_cpts(const VariableId& child, const std::vector<VariableId>& parents,
                               const std::map<VariableId, Domain>& domains) {
  const Shape s = shape_of(child, parents, domains);
  std::vector<Cpt> out;
  for (std::size_t o = 0; o < s.child_size; ++o)
    out.push_back(Cpt::constant(child, parents, s.parent_sizes, Distribution::point(s.child_size, o)));
  return out;
}

}  // namespace agentdisc
