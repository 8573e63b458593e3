#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace agentdisc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The input model (or a query against it) is invalid.
class ModelError : public Error {
 public:
  using Error::Error;
};

// An algorithm could not produce a result for a valid input.
class AlgorithmError : public Error {
 public:
  using Error::Error;
};

class SizeGuardError : public AlgorithmError {
 public:
  using AlgorithmError::AlgorithmError;
};

class NoEquilibriumError : public AlgorithmError {
 public:
  using AlgorithmError::AlgorithmError;
};

class FixedPointError : public AlgorithmError {
 public:
  using AlgorithmError::AlgorithmError;
};

// Discovered edges do not form a mechanised causal graph.
class ShapeError : public AlgorithmError {
 public:
  using AlgorithmError::AlgorithmError;
};

// The probe budget ran out. `partial_edges` (source, target node names) each
// have a witness, so they are a lower bound on the true edge set.
class BudgetExhausted : public AlgorithmError {
 public:
  BudgetExhausted(const std::string& what, std::vector<std::pair<std::string, std::string>> partial_edges)
      : AlgorithmError(what), partial_edges_(std::move(partial_edges)) {}
  const std::vector<std::pair<std::string, std::string>>& partial_edges() const noexcept { return partial_edges_; }

 private:
  std::vector<std::pair<std::string, std::string>> partial_edges_;
};

}  // namespace agentdisc
