#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "omchain/order.hpp"

namespace omchain {

using StateIndex = std::size_t;

/// One positive-probability transition out of a state, with its order label.
struct Transition {
  StateIndex to;
  int order;
};

/// A finite chain parametrized by eps. Transition structure and order labels
/// are fixed; probabilities are evaluated on demand, one row at a time.
/// Immutable after construction.
class OMChain {
 public:
  /// Writes the probabilities of transitions(from) into `out`, same order.
  using RowFn = std::function<void(StateIndex from, double eps, std::span<double> out)>;
  using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

  OMChain(std::vector<std::string> labels, std::vector<std::vector<Transition>> transitions,
          RowFn row);

  std::size_t size() const noexcept { return labels_.size(); }
  const std::string& label(StateIndex x) const { return labels_.at(x); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  /// Sorted by destination. Includes the self-loop when it is positive.
  std::span<const Transition> transitions(StateIndex from) const { return transitions_.at(from); }

  /// nullopt when P(from, to) is identically zero.
  Order order(StateIndex from, StateIndex to) const;

  std::vector<double> row(StateIndex from, double eps) const;
  double prob(StateIndex from, StateIndex to, double eps) const;
  SparseMatrix matrix(double eps) const;

  std::size_t transition_count() const noexcept { return transition_count_; }

 private:
  std::vector<std::string> labels_;
  std::vector<std::vector<Transition>> transitions_;
  RowFn row_;
  std::size_t transition_count_ = 0;
};

/// Assembles an OMChain from individually specified transitions. Meant for
/// hand-written and randomized chains; the particle models have their own
/// row evaluator.
class ChainBuilder {
 public:
  using ProbFn = std::function<double(double eps)>;

  explicit ChainBuilder(std::vector<std::string> labels);
  explicit ChainBuilder(std::size_t state_count);

  ChainBuilder& add(StateIndex from, StateIndex to, int order, ProbFn prob);
  /// P(from, to) = coefficient * eps^order.
  ChainBuilder& add_power(StateIndex from, StateIndex to, double coefficient, int order);
  /// Self-loop carrying 1 - (sum of the row's other entries).
  ChainBuilder& add_remainder(StateIndex from, int order = 0);
  ChainBuilder& add_remainder_everywhere(int order = 0);

  OMChain build() const;

 private:
  struct Entry {
    StateIndex to;
    int order;
    ProbFn prob;  // empty for a remainder entry
  };
  std::vector<std::string> labels_;
  std::vector<std::vector<Entry>> rows_;
};

}  // namespace omchain
