#include "omchain/chain.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

#include "omchain/error.hpp"

namespace omchain {

OMChain::OMChain(std::vector<std::string> labels,
                 std::vector<std::vector<Transition>> transitions, RowFn row)
    : labels_(std::move(labels)), transitions_(std::move(transitions)), row_(std::move(row)) {
  if (labels_.size() != transitions_.size()) {
    throw Error(ErrorCode::InvalidParameters, "label count does not match transition rows");
  }
  if (!row_) throw Error(ErrorCode::InvalidParameters, "missing row evaluator");
  for (auto& out : transitions_) {
    std::sort(out.begin(), out.end(),
              [](const Transition& a, const Transition& b) { return a.to < b.to; });
    for (std::size_t k = 0; k < out.size(); ++k) {
      if (out[k].to >= labels_.size()) {
        throw Error(ErrorCode::InvalidParameters, "transition target out of range");
      }
      if (k > 0 && out[k].to == out[k - 1].to) {
        throw Error(ErrorCode::InvalidParameters, "duplicate transition");
      }
    }
    transition_count_ += out.size();
  }
}

Order OMChain::order(StateIndex from, StateIndex to) const {
  auto out = transitions(from);
  auto it = std::lower_bound(out.begin(), out.end(), to,
                             [](const Transition& t, StateIndex v) { return t.to < v; });
  if (it == out.end() || it->to != to) return std::nullopt;
  return OrderMagnitude{it->order};
}

std::vector<double> OMChain::row(StateIndex from, double eps) const {
  std::vector<double> out(transitions(from).size());
  row_(from, eps, out);
  return out;
}

double OMChain::prob(StateIndex from, StateIndex to, double eps) const {
  auto out = transitions(from);
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (out[k].to == to) return row(from, eps)[k];
  }
  return 0.0;
}

OMChain::SparseMatrix OMChain::matrix(double eps) const {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(transition_count_);
  std::vector<double> buffer;
  for (StateIndex x = 0; x < size(); ++x) {
    auto out = transitions(x);
    buffer.resize(out.size());
    row_(x, eps, buffer);
    for (std::size_t k = 0; k < out.size(); ++k) {
      triplets.emplace_back(static_cast<int>(x), static_cast<int>(out[k].to), buffer[k]);
    }
  }
  SparseMatrix m(static_cast<Eigen::Index>(size()), static_cast<Eigen::Index>(size()));
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

ChainBuilder::ChainBuilder(std::vector<std::string> labels)
    : labels_(std::move(labels)), rows_(labels_.size()) {}

ChainBuilder::ChainBuilder(std::size_t state_count) : rows_(state_count) {
  labels_.reserve(state_count);
  for (std::size_t i = 0; i < state_count; ++i) labels_.push_back(std::to_string(i));
}

ChainBuilder& ChainBuilder::add(StateIndex from, StateIndex to, int order, ProbFn prob) {
  if (from >= rows_.size() || to >= rows_.size()) {
    throw Error(ErrorCode::InvalidParameters, "state index out of range");
  }
  if (!prob) throw Error(ErrorCode::InvalidParameters, "empty probability function");
  rows_[from].push_back({to, order, std::move(prob)});
  return *this;
}

ChainBuilder& ChainBuilder::add_power(StateIndex from, StateIndex to, double coefficient,
                                      int order) {
  if (!(coefficient > 0.0)) {
    throw Error(ErrorCode::InvalidParameters, "coefficient must be positive");
  }
  return add(from, to, order,
             [coefficient, order](double eps) { return coefficient * std::pow(eps, order); });
}

ChainBuilder& ChainBuilder::add_remainder(StateIndex from, int order) {
  if (from >= rows_.size()) throw Error(ErrorCode::InvalidParameters, "state index out of range");
  rows_[from].push_back({from, order, {}});
  return *this;
}

ChainBuilder& ChainBuilder::add_remainder_everywhere(int order) {
  for (StateIndex x = 0; x < rows_.size(); ++x) add_remainder(x, order);
  return *this;
}

OMChain ChainBuilder::build() const {
  std::vector<std::vector<Transition>> transitions(rows_.size());
  // Rows are stored sorted by destination so they line up with OMChain's order.
  auto rows = std::make_shared<std::vector<std::vector<Entry>>>(rows_);
  for (StateIndex x = 0; x < rows->size(); ++x) {
    auto& row = (*rows)[x];
    std::stable_sort(row.begin(), row.end(),
                     [](const Entry& a, const Entry& b) { return a.to < b.to; });
    for (const auto& e : row) transitions[x].push_back({e.to, e.order});
  }
  auto eval = [rows](StateIndex from, double eps, std::span<double> out) {
    const auto& row = (*rows)[from];
    double total = 0.0;
    std::ptrdiff_t remainder = -1;
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (row[k].prob) {
        out[k] = row[k].prob(eps);
        total += out[k];
      } else {
        remainder = static_cast<std::ptrdiff_t>(k);
      }
    }
    if (remainder >= 0) out[static_cast<std::size_t>(remainder)] = 1.0 - total;
  };
  return OMChain(labels_, std::move(transitions), std::move(eval));
}

}  // namespace omchain
