#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "omchain/chain.hpp"

namespace omchain {

using StatePair = std::pair<StateIndex, StateIndex>;

/// Integer potential with nu(u) + order(u,v) = nu(v) + order(v,u) on every
/// edge. Values produced by compute_nu are shifted so the minimum is 0.
struct NuFunction {
  std::vector<int> values;

  int operator[](StateIndex x) const { return values.at(x); }
  std::size_t size() const noexcept { return values.size(); }

  /// Shifts `raw` so that its minimum becomes 0.
  static NuFunction normalized(const std::vector<long>& raw);

  friend bool operator==(const NuFunction&, const NuFunction&) = default;
};

/// Ordered pairs (x, y), x != y, with an edge x -> y but none y -> x.
std::vector<StatePair> check_structural_symmetry(const OMChain& chain);

/// Strong connectivity of the positive-probability edge graph.
bool is_irreducible(const OMChain& chain);

/// Same, but using only transitions whose probability at `eps` is positive.
bool is_irreducible_at(const OMChain& chain, double eps);

/// Rows whose probabilities do not sum to 1 within `tolerance` at `eps`.
std::vector<StateIndex> check_row_sums(const OMChain& chain, double eps,
                                       double tolerance = 1e-12);

/// A closed walk (front() == back()) on which forward and backward order
/// sums differ.
struct CycleViolation {
  std::vector<StateIndex> cycle;
  long forward_sum = 0;
  long backward_sum = 0;
};

/// OM-cycle condition over a fundamental cycle basis of the edge graph.
/// nullopt means the condition holds.
/// Throws NotStructurallySymmetric or NotIrreducible when the preconditions fail.
std::optional<CycleViolation> check_om_cycle(const OMChain& chain);

/// Path-sum potential from `base`, shifted to minimum 0.
/// Throws OMCycleViolated if some non-tree edge disagrees with the tree sums.
NuFunction compute_nu(const OMChain& chain, StateIndex base = 0);

/// Edges (u, v) where nu(u) + order(u,v) != nu(v) + order(v,u).
std::vector<StatePair> verify_om_detailed_balance(const OMChain& chain, const NuFunction& nu);

/// Level sets of nu.
std::map<int, std::vector<StateIndex>> partition_omega(const NuFunction& nu);

/// States all of whose transitions to other states have order >= 1, i.e.
/// the absorbing states of the eps -> 0 limit chain.
std::vector<StateIndex> absorbing_in_limit(const OMChain& chain);

struct ProductViolation {
  std::vector<StateIndex> cycle;
  double forward_product = 0.0;
  double backward_product = 0.0;
};

/// Kolmogorov cycle condition at a fixed eps over a fundamental cycle basis,
/// relative tolerance `rel_tol` on the products. nullopt means reversible.
/// Throws NotIrreducible.
std::optional<ProductViolation> check_classical_reversibility(const OMChain& chain, double eps,
                                                              double rel_tol = 1e-9);

enum class GraphFormat { Dot, Json };

/// "dot" or "json"; anything else throws UnsupportedFormat.
GraphFormat parse_graph_format(std::string_view name);

/// Layered state graph: node layer = nu(x), edges labelled with their order.
/// Self-loops are omitted.
std::string export_layered_graph(const OMChain& chain, const NuFunction& nu, GraphFormat format);

/// Numeric plausibility bounds for declared order labels.
struct LabelValidation {
  std::vector<double> eps_grid{1e-2, 1e-3, 1e-4};
  double scaled_min = 1e-4;
  double scaled_max = 1e4;
  double ratio_min = 0.5;
  double ratio_max = 2.0;
};

struct LabelViolation {
  StateIndex from;
  StateIndex to;
  int order;
  double eps;
  double scaled;  // P(from, to, eps) / eps^order
  std::string reason;
};

/// Checks that P(x, y, eps) / eps^order(x, y) stays bounded and roughly flat
/// across the grid. Catches wrong or non-integer exponents.
std::vector<LabelViolation> validate_order_labels(const OMChain& chain,
                                                  const LabelValidation& config = {});

}  // namespace omchain
