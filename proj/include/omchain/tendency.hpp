#pragma once

#include <functional>
#include <string>
#include <string_view>

namespace omchain {

enum class TendencyShape { Step, Linear, Quadratic, Parabolic };

TendencyShape parse_tendency_shape(std::string_view name);
std::string_view to_string(TendencyShape shape);

/// Destination attractiveness f(eps, p) together with its declared order in
/// eps for each occupancy p.
class ClusteringTendency {
 public:
  using EvalFn = std::function<double(double eps, int p)>;
  using OrderFn = std::function<int(int p)>;

  ClusteringTendency(std::string name, EvalFn evaluate, OrderFn declared_order)
      : name_(std::move(name)), evaluate_(std::move(evaluate)), order_(std::move(declared_order)) {}

  double evaluate(double eps, int p) const { return evaluate_(eps, p); }
  int declared_order(int p) const { return order_(p); }
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
  EvalFn evaluate_;
  OrderFn order_;
};

/// Order 1 on empty vertices, 0 on occupied ones.
///   step:      eps if p = 0, 1/n otherwise
///   linear:    p/n + eps
///   quadratic: (p/n)^2 + eps
ClusteringTendency make_tendency(TendencyShape shape, int n);

/// Order 0 strictly inside (L, K), order 1 otherwise. Requires 0 <= L < K.
///   step:      1/(K-L) inside, eps outside
///   linear:    (p-L)/(K-L) + eps inside, eps outside
///   parabolic: max((p-L)(K-p)/(K-L)^2, 0) + eps
ClusteringTendency make_carrying_tendency(TendencyShape shape, int L, int K);

}  // namespace omchain
