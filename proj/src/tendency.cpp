#include "omchain/tendency.hpp"

#include <algorithm>

#include "omchain/error.hpp"

namespace omchain {

TendencyShape parse_tendency_shape(std::string_view name) {
  if (name == "step") return TendencyShape::Step;
  if (name == "linear") return TendencyShape::Linear;
  if (name == "quadratic") return TendencyShape::Quadratic;
  if (name == "parabolic") return TendencyShape::Parabolic;
  throw Error(ErrorCode::ConfigError, "unknown tendency '" + std::string(name) + "'");
}

std::string_view to_string(TendencyShape shape) {
  switch (shape) {
    case TendencyShape::Step: return "step";
    case TendencyShape::Linear: return "linear";
    case TendencyShape::Quadratic: return "quadratic";
    case TendencyShape::Parabolic: return "parabolic";
  }
  return "unknown";
}

ClusteringTendency make_tendency(TendencyShape shape, int n) {
  if (n < 1) throw Error(ErrorCode::InvalidParameters, "tendency needs n >= 1");
  const double total = n;
  auto order = [](int p) { return p == 0 ? 1 : 0; };
  switch (shape) {
    case TendencyShape::Step:
      return {"step", [total](double eps, int p) { return p == 0 ? eps : 1.0 / total; }, order};
    case TendencyShape::Linear:
      return {"linear", [total](double eps, int p) { return p / total + eps; }, order};
    case TendencyShape::Quadratic:
      return {"quadratic",
              [total](double eps, int p) {
                double r = p / total;
                return r * r + eps;
              },
              order};
    case TendencyShape::Parabolic:
      break;
  }
  throw Error(ErrorCode::InvalidParameters, "parabolic tendency needs carrying thresholds");
}

ClusteringTendency make_carrying_tendency(TendencyShape shape, int L, int K) {
  if (L < 0 || L >= K) {
    throw Error(ErrorCode::InvalidThresholds,
                "need 0 <= L < K, got L=" + std::to_string(L) + " K=" + std::to_string(K));
  }
  auto inside = [L, K](int p) { return p > L && p < K; };
  auto order = [inside](int p) { return inside(p) ? 0 : 1; };
  const double width = K - L;
  switch (shape) {
    case TendencyShape::Step:
      return {"step",
              [inside, width](double eps, int p) { return inside(p) ? 1.0 / width : eps; }, order};
    case TendencyShape::Linear:
      return {"linear",
              [inside, width, L](double eps, int p) {
                return inside(p) ? (p - L) / width + eps : eps;
              },
              order};
    case TendencyShape::Parabolic:
      return {"parabolic",
              [width, L, K](double eps, int p) {
                return std::max((p - L) * static_cast<double>(K - p) / (width * width), 0.0) + eps;
              },
              order};
    case TendencyShape::Quadratic:
      break;
  }
  throw Error(ErrorCode::InvalidParameters, "quadratic tendency has no carrying-capacity form");
}

}  // namespace omchain
