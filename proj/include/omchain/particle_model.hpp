#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "omchain/chain.hpp"
#include "omchain/configuration.hpp"
#include "omchain/network.hpp"
#include "omchain/tendency.hpp"

namespace omchain {

/// Transition laws for one particle jumping along an edge.
///   Model1:          (1/d)(x_i/n) f(x_j) / (f(x_j) + f(x_i))          d-regular only
///   Model2:          (x_i/n) f(x_j) / (f(x_i) + sum_{k~i} f(x_k))
///   Model1MinusOne:  (1/d)(x_i/n) f(x_j) / (f(x_j) + f(x_i - 1))      d-regular only
enum class ModelKind { Model1, Model2, Model1MinusOne };

ModelKind parse_model_kind(std::string_view name);
std::string_view to_string(ModelKind kind);

struct Thresholds {
  int L;
  int K;
};

struct ModelSpec {
  ModelKind kind = ModelKind::Model2;
  /// One tendency shared by all vertices, or one per vertex.
  std::vector<ClusteringTendency> tendencies;
  Network network;
  int n = 1;
  TendencyShape shape = TendencyShape::Linear;
  /// Set for carrying-capacity models: one entry (uniform) or one per vertex.
  std::vector<Thresholds> thresholds;

  bool carrying() const noexcept { return !thresholds.empty(); }
  const ClusteringTendency& tendency(Vertex v) const {
    return tendencies.size() == 1 ? tendencies.front() : tendencies.at(v);
  }

  static ModelSpec clustering(ModelKind kind, TendencyShape shape, Network network, int n);
  static ModelSpec carrying_capacity(ModelKind base, TendencyShape shape, int L, int K,
                                     Network network, int n);
  static ModelSpec carrying_capacity(ModelKind base, TendencyShape shape,
                                     std::vector<Thresholds> per_vertex, Network network, int n);
};

/// Throws NotRegularNetwork, InvalidThresholds or InvalidParameters.
void validate(const ModelSpec& spec);

/// Evaluates one row of the transition law. Moves are enumerated origin by
/// origin (ascending), destinations in adjacency order; staying is the
/// remaining mass.
class TransitionLaw {
 public:
  explicit TransitionLaw(ModelSpec spec);

  const ModelSpec& spec() const noexcept { return spec_; }

  double move_probability(const Configuration& x, Vertex i, Vertex j, double eps) const;
  /// Mass of x -> x, summed from its per-move "return" terms.
  double stay_probability(const Configuration& x, double eps) const;

  /// Orders from the declared tendency orders through the order algebra.
  int move_order(const Configuration& x, Vertex i, Vertex j) const;
  int stay_order(const Configuration& x) const;

 private:
  int origin_count(const Configuration& x, Vertex i) const;  // argument of f at the origin
  double degree_factor(Vertex i) const;

  ModelSpec spec_;
};

/// Chain over enumerate_states(n, m) together with the configurations.
struct ParticleChain {
  ModelSpec spec;
  std::vector<Configuration> states;
  OMChain chain;

  StateIndex index_of(const Configuration& x) const { return lexicographic_rank(x); }
};

ParticleChain build_chain(const ModelSpec& spec, std::size_t cap = kDefaultStateCap);

struct TransitionCounterexample {
  StateIndex from;
  StateIndex to;
  int order;
  std::string reason;
};

/// nullopt when every positive transition has order 1 into empty vertices
/// and 0 into occupied ones (self-loops included).
std::optional<TransitionCounterexample> classify_clustering(const ParticleChain& pc);

/// nullopt when orders are in {0,1}, equal between equal-support states, and
/// (1, 0) from smaller to larger support.
std::optional<TransitionCounterexample> classify_generalized(const ParticleChain& pc);

/// Edges where order(x,y) = 0 does not coincide with s(y) being a subset of s(x).
std::vector<TransitionCounterexample> check_support_lemma(const ParticleChain& pc);

/// Edges violating the support-size consequences of the order pair
/// (order(x,y), order(y,x)) for clustering processes.
std::vector<TransitionCounterexample> check_phi_value_corollary(const ParticleChain& pc);

/// States whose occupied vertices are pairwise non-adjacent.
std::vector<Configuration> absorbing_states_eps0(const Network& network, int n,
                                                 std::size_t cap = kDefaultStateCap);

/// sum_l min(x_l, L) + max(x_l - K + 1, 0). Requires 0 < L < K.
long mu_carrying(const Configuration& x, int L, int K);

struct Omega0Report {
  std::vector<Configuration> states;  // brute-force argmin of mu_carrying
  long min_mu = 0;
  /// Closed-form minimum: L*q + min(L, n - K*q) when m > q, else n - m(K - L), q = floor(n/K).
  long closed_form_min = 0;
  std::string closed_form_case;  // "1a", "1b" or "2"
  /// Configurations matching the closed-form description of the minimisers.
  std::vector<Configuration> described_states;
  bool min_matches = false;
  bool set_matches = false;
};

Omega0Report omega0_carrying(int n, std::size_t m, int L, int K,
                             std::size_t cap = kDefaultStateCap);

}  // namespace omchain
