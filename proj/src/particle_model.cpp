#include "omchain/particle_model.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <memory>

#include "omchain/error.hpp"
#include "omchain/order.hpp"

namespace omchain {

ModelKind parse_model_kind(std::string_view name) {
  if (name == "model1") return ModelKind::Model1;
  if (name == "model2") return ModelKind::Model2;
  if (name == "model1-minus-one") return ModelKind::Model1MinusOne;
  throw Error(ErrorCode::ConfigError, "unknown model '" + std::string(name) + "'");
}

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Model1: return "model1";
    case ModelKind::Model2: return "model2";
    case ModelKind::Model1MinusOne: return "model1-minus-one";
  }
  return "unknown";
}

ModelSpec ModelSpec::clustering(ModelKind kind, TendencyShape shape, Network network, int n) {
  ModelSpec spec{kind, {make_tendency(shape, n)}, std::move(network), n, shape, {}};
  validate(spec);
  return spec;
}

ModelSpec ModelSpec::carrying_capacity(ModelKind base, TendencyShape shape, int L, int K,
                                       Network network, int n) {
  return carrying_capacity(base, shape, std::vector<Thresholds>{{L, K}}, std::move(network), n);
}

ModelSpec ModelSpec::carrying_capacity(ModelKind base, TendencyShape shape,
                                       std::vector<Thresholds> per_vertex, Network network,
                                       int n) {
  if (per_vertex.empty()) throw Error(ErrorCode::InvalidThresholds, "no thresholds given");
  std::vector<ClusteringTendency> tendencies;
  for (auto [L, K] : per_vertex) {
    if (L <= 0 || L >= K) {
      throw Error(ErrorCode::InvalidThresholds,
                  "carrying capacity needs 0 < L < K, got L=" + std::to_string(L) +
                      " K=" + std::to_string(K));
    }
    tendencies.push_back(make_carrying_tendency(shape, L, K));
  }
  ModelSpec spec{base, std::move(tendencies), std::move(network), n, shape,
                 std::move(per_vertex)};
  validate(spec);
  return spec;
}

void validate(const ModelSpec& spec) {
  const std::size_t m = spec.network.size();
  if (spec.n < 1) throw Error(ErrorCode::InvalidParameters, "need at least one particle");
  if (spec.tendencies.size() != 1 && spec.tendencies.size() != m) {
    throw Error(ErrorCode::InvalidParameters, "need one tendency or one per vertex");
  }
  if (spec.carrying()) {
    if (spec.thresholds.size() != 1 && spec.thresholds.size() != m) {
      throw Error(ErrorCode::InvalidThresholds, "need one threshold pair or one per vertex");
    }
    for (auto [L, K] : spec.thresholds) {
      if (L <= 0 || L >= K) throw Error(ErrorCode::InvalidThresholds, "need 0 < L < K");
    }
    if (spec.kind == ModelKind::Model1MinusOne) {
      throw Error(ErrorCode::InvalidParameters, "carrying capacity applies to model1 or model2");
    }
  }
  if (spec.kind != ModelKind::Model2 && !spec.network.regular_degree()) {
    throw Error(ErrorCode::NotRegularNetwork,
                std::string(to_string(spec.kind)) + " is defined on d-regular networks only");
  }
}

TransitionLaw::TransitionLaw(ModelSpec spec) : spec_(std::move(spec)) { validate(spec_); }

int TransitionLaw::origin_count(const Configuration& x, Vertex i) const {
  return spec_.kind == ModelKind::Model1MinusOne ? x[i] - 1 : x[i];
}

double TransitionLaw::degree_factor(Vertex i) const {
  return spec_.kind == ModelKind::Model2 ? 1.0
                                         : 1.0 / static_cast<double>(spec_.network.degree(i));
}

double TransitionLaw::move_probability(const Configuration& x, Vertex i, Vertex j,
                                       double eps) const {
  if (x[i] < 1) return 0.0;
  const double fj = spec_.tendency(j).evaluate(eps, x[j]);
  double denominator = 0.0;
  if (spec_.kind == ModelKind::Model2) {
    denominator = spec_.tendency(i).evaluate(eps, x[i]);
    for (Vertex k : spec_.network.neighbours(i)) denominator += spec_.tendency(k).evaluate(eps, x[k]);
  } else {
    denominator = fj + spec_.tendency(i).evaluate(eps, origin_count(x, i));
  }
  if (!(denominator > 0.0)) {
    throw Error(ErrorCode::InternalModelError, "vanishing normaliser; eps limit undefined here");
  }
  return degree_factor(i) * (static_cast<double>(x[i]) / spec_.n) * fj / denominator;
}

double TransitionLaw::stay_probability(const Configuration& x, double eps) const {
  double stay = 0.0;
  for (Vertex i = 0; i < x.size(); ++i) {
    if (x[i] < 1) continue;
    const double share = static_cast<double>(x[i]) / spec_.n;
    const double fi = spec_.tendency(i).evaluate(eps, origin_count(x, i));
    if (spec_.kind == ModelKind::Model2) {
      double denominator = fi;
      for (Vertex k : spec_.network.neighbours(i)) denominator += spec_.tendency(k).evaluate(eps, x[k]);
      if (!(denominator > 0.0)) {
        throw Error(ErrorCode::InternalModelError, "vanishing normaliser; eps limit undefined here");
      }
      stay += share * fi / denominator;
    } else {
      for (Vertex j : spec_.network.neighbours(i)) {
        double denominator = spec_.tendency(j).evaluate(eps, x[j]) + fi;
        if (!(denominator > 0.0)) {
          throw Error(ErrorCode::InternalModelError,
                      "vanishing normaliser; eps limit undefined here");
        }
        stay += degree_factor(i) * share * fi / denominator;
      }
    }
  }
  return stay;
}

int TransitionLaw::move_order(const Configuration& x, Vertex i, Vertex j) const {
  const Order numerator = OrderMagnitude{spec_.tendency(j).declared_order(x[j])};
  Order denominator;
  if (spec_.kind == ModelKind::Model2) {
    denominator = OrderMagnitude{spec_.tendency(i).declared_order(x[i])};
    for (Vertex k : spec_.network.neighbours(i)) {
      denominator = om_add(denominator, OrderMagnitude{spec_.tendency(k).declared_order(x[k])});
    }
  } else {
    denominator = om_add(numerator, OrderMagnitude{spec_.tendency(i).declared_order(origin_count(x, i))});
  }
  return om_div(numerator, *denominator)->exponent;
}

int TransitionLaw::stay_order(const Configuration& x) const {
  Order stay;
  for (Vertex i = 0; i < x.size(); ++i) {
    if (x[i] < 1) continue;
    const Order fi = OrderMagnitude{spec_.tendency(i).declared_order(origin_count(x, i))};
    if (spec_.kind == ModelKind::Model2) {
      Order denominator = fi;
      for (Vertex k : spec_.network.neighbours(i)) {
        denominator = om_add(denominator, OrderMagnitude{spec_.tendency(k).declared_order(x[k])});
      }
      stay = om_add(stay, om_div(fi, *denominator));
    } else {
      for (Vertex j : spec_.network.neighbours(i)) {
        Order denominator = om_add(fi, OrderMagnitude{spec_.tendency(j).declared_order(x[j])});
        stay = om_add(stay, om_div(fi, *denominator));
      }
    }
  }
  return stay ? stay->exponent : 0;
}

namespace {

constexpr Vertex kStay = std::numeric_limits<Vertex>::max();

struct MoveSlot {
  Vertex from;
  Vertex to;  // kStay for the self-loop
};

}  // namespace

ParticleChain build_chain(const ModelSpec& spec, std::size_t cap) {
  auto law = std::make_shared<const TransitionLaw>(spec);
  auto states = std::make_shared<const std::vector<Configuration>>(
      enumerate_states(spec.n, spec.network.size(), cap));
  const std::size_t count = states->size();

  std::vector<std::string> labels;
  labels.reserve(count);
  std::vector<std::vector<Transition>> transitions(count);
  auto slots = std::make_shared<std::vector<std::vector<MoveSlot>>>(count);

  for (StateIndex s = 0; s < count; ++s) {
    const Configuration& x = (*states)[s];
    labels.push_back(format_configuration(x));
    struct Entry {
      StateIndex target;
      int order;
      MoveSlot slot;
    };
    std::vector<Entry> entries;
    for (Vertex i = 0; i < x.size(); ++i) {
      if (x[i] < 1) continue;
      for (Vertex j : spec.network.neighbours(i)) {
        entries.push_back({lexicographic_rank(move(x, i, j)), law->move_order(x, i, j), {i, j}});
      }
    }
    entries.push_back({s, law->stay_order(x), {0, kStay}});
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.target < b.target; });
    for (const auto& e : entries) {
      transitions[s].push_back({e.target, e.order});
      (*slots)[s].push_back(e.slot);
    }
  }

  auto row = [law, states, slots](StateIndex s, double eps, std::span<double> out) {
    const Configuration& x = (*states)[s];
    const auto& row_slots = (*slots)[s];
    for (std::size_t k = 0; k < row_slots.size(); ++k) {
      const auto& slot = row_slots[k];
      out[k] = slot.to == kStay ? law->stay_probability(x, eps)
                                : law->move_probability(x, slot.from, slot.to, eps);
    }
  };

  return ParticleChain{spec, *states, OMChain(std::move(labels), std::move(transitions), row)};
}

namespace {

/// (i, j) such that y = x^{i,j}, i != j; nullopt if y is not one jump away.
std::optional<std::pair<Vertex, Vertex>> single_move(const Configuration& x,
                                                     const Configuration& y) {
  std::optional<Vertex> from;
  std::optional<Vertex> to;
  for (Vertex v = 0; v < x.size(); ++v) {
    int diff = y[v] - x[v];
    if (diff == 0) continue;
    if (diff == -1 && !from) {
      from = v;
    } else if (diff == 1 && !to) {
      to = v;
    } else {
      return std::nullopt;
    }
  }
  if (!from || !to) return std::nullopt;
  return std::make_pair(*from, *to);
}

bool subset(const Configuration& inner, const Configuration& outer) {
  for (Vertex v = 0; v < inner.size(); ++v) {
    if (inner[v] > 0 && outer[v] == 0) return false;
  }
  return true;
}

}  // namespace

std::optional<TransitionCounterexample> classify_clustering(const ParticleChain& pc) {
  const auto& chain = pc.chain;
  for (StateIndex s = 0; s < chain.size(); ++s) {
    const Configuration& x = pc.states[s];
    for (const auto& t : chain.transitions(s)) {
      if (t.to == s) {
        if (t.order != 0) {
          return TransitionCounterexample{s, s, t.order, "self-loop must have order 0"};
        }
        continue;
      }
      auto jump = single_move(x, pc.states[t.to]);
      if (!jump) return TransitionCounterexample{s, t.to, t.order, "not a single-particle jump"};
      auto [i, j] = *jump;
      if (!pc.spec.network.adjacent(i, j)) {
        return TransitionCounterexample{s, t.to, t.order, "jump between non-adjacent vertices"};
      }
      const int expected = x[j] == 0 ? 1 : 0;
      if (t.order != expected) {
        return TransitionCounterexample{
            s, t.to, t.order,
            "jump " + std::to_string(i + 1) + "->" + std::to_string(j + 1) + " with x_i=" +
                std::to_string(x[i]) + ", x_j=" + std::to_string(x[j]) + " has order " +
                std::to_string(t.order) + ", expected " + std::to_string(expected)};
      }
    }
  }
  return std::nullopt;
}

std::optional<TransitionCounterexample> classify_generalized(const ParticleChain& pc) {
  const auto& chain = pc.chain;
  for (StateIndex s = 0; s < chain.size(); ++s) {
    const std::size_t sx = support_size(pc.states[s]);
    for (const auto& t : chain.transitions(s)) {
      if (t.order != 0 && t.order != 1) {
        return TransitionCounterexample{s, t.to, t.order, "condition 1: order outside {0,1}"};
      }
      if (t.to == s) continue;
      if (!single_move(pc.states[s], pc.states[t.to])) {
        return TransitionCounterexample{s, t.to, t.order, "not a single-particle jump"};
      }
      const std::size_t sy = support_size(pc.states[t.to]);
      const int back = chain.order(t.to, s).value_or(OrderMagnitude{-1}).exponent;
      if (sx == sy && t.order != back) {
        return TransitionCounterexample{s, t.to, t.order,
                                        "condition 2: equal support but orders differ"};
      }
      if (sx + 1 == sy && !(t.order == 1 && back == 0)) {
        return TransitionCounterexample{s, t.to, t.order,
                                        "condition 3: support grows but orders are not (1, 0)"};
      }
    }
  }
  return std::nullopt;
}

std::vector<TransitionCounterexample> check_support_lemma(const ParticleChain& pc) {
  std::vector<TransitionCounterexample> bad;
  for (StateIndex s = 0; s < pc.chain.size(); ++s) {
    for (const auto& t : pc.chain.transitions(s)) {
      const bool inside = subset(pc.states[t.to], pc.states[s]);
      if ((t.order == 0) != inside) {
        bad.push_back({s, t.to, t.order, "order 0 does not match s(y) subset of s(x)"});
      }
    }
  }
  return bad;
}

std::vector<TransitionCounterexample> check_phi_value_corollary(const ParticleChain& pc) {
  std::vector<TransitionCounterexample> bad;
  for (StateIndex s = 0; s < pc.chain.size(); ++s) {
    const Configuration& x = pc.states[s];
    for (const auto& t : pc.chain.transitions(s)) {
      if (t.to == s) continue;
      const Configuration& y = pc.states[t.to];
      auto back = pc.chain.order(t.to, s);
      if (!back) {
        bad.push_back({s, t.to, t.order, "missing reverse transition"});
        continue;
      }
      const std::size_t sx = support_size(x);
      const std::size_t sy = support_size(y);
      bool ok = false;
      if (t.order == 0 && back->exponent == 0) {
        ok = subset(x, y) && subset(y, x);
      } else if (t.order == 0 && back->exponent == 1) {
        ok = subset(y, x) && sy + 1 == sx;
      } else if (t.order == 1 && back->exponent == 0) {
        ok = subset(x, y) && sx + 1 == sy;
      } else if (t.order == 1 && back->exponent == 1) {
        ok = sx == sy;
      }
      if (!ok) bad.push_back({s, t.to, t.order, "support sizes inconsistent with order pair"});
    }
  }
  return bad;
}

std::vector<Configuration> absorbing_states_eps0(const Network& network, int n, std::size_t cap) {
  std::vector<Configuration> absorbing;
  for (auto& x : enumerate_states(n, network.size(), cap)) {
    if (occupied_vertices_isolated(network, x)) absorbing.push_back(std::move(x));
  }
  return absorbing;
}

long mu_carrying(const Configuration& x, int L, int K) {
  if (L <= 0 || L >= K) {
    throw Error(ErrorCode::InvalidThresholds, "need 0 < L < K");
  }
  long mu = 0;
  for (int p : x.occupancy) mu += std::min(p, L) + std::max(p - K + 1, 0);
  return mu;
}

Omega0Report omega0_carrying(int n, std::size_t m, int L, int K, std::size_t cap) {
  if (L <= 0 || L >= K) throw Error(ErrorCode::InvalidThresholds, "need 0 < L < K");
  Omega0Report report;
  auto states = enumerate_states(n, m, cap);
  report.min_mu = std::numeric_limits<long>::max();
  for (const auto& x : states) report.min_mu = std::min(report.min_mu, mu_carrying(x, L, K));
  for (const auto& x : states) {
    if (mu_carrying(x, L, K) == report.min_mu) report.states.push_back(x);
  }

  const int q = n / K;
  const int r = n - K * q;
  std::function<bool(const Configuration&)> described;
  if (m > static_cast<std::size_t>(q)) {
    report.closed_form_min = static_cast<long>(L) * q + std::min(L, r);
    if (r <= L) {
      report.closed_form_case = "1a";
      described = [q, K](const Configuration& x) {
        return std::count_if(x.occupancy.begin(), x.occupancy.end(),
                             [K](int p) { return p >= K; }) == q;
      };
    } else {
      report.closed_form_case = "1b";
      described = [q, r, K](const Configuration& x) {
        auto full = std::count(x.occupancy.begin(), x.occupancy.end(), K);
        auto rest = std::count(x.occupancy.begin(), x.occupancy.end(), r);
        auto empty = std::count(x.occupancy.begin(), x.occupancy.end(), 0);
        return full == q && rest == 1 &&
               static_cast<std::size_t>(full + rest + empty) == x.size();
      };
    }
  } else {
    report.closed_form_min = static_cast<long>(n) - static_cast<long>(m) * (K - L);
    report.closed_form_case = "2";
    described = [K](const Configuration& x) {
      return std::all_of(x.occupancy.begin(), x.occupancy.end(), [K](int p) { return p >= K; });
    };
  }
  for (const auto& x : states) {
    if (described(x)) report.described_states.push_back(x);
  }
  report.min_matches = report.min_mu == report.closed_form_min;
  report.set_matches = report.described_states == report.states;
  return report;
}

}  // namespace omchain
