#include "omchain/om_core.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "omchain/error.hpp"

namespace omchain {
namespace {

constexpr StateIndex kNone = std::numeric_limits<StateIndex>::max();

/// BFS tree over an undirected neighbour relation.
struct SpanningTree {
  std::vector<StateIndex> parent;
  std::vector<std::size_t> depth;
  std::vector<StateIndex> visit_order;

  bool spans() const { return visit_order.size() == parent.size(); }

  /// Closed walk u -> v -> (tree path) -> u.
  std::vector<StateIndex> cycle_through(StateIndex u, StateIndex v) const {
    std::vector<StateIndex> from_v{v};
    std::vector<StateIndex> from_u{u};
    StateIndex a = v;
    StateIndex b = u;
    while (depth[a] > depth[b]) from_v.push_back(a = parent[a]);
    while (depth[b] > depth[a]) from_u.push_back(b = parent[b]);
    while (a != b) {
      from_v.push_back(a = parent[a]);
      from_u.push_back(b = parent[b]);
    }
    // from_v ends at the common ancestor, from_u too; splice them.
    std::vector<StateIndex> cycle{u};
    cycle.insert(cycle.end(), from_v.begin(), from_v.end());
    for (auto it = from_u.rbegin() + 1; it != from_u.rend(); ++it) cycle.push_back(*it);
    return cycle;
  }
};

template <class Neighbours>
SpanningTree bfs_tree(std::size_t n, StateIndex root, Neighbours&& neighbours) {
  SpanningTree tree{std::vector<StateIndex>(n, kNone), std::vector<std::size_t>(n, 0), {}};
  std::vector<char> seen(n, 0);
  std::deque<StateIndex> queue{root};
  seen[root] = 1;
  while (!queue.empty()) {
    StateIndex u = queue.front();
    queue.pop_front();
    tree.visit_order.push_back(u);
    neighbours(u, [&](StateIndex v) {
      if (seen[v]) return;
      seen[v] = 1;
      tree.parent[v] = u;
      tree.depth[v] = tree.depth[u] + 1;
      queue.push_back(v);
    });
  }
  return tree;
}

auto off_diagonal(const OMChain& chain) {
  return [&chain](StateIndex u, auto&& visit) {
    for (const auto& t : chain.transitions(u)) {
      if (t.to != u) visit(t.to);
    }
  };
}

long order_sum(const OMChain& chain, const std::vector<StateIndex>& cycle, bool forward) {
  long sum = 0;
  for (std::size_t k = 0; k + 1 < cycle.size(); ++k) {
    auto o = forward ? chain.order(cycle[k], cycle[k + 1]) : chain.order(cycle[k + 1], cycle[k]);
    sum += o->exponent;
  }
  return sum;
}

void require_symmetric(const OMChain& chain) {
  auto asym = check_structural_symmetry(chain);
  if (!asym.empty()) {
    std::ostringstream msg;
    msg << "edge " << chain.label(asym.front().first) << " -> " << chain.label(asym.front().second)
        << " has no reverse (" << asym.size() << " such edges)";
    throw Error(ErrorCode::NotStructurallySymmetric, msg.str());
  }
}

std::string describe_cycle(const OMChain& chain, const std::vector<StateIndex>& cycle) {
  std::ostringstream out;
  for (std::size_t k = 0; k < cycle.size(); ++k) {
    if (k) out << " -> ";
    out << '(' << chain.label(cycle[k]) << ')';
  }
  return out.str();
}

/// Potential from the tree: p(v) = p(u) + order(u,v) - order(v,u).
struct TreePotential {
  SpanningTree tree;
  std::vector<long> potential;
};

TreePotential tree_potential(const OMChain& chain, StateIndex base) {
  require_symmetric(chain);
  TreePotential result{bfs_tree(chain.size(), base, off_diagonal(chain)),
                       std::vector<long>(chain.size(), 0)};
  if (!result.tree.spans()) {
    throw Error(ErrorCode::NotIrreducible, "edge graph is not connected");
  }
  for (StateIndex v : result.tree.visit_order) {
    StateIndex u = result.tree.parent[v];
    if (u == kNone) continue;
    result.potential[v] =
        result.potential[u] + chain.order(u, v)->exponent - chain.order(v, u)->exponent;
  }
  return result;
}

std::optional<CycleViolation> first_inconsistency(const OMChain& chain, const TreePotential& tp) {
  for (StateIndex u = 0; u < chain.size(); ++u) {
    for (const auto& t : chain.transitions(u)) {
      StateIndex v = t.to;
      if (v <= u) continue;
      long delta = t.order - chain.order(v, u)->exponent;
      if (tp.potential[v] - tp.potential[u] == delta) continue;
      CycleViolation violation;
      violation.cycle = tp.tree.cycle_through(u, v);
      violation.forward_sum = order_sum(chain, violation.cycle, true);
      violation.backward_sum = order_sum(chain, violation.cycle, false);
      return violation;
    }
  }
  return std::nullopt;
}

}  // namespace

NuFunction NuFunction::normalized(const std::vector<long>& raw) {
  NuFunction nu;
  if (raw.empty()) return nu;
  long low = *std::min_element(raw.begin(), raw.end());
  nu.values.reserve(raw.size());
  for (long v : raw) nu.values.push_back(static_cast<int>(v - low));
  return nu;
}

std::vector<StatePair> check_structural_symmetry(const OMChain& chain) {
  std::vector<StatePair> violations;
  for (StateIndex u = 0; u < chain.size(); ++u) {
    for (const auto& t : chain.transitions(u)) {
      if (t.to != u && !chain.order(t.to, u)) violations.emplace_back(u, t.to);
    }
  }
  return violations;
}

namespace {

bool strongly_connected(std::size_t n, const std::vector<std::vector<StateIndex>>& forward) {
  if (n == 0) return true;
  std::vector<std::vector<StateIndex>> backward(n);
  for (StateIndex u = 0; u < n; ++u) {
    for (StateIndex v : forward[u]) backward[v].push_back(u);
  }
  auto covers = [n](const std::vector<std::vector<StateIndex>>& adj) {
    auto tree = bfs_tree(n, 0, [&adj](StateIndex u, auto&& visit) {
      for (StateIndex v : adj[u]) visit(v);
    });
    return tree.spans();
  };
  return covers(forward) && covers(backward);
}

}  // namespace

bool is_irreducible(const OMChain& chain) {
  std::vector<std::vector<StateIndex>> adj(chain.size());
  for (StateIndex u = 0; u < chain.size(); ++u) {
    for (const auto& t : chain.transitions(u)) adj[u].push_back(t.to);
  }
  return strongly_connected(chain.size(), adj);
}

bool is_irreducible_at(const OMChain& chain, double eps) {
  std::vector<std::vector<StateIndex>> adj(chain.size());
  for (StateIndex u = 0; u < chain.size(); ++u) {
    auto out = chain.transitions(u);
    auto p = chain.row(u, eps);
    for (std::size_t k = 0; k < out.size(); ++k) {
      if (p[k] > 0.0) adj[u].push_back(out[k].to);
    }
  }
  return strongly_connected(chain.size(), adj);
}

std::vector<StateIndex> check_row_sums(const OMChain& chain, double eps, double tolerance) {
  std::vector<StateIndex> bad;
  for (StateIndex x = 0; x < chain.size(); ++x) {
    auto p = chain.row(x, eps);
    double total = 0.0;
    bool valid = true;
    for (double v : p) {
      if (!(v >= 0.0 && v <= 1.0)) valid = false;
      total += v;
    }
    if (!valid || std::abs(total - 1.0) > tolerance) bad.push_back(x);
  }
  return bad;
}

std::optional<CycleViolation> check_om_cycle(const OMChain& chain) {
  if (chain.size() == 0) return std::nullopt;
  return first_inconsistency(chain, tree_potential(chain, 0));
}

NuFunction compute_nu(const OMChain& chain, StateIndex base) {
  if (base >= chain.size()) throw Error(ErrorCode::InvalidParameters, "base state out of range");
  auto tp = tree_potential(chain, base);
  if (auto violation = first_inconsistency(chain, tp)) {
    std::ostringstream msg;
    msg << "cycle " << describe_cycle(chain, violation->cycle) << " has forward order sum "
        << violation->forward_sum << " but backward sum " << violation->backward_sum;
    throw Error(ErrorCode::OMCycleViolated, msg.str());
  }
  return NuFunction::normalized(tp.potential);
}

std::vector<StatePair> verify_om_detailed_balance(const OMChain& chain, const NuFunction& nu) {
  if (nu.size() != chain.size()) {
    throw Error(ErrorCode::InvalidParameters, "nu is not defined on every state");
  }
  std::vector<StatePair> violations;
  for (StateIndex u = 0; u < chain.size(); ++u) {
    for (const auto& t : chain.transitions(u)) {
      if (t.to == u) continue;
      auto back = chain.order(t.to, u);
      if (!back || nu[u] + t.order != nu[t.to] + back->exponent) {
        violations.emplace_back(u, t.to);
      }
    }
  }
  return violations;
}

std::map<int, std::vector<StateIndex>> partition_omega(const NuFunction& nu) {
  std::map<int, std::vector<StateIndex>> levels;
  for (StateIndex x = 0; x < nu.size(); ++x) levels[nu[x]].push_back(x);
  return levels;
}

std::vector<StateIndex> absorbing_in_limit(const OMChain& chain) {
  std::vector<StateIndex> absorbing;
  for (StateIndex x = 0; x < chain.size(); ++x) {
    auto out = chain.transitions(x);
    bool stuck = std::all_of(out.begin(), out.end(),
                             [x](const Transition& t) { return t.to == x || t.order >= 1; });
    if (stuck) absorbing.push_back(x);
  }
  return absorbing;
}

std::optional<ProductViolation> check_classical_reversibility(const OMChain& chain, double eps,
                                                              double rel_tol) {
  const std::size_t n = chain.size();
  if (n == 0) return std::nullopt;
  if (!is_irreducible_at(chain, eps)) {
    throw Error(ErrorCode::NotIrreducible, "chain is reducible at the requested eps");
  }
  std::vector<std::vector<std::pair<StateIndex, double>>> positive(n);
  for (StateIndex u = 0; u < n; ++u) {
    auto out = chain.transitions(u);
    auto p = chain.row(u, eps);
    for (std::size_t k = 0; k < out.size(); ++k) {
      if (out[k].to != u && p[k] > 0.0) positive[u].emplace_back(out[k].to, p[k]);
    }
  }
  auto prob = [&positive](StateIndex u, StateIndex v) {
    for (const auto& [w, p] : positive[u]) {
      if (w == v) return p;
    }
    return 0.0;
  };
  auto products = [&](std::vector<StateIndex> cycle) {
    ProductViolation violation{std::move(cycle), 1.0, 1.0};
    double log_f = 0.0;
    double log_b = 0.0;
    for (std::size_t k = 0; k + 1 < violation.cycle.size(); ++k) {
      log_f += std::log(prob(violation.cycle[k], violation.cycle[k + 1]));
      log_b += std::log(prob(violation.cycle[k + 1], violation.cycle[k]));
    }
    violation.forward_product = std::exp(log_f);
    violation.backward_product = std::exp(log_b);
    return violation;
  };

  // A one-way edge u -> v closes into a cycle through any return path v ~> u,
  // whose reverse product contains P(v, u) = 0.
  for (StateIndex u = 0; u < n; ++u) {
    for (const auto& [v, p] : positive[u]) {
      if (prob(v, u) > 0.0) continue;
      auto tree = bfs_tree(n, v, [&positive](StateIndex a, auto&& visit) {
        for (const auto& [b, q] : positive[a]) visit(b);
      });
      std::vector<StateIndex> back{u};
      for (StateIndex w = u; w != v;) back.push_back(w = tree.parent[w]);
      std::vector<StateIndex> cycle{u};
      cycle.insert(cycle.end(), back.rbegin(), back.rend());
      return products(std::move(cycle));
    }
  }

  auto tree = bfs_tree(n, 0, [&positive](StateIndex a, auto&& visit) {
    for (const auto& [b, q] : positive[a]) visit(b);
  });
  std::vector<double> log_potential(n, 0.0);
  for (StateIndex v : tree.visit_order) {
    StateIndex u = tree.parent[v];
    if (u == kNone) continue;
    log_potential[v] = log_potential[u] + std::log(prob(u, v)) - std::log(prob(v, u));
  }
  for (StateIndex u = 0; u < n; ++u) {
    for (const auto& [v, p] : positive[u]) {
      if (v <= u) continue;
      double mismatch =
          log_potential[u] + std::log(p) - std::log(prob(v, u)) - log_potential[v];
      if (std::abs(std::expm1(mismatch)) > rel_tol) {
        return products(tree.cycle_through(u, v));
      }
    }
  }
  return std::nullopt;
}

GraphFormat parse_graph_format(std::string_view name) {
  if (name == "dot") return GraphFormat::Dot;
  if (name == "json") return GraphFormat::Json;
  throw Error(ErrorCode::UnsupportedFormat, "unknown graph format '" + std::string(name) + "'");
}

namespace {

std::string_view direction(int from_layer, int to_layer) {
  if (to_layer < from_layer) return "down";
  if (to_layer > from_layer) return "up";
  return "level";
}

std::string dot_escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

}  // namespace

std::string export_layered_graph(const OMChain& chain, const NuFunction& nu, GraphFormat format) {
  if (nu.size() != chain.size()) {
    throw Error(ErrorCode::InvalidParameters, "nu is not defined on every state");
  }
  if (format == GraphFormat::Json) {
    nlohmann::ordered_json doc;
    doc["format_version"] = 1;
    doc["nodes"] = nlohmann::ordered_json::array();
    doc["edges"] = nlohmann::ordered_json::array();
    for (StateIndex x = 0; x < chain.size(); ++x) {
      doc["nodes"].push_back({{"id", x}, {"label", chain.label(x)}, {"layer", nu[x]}});
    }
    for (StateIndex x = 0; x < chain.size(); ++x) {
      for (const auto& t : chain.transitions(x)) {
        if (t.to == x) continue;
        doc["edges"].push_back({{"source", x},
                                {"target", t.to},
                                {"order", t.order},
                                {"direction", direction(nu[x], nu[t.to])}});
      }
    }
    return doc.dump(2) + "\n";
  }

  std::ostringstream out;
  out << "digraph omchain {\n  rankdir=BT;\n  node [shape=box];\n";
  for (StateIndex x = 0; x < chain.size(); ++x) {
    out << "  s" << x << " [label=\"" << dot_escape(chain.label(x)) << "\", layer=" << nu[x]
        << "];\n";
  }
  for (const auto& [layer, states] : partition_omega(nu)) {
    out << "  { rank=same;";
    for (StateIndex x : states) out << " s" << x << ';';
    out << " }  // layer " << layer << '\n';
  }
  for (StateIndex x = 0; x < chain.size(); ++x) {
    for (const auto& t : chain.transitions(x)) {
      if (t.to == x) continue;
      out << "  s" << x << " -> s" << t.to << " [order=" << t.order << ", direction=\""
          << direction(nu[x], nu[t.to]) << "\", color=\"" << (t.order == 0 ? "red" : "green")
          << "\"];\n";
    }
  }
  out << "}\n";
  return out.str();
}

std::vector<LabelViolation> validate_order_labels(const OMChain& chain,
                                                  const LabelValidation& config) {
  std::vector<LabelViolation> violations;
  const auto& grid = config.eps_grid;
  std::vector<std::vector<double>> rows(grid.size());
  for (StateIndex x = 0; x < chain.size(); ++x) {
    auto out = chain.transitions(x);
    for (std::size_t g = 0; g < grid.size(); ++g) rows[g] = chain.row(x, grid[g]);
    for (std::size_t k = 0; k < out.size(); ++k) {
      double previous = 0.0;
      for (std::size_t g = 0; g < grid.size(); ++g) {
        double p = rows[g][k];
        double scaled = p / std::pow(grid[g], out[k].order);
        auto flag = [&](std::string reason) {
          violations.push_back({x, out[k].to, out[k].order, grid[g], scaled, std::move(reason)});
        };
        if (!(p > 0.0)) {
          flag("non-positive probability");
          break;
        }
        if (scaled < config.scaled_min || scaled > config.scaled_max) {
          flag("scaled probability outside bracket");
        } else if (g > 0) {
          double ratio = scaled / previous;
          if (ratio < config.ratio_min || ratio > config.ratio_max) {
            flag("scaled probability drifts between grid points");
          }
        }
        previous = scaled;
      }
    }
  }
  return violations;
}

}  // namespace omchain
