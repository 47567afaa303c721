#include "omchain/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <iomanip>
#include <numeric>
#include <sstream>

#include <Eigen/SparseLU>

#include "omchain/error.hpp"
#include "omchain/om_core.hpp"

namespace omchain {

double stationarity_residual(const OMChain::SparseMatrix& p, const std::vector<double>& pi) {
  std::vector<double> image(pi.size(), 0.0);
  for (Eigen::Index x = 0; x < p.outerSize(); ++x) {
    for (OMChain::SparseMatrix::InnerIterator it(p, x); it; ++it) {
      image[static_cast<std::size_t>(it.col())] += pi[static_cast<std::size_t>(x)] * it.value();
    }
  }
  double residual = 0.0;
  for (std::size_t k = 0; k < pi.size(); ++k) residual = std::max(residual, std::abs(image[k] - pi[k]));
  return residual;
}

double cut_flux_imbalance(const OMChain::SparseMatrix& p, const std::vector<double>& pi,
                          const std::vector<bool>& in_subset) {
  double out = 0.0;
  double in = 0.0;
  for (Eigen::Index x = 0; x < p.outerSize(); ++x) {
    const auto ux = static_cast<std::size_t>(x);
    for (OMChain::SparseMatrix::InnerIterator it(p, x); it; ++it) {
      const auto uy = static_cast<std::size_t>(it.col());
      if (in_subset[ux] && !in_subset[uy]) out += pi[ux] * it.value();
      if (!in_subset[ux] && in_subset[uy]) in += pi[ux] * it.value();
    }
  }
  return std::abs(out - in);
}

namespace {

void require_irreducible(const OMChain& chain, double eps) {
  if (!(eps > 0.0)) throw Error(ErrorCode::InvalidParameters, "eps must be positive");
  if (!is_irreducible_at(chain, eps)) {
    throw Error(ErrorCode::NotIrreducible, "chain is reducible at eps");
  }
}

bool acceptable(const StationaryDistribution& d, const SolveOptions& options) {
  return d.residual < options.residual_threshold &&
         std::all_of(d.probabilities.begin(), d.probabilities.end(),
                     [](double v) { return v > 0.0 && std::isfinite(v); });
}

std::optional<StationaryDistribution> solve_lu(const OMChain& chain, double eps,
                                               const OMChain::SparseMatrix& p,
                                               double& condition_hint) {
  using ColMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;
  const auto n = static_cast<Eigen::Index>(chain.size());
  const Eigen::Index last = n - 1;
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(p.nonZeros() + 2 * n));
  // Row y of (P^T - I) is the balance equation of state y; the last one is
  // swapped for sum(pi) = 1.
  for (Eigen::Index x = 0; x < p.outerSize(); ++x) {
    for (OMChain::SparseMatrix::InnerIterator it(p, x); it; ++it) {
      if (it.col() != last) triplets.emplace_back(it.col(), x, it.value());
    }
    if (x != last) triplets.emplace_back(x, x, -1.0);
    triplets.emplace_back(last, x, 1.0);
  }
  ColMatrix a(n, n);
  a.setFromTriplets(triplets.begin(), triplets.end());
  a.makeCompressed();

  Eigen::SparseLU<ColMatrix, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(a);
  lu.factorize(a);
  if (lu.info() != Eigen::Success) return std::nullopt;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs[last] = 1.0;
  Eigen::VectorXd solution = lu.solve(rhs);
  if (lu.info() != Eigen::Success) return std::nullopt;

  StationaryDistribution d;
  d.eps = eps;
  d.method = "sparse-lu";
  d.probabilities.assign(solution.data(), solution.data() + n);
  double total = std::accumulate(d.probabilities.begin(), d.probabilities.end(), 0.0);
  for (double& v : d.probabilities) v /= total;
  d.residual = stationarity_residual(p, d.probabilities);
  condition_hint = d.residual / std::numeric_limits<double>::epsilon();
  return d;
}

StationaryDistribution power_iterate(const OMChain& chain, double eps,
                                     const OMChain::SparseMatrix& p, const SolveOptions& options) {
  const std::size_t n = chain.size();
  std::vector<double> current(n, 1.0 / static_cast<double>(n));
  std::vector<double> next(n);
  for (std::size_t iteration = 0; iteration < options.max_power_iterations; ++iteration) {
    std::fill(next.begin(), next.end(), 0.0);
    for (Eigen::Index x = 0; x < p.outerSize(); ++x) {
      const double mass = current[static_cast<std::size_t>(x)];
      for (OMChain::SparseMatrix::InnerIterator it(p, x); it; ++it) {
        next[static_cast<std::size_t>(it.col())] += mass * it.value();
      }
    }
    const double total = std::accumulate(next.begin(), next.end(), 0.0);
    double change = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      next[k] /= total;
      change = std::max(change, std::abs(next[k] - current[k]));
    }
    current.swap(next);
    if (change < options.power_tolerance) {
      StationaryDistribution d{current, eps, stationarity_residual(p, current), "power"};
      return d;
    }
  }
  throw Error(ErrorCode::SolveFailed, "power iteration did not converge in " +
                                          std::to_string(options.max_power_iterations) +
                                          " iterations");
}

}  // namespace

StationaryDistribution solve_stationary(const OMChain& chain, double eps,
                                        const SolveOptions& options) {
  require_irreducible(chain, eps);
  const auto p = chain.matrix(eps);
  double condition_hint = 0.0;
  if (auto direct = solve_lu(chain, eps, p, condition_hint); direct && acceptable(*direct, options)) {
    return *direct;
  }
  auto fallback = power_iterate(chain, eps, p, options);
  if (!acceptable(fallback, options)) {
    std::ostringstream msg;
    msg << "no acceptable solution at eps=" << eps << " (power residual " << fallback.residual
        << ", LU residual/machine-eps condition estimate " << condition_hint << ")";
    throw Error(ErrorCode::SolveFailed, msg.str());
  }
  return fallback;
}

StationaryDistribution solve_stationary_power(const OMChain& chain, double eps,
                                              const SolveOptions& options) {
  require_irreducible(chain, eps);
  return power_iterate(chain, eps, chain.matrix(eps), options);
}

const std::vector<double>& default_eps_grid() {
  static const std::vector<double> grid{1e-2, 1e-3, 1e-4};
  return grid;
}

std::size_t ExponentReport::matched() const {
  return static_cast<std::size_t>(
      std::count_if(states.begin(), states.end(), [](const StateExponent& s) { return s.match; }));
}

bool ExponentReport::passed() const { return !states.empty() && matched() == states.size(); }

namespace {

constexpr double kUnderflow = 1e-250;

double slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxy += (xs[k] - mx) * (ys[k] - my);
    sxx += (xs[k] - mx) * (xs[k] - mx);
  }
  return sxy / sxx;
}

std::vector<StationaryDistribution> solve_grid(const OMChain& chain, const std::vector<double>& grid,
                                               const ExponentOptions& options) {
  std::vector<StationaryDistribution> solutions(grid.size());
  const std::size_t jobs = std::max<std::size_t>(1, options.jobs);
  for (std::size_t start = 0; start < grid.size(); start += jobs) {
    std::vector<std::future<StationaryDistribution>> batch;
    const std::size_t stop = std::min(grid.size(), start + jobs);
    for (std::size_t g = start; g < stop; ++g) {
      batch.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred,
                                 [&chain, eps = grid[g], &options] {
                                   return solve_stationary(chain, eps, options.solve);
                                 }));
    }
    for (std::size_t g = start; g < stop; ++g) solutions[g] = batch[g - start].get();
  }
  return solutions;
}

}  // namespace

ExponentReport estimate_exponents(const OMChain& chain, const std::vector<double>& eps_grid,
                                  const ExponentOptions& options) {
  std::vector<double> grid = eps_grid;
  std::sort(grid.begin(), grid.end(), std::greater<>());
  if (grid.size() < 2 || std::adjacent_find(grid.begin(), grid.end()) != grid.end() ||
      !(grid.back() > 0.0)) {
    throw Error(ErrorCode::InvalidParameters, "eps grid needs at least two distinct positive values");
  }

  std::vector<double> solve_points = grid;
  if (options.stability_probe) solve_points.push_back(grid.back() / 2.0);
  const auto solutions = solve_grid(chain, solve_points, options);

  ExponentReport report;
  report.eps_grid = grid;
  report.labels = chain.labels();
  report.states.resize(chain.size());

  std::vector<double> xs;
  for (double e : grid) xs.push_back(std::log(e));
  std::vector<double> probe_xs = xs;
  probe_xs.back() = std::log(grid.back() / 2.0);

  for (StateIndex x = 0; x < chain.size(); ++x) {
    auto& state = report.states[x];
    std::vector<double> ys;
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const double value = solutions[g].probabilities[x];
      state.underflow = state.underflow || value < kUnderflow;
      ys.push_back(std::log(value));
    }
    state.estimated = slope(xs, ys);
    state.rounded = static_cast<int>(std::lround(state.estimated));
    state.gap = std::abs(state.estimated - state.rounded);
    if (options.stability_probe) {
      auto probe_ys = ys;
      const double value = solutions.back().probabilities[x];
      state.underflow = state.underflow || value < kUnderflow;
      probe_ys.back() = std::log(value);
      state.stability_delta = std::abs(slope(probe_xs, probe_ys) - state.estimated);
      report.max_stability_delta = std::max(report.max_stability_delta, state.stability_delta);
    }
  }
  return report;
}

void attach_reference(ExponentReport& report, const std::vector<long>& reference,
                      std::string name) {
  if (reference.size() != report.states.size()) {
    throw Error(ErrorCode::InvalidParameters, "reference size does not match state count");
  }
  report.reference_name = std::move(name);
  for (std::size_t x = 0; x < reference.size(); ++x) {
    auto& state = report.states[x];
    state.reference = reference[x];
    state.match = !state.underflow && state.rounded == reference[x] && state.gap <= kMaxRoundingGap;
  }
}

ExponentReport verify_omstat(const OMChain& chain, const std::vector<double>& eps_grid,
                             const ExponentOptions& options) {
  if (auto violation = check_om_cycle(chain)) {
    throw Error(ErrorCode::OMCycleViolated,
                "forward order sum " + std::to_string(violation->forward_sum) +
                    " differs from backward sum " + std::to_string(violation->backward_sum));
  }
  const NuFunction nu = compute_nu(chain);
  auto report = estimate_exponents(chain, eps_grid, options);
  attach_reference(report, std::vector<long>(nu.values.begin(), nu.values.end()), "nu");
  return report;
}

ExponentReport verify_support_theorem(const ParticleChain& pc, const std::vector<double>& eps_grid,
                                      const ExponentOptions& options) {
  if (auto counterexample = classify_clustering(pc)) {
    throw Error(ErrorCode::NotClusteringProcess, counterexample->reason);
  }
  std::vector<long> reference;
  for (const auto& x : pc.states) reference.push_back(static_cast<long>(support_size(x)) - 1);
  auto report = estimate_exponents(pc.chain, eps_grid, options);
  attach_reference(report, reference, "support_minus_one");
  return report;
}

ExponentReport verify_carrying_formula(const ParticleChain& pc,
                                       const std::vector<double>& eps_grid,
                                       const ExponentOptions& options) {
  if (pc.spec.thresholds.size() != 1) {
    throw Error(ErrorCode::InvalidThresholds, "closed form needs uniform (L, K)");
  }
  const auto [L, K] = pc.spec.thresholds.front();
  std::vector<long> reference;
  for (const auto& x : pc.states) reference.push_back(mu_carrying(x, L, K));
  const long low = *std::min_element(reference.begin(), reference.end());
  for (long& r : reference) r -= low;
  auto report = estimate_exponents(pc.chain, eps_grid, options);
  attach_reference(report, reference, "mu_minus_min");
  return report;
}

std::string exponent_report_csv(const ExponentReport& report) {
  std::ostringstream out;
  out << std::setprecision(10);
  out << "state,estimated,rounded,gap,reference,match\n";
  for (std::size_t x = 0; x < report.states.size(); ++x) {
    const auto& s = report.states[x];
    out << '"' << report.labels[x] << "\"," << s.estimated << ',' << s.rounded << ',' << s.gap
        << ',';
    if (s.reference) out << *s.reference;
    out << ',' << (s.match ? "true" : "false") << '\n';
  }
  return out.str();
}

nlohmann::ordered_json exponent_report_json(const ExponentReport& report) {
  nlohmann::ordered_json doc;
  doc["eps_grid"] = report.eps_grid;
  doc["reference"] = report.reference_name;
  doc["matched"] = report.matched();
  doc["total"] = report.states.size();
  doc["passed"] = report.passed();
  doc["max_stability_delta"] = report.max_stability_delta;
  doc["stable"] = report.stable();
  doc["states"] = nlohmann::ordered_json::array();
  for (std::size_t x = 0; x < report.states.size(); ++x) {
    const auto& s = report.states[x];
    nlohmann::ordered_json row{{"state", report.labels[x]},
                               {"estimated", s.estimated},
                               {"rounded", s.rounded},
                               {"gap", s.gap},
                               {"stability_delta", s.stability_delta},
                               {"underflow", s.underflow}};
    row["reference"] = s.reference ? nlohmann::ordered_json(*s.reference) : nlohmann::ordered_json();
    row["match"] = s.match;
    doc["states"].push_back(std::move(row));
  }
  return doc;
}

}  // namespace omchain
