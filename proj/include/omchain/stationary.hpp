#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "omchain/chain.hpp"
#include "omchain/particle_model.hpp"

namespace omchain {

struct StationaryDistribution {
  std::vector<double> probabilities;
  double eps = 0.0;
  double residual = 0.0;  // max_x |(pi P)(x) - pi(x)|
  std::string method;     // "sparse-lu" or "power"
};

struct SolveOptions {
  double residual_threshold = 1e-10;
  double power_tolerance = 1e-13;
  std::size_t max_power_iterations = 20'000'000;
};

/// Unique stationary distribution at eps. Sparse LU on (P^T - I) with one
/// equation replaced by the normalisation, falling back to power iteration.
/// Throws NotIrreducible or SolveFailed.
StationaryDistribution solve_stationary(const OMChain& chain, double eps,
                                        const SolveOptions& options = {});

/// Power iteration from the uniform vector; stops when successive iterates
/// differ by less than options.power_tolerance in every component.
StationaryDistribution solve_stationary_power(const OMChain& chain, double eps,
                                              const SolveOptions& options = {});

double stationarity_residual(const OMChain::SparseMatrix& p, const std::vector<double>& pi);

/// |flux(S -> S^c) - flux(S^c -> S)| for the subset marked in `in_subset`.
double cut_flux_imbalance(const OMChain::SparseMatrix& p, const std::vector<double>& pi,
                          const std::vector<bool>& in_subset);

const std::vector<double>& default_eps_grid();

struct StateExponent {
  double estimated = 0.0;  // least-squares slope of log pi against log eps
  int rounded = 0;
  double gap = 0.0;
  double stability_delta = 0.0;  // slope change when the smallest eps is halved
  bool underflow = false;        // pi < 1e-250 somewhere on the grid
  std::optional<long> reference;
  bool match = false;
};

struct ExponentReport {
  std::vector<double> eps_grid;
  std::vector<std::string> labels;
  std::vector<StateExponent> states;
  std::string reference_name;  // empty when no reference column
  double max_stability_delta = 0.0;

  std::size_t matched() const;
  /// Every state matches its reference.
  bool passed() const;
  /// Every slope moved by less than `limit` under the halved-eps probe.
  bool stable(double limit = 0.1) const { return max_stability_delta < limit; }
};

constexpr double kMaxRoundingGap = 0.2;

struct ExponentOptions {
  std::size_t jobs = 1;
  bool stability_probe = true;
  SolveOptions solve;
};

/// Grid needs at least two distinct positive values.
ExponentReport estimate_exponents(const OMChain& chain,
                                  const std::vector<double>& eps_grid = default_eps_grid(),
                                  const ExponentOptions& options = {});

/// Fills the reference column and match flags (match iff rounded == reference
/// and gap <= kMaxRoundingGap).
void attach_reference(ExponentReport& report, const std::vector<long>& reference,
                      std::string name);

/// Reference = compute_nu(chain). Throws OMCycleViolated.
ExponentReport verify_omstat(const OMChain& chain,
                             const std::vector<double>& eps_grid = default_eps_grid(),
                             const ExponentOptions& options = {});

/// Reference = |s(x)| - 1. Throws NotClusteringProcess.
ExponentReport verify_support_theorem(const ParticleChain& pc,
                                      const std::vector<double>& eps_grid = default_eps_grid(),
                                      const ExponentOptions& options = {});

/// Reference = mu_carrying(x) - min mu (uniform thresholds only).
ExponentReport verify_carrying_formula(const ParticleChain& pc,
                                       const std::vector<double>& eps_grid = default_eps_grid(),
                                       const ExponentOptions& options = {});

std::string exponent_report_csv(const ExponentReport& report);
nlohmann::ordered_json exponent_report_json(const ExponentReport& report);

}  // namespace omchain
