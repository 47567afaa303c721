#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "omchain/configuration.hpp"
#include "omchain/particle_model.hpp"

namespace omchain {

/// 64-bit Mersenne Twister (std::mt19937_64, whose output sequence is fixed by
/// the standard). Uniform doubles take the top 53 bits: (x >> 11) * 2^-53.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform integer in [0, bound).
  std::size_t below(std::size_t bound) {
    return static_cast<std::size_t>(uniform() * static_cast<double>(bound));
  }

 private:
  std::mt19937_64 engine_;
};

/// Incremental sampler for one trajectory. Tendency values are cached per
/// vertex and refreshed only where occupancy changes.
class Sampler {
 public:
  Sampler(const ModelSpec& spec, double eps, Configuration initial);

  const Configuration& state() const noexcept { return x_; }
  std::size_t support_size() const noexcept { return support_; }
  int peak() const noexcept { return peak_; }

  /// One transition by inverse CDF on u in [0, 1). Moves are ordered by origin
  /// vertex, then adjacency order; staying takes the final segment.
  void advance(double u);

 private:
  void refresh(Vertex v);
  void relocate(Vertex from, Vertex to);

  const ModelSpec& spec_;
  double eps_;
  Configuration x_;
  std::vector<double> at_;      // f_v(eps, x_v)
  std::vector<double> origin_;  // f_v(eps, x_v - 1) for the minus-one variant, else f_v(eps, x_v)
  std::vector<double> degree_factor_;
  std::vector<std::size_t> histogram_;  // number of vertices per occupancy value
  std::size_t support_ = 0;
  int peak_ = 0;
};

Configuration step(const Configuration& x, const ModelSpec& spec, double eps, double u);
Configuration step(const Configuration& x, const ModelSpec& spec, double eps, Rng& rng);

struct InitialPattern {
  enum class Kind { Alternating, UniformRandom, SinglePole, Explicit };
  Kind kind = Kind::Alternating;
  Vertex pole = 0;
  Configuration explicit_state;
};

/// "alternating", "uniform-random", "single-pole(v)" / "single-pole:v", or an
/// explicit occupancy list such as "0,2,1". Throws ConfigError.
InitialPattern parse_initial_pattern(std::string_view text);
std::string to_string(const InitialPattern& pattern);

/// Throws InvalidInitialPattern.
Configuration initial_configuration(const InitialPattern& pattern, const ModelSpec& spec, Rng& rng);

struct SimConfig {
  ModelSpec spec;
  double eps = 0.0;
  std::uint64_t steps = 0;
  std::uint64_t seed = 0;
  InitialPattern initial;
  std::vector<std::uint64_t> snapshot_times;
  std::uint64_t averaging_window = 0;  // 0 averages the whole run
  std::uint64_t stride = 0;            // 0 selects ceil(steps / 1e6)
};

/// Throws InvalidParameters.
void validate(const SimConfig& config);

std::uint64_t default_stride(std::uint64_t steps);

struct Snapshot {
  std::uint64_t step;
  Configuration state;
};

struct TrajectoryMetrics {
  std::uint64_t stride = 1;
  std::vector<std::uint64_t> steps;  // recorded steps, starting at 0
  std::vector<std::uint32_t> support_series;
  std::vector<double> peak_series;
  double support_average = 0.0;
  double peak_average = 0.0;
  std::vector<Snapshot> snapshots;
  Configuration final_state;

  /// Mean over recorded steps t with from <= t <= to.
  double support_window_average(std::uint64_t from, std::uint64_t to) const;
  double peak_window_average(std::uint64_t from, std::uint64_t to) const;
};

TrajectoryMetrics run(const SimConfig& config);

double total_variation(const std::vector<double>& a, const std::vector<double>& b);

struct EmpiricalComparison {
  std::vector<double> empirical;
  std::vector<double> exact;
  std::uint64_t samples = 0;
  double tv_distance = 0.0;
};

constexpr double kDefaultBurnIn = 0.1;

/// Occupation frequencies over steps after the burn-in, indexed like
/// enumerate_states. Starts from a uniform-random placement.
std::vector<double> empirical_distribution(const ModelSpec& spec, double eps, std::uint64_t steps,
                                           std::uint64_t seed, double burn_in = kDefaultBurnIn,
                                           std::uint64_t* samples = nullptr);

/// Throws InsufficientSamples when nothing survives the burn-in.
EmpiricalComparison empirical_vs_exact(const ModelSpec& spec, double eps, std::uint64_t steps,
                                       std::uint64_t seed, double burn_in = kDefaultBurnIn);

std::string trajectory_csv(const TrajectoryMetrics& metrics);
std::string snapshot_csv(const Configuration& x, const Network& network);
nlohmann::ordered_json summary_json(const SimConfig& config, const TrajectoryMetrics& metrics);

}  // namespace omchain
