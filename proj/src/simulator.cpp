#include "omchain/simulator.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "omchain/error.hpp"
#include "omchain/stationary.hpp"

namespace omchain {

namespace {

constexpr double kRowTolerance = 1e-12;

}  // namespace

Sampler::Sampler(const ModelSpec& spec, double eps, Configuration initial)
    : spec_(spec), eps_(eps), x_(std::move(initial)) {
  validate(spec_);
  const std::size_t m = spec_.network.size();
  if (x_.size() != m || x_.total() != spec_.n ||
      std::any_of(x_.occupancy.begin(), x_.occupancy.end(), [](int v) { return v < 0; })) {
    throw Error(ErrorCode::InvalidInitialPattern,
                "configuration " + format_configuration(x_) + " does not fit the model");
  }
  at_.resize(m);
  origin_.resize(m);
  degree_factor_.resize(m);
  histogram_.assign(static_cast<std::size_t>(spec_.n) + 1, 0);
  for (Vertex v = 0; v < m; ++v) {
    degree_factor_[v] = spec_.kind == ModelKind::Model2
                            ? 1.0
                            : 1.0 / static_cast<double>(spec_.network.degree(v));
    refresh(v);
    ++histogram_[static_cast<std::size_t>(x_[v])];
    if (x_[v] > 0) ++support_;
    peak_ = std::max(peak_, x_[v]);
  }
}

void Sampler::refresh(Vertex v) {
  const auto& f = spec_.tendency(v);
  at_[v] = f.evaluate(eps_, x_[v]);
  if (spec_.kind == ModelKind::Model1MinusOne) {
    origin_[v] = x_[v] > 0 ? f.evaluate(eps_, x_[v] - 1) : 0.0;
  } else {
    origin_[v] = at_[v];
  }
}

void Sampler::relocate(Vertex from, Vertex to) {
  auto& a = x_.occupancy[from];
  auto& b = x_.occupancy[to];
  --histogram_[static_cast<std::size_t>(a)];
  --histogram_[static_cast<std::size_t>(b)];
  if (a == 1) --support_;
  if (b == 0) ++support_;
  const bool was_peak = a == peak_;
  --a;
  ++b;
  ++histogram_[static_cast<std::size_t>(a)];
  ++histogram_[static_cast<std::size_t>(b)];
  peak_ = std::max(peak_, b);
  if (was_peak && histogram_[static_cast<std::size_t>(peak_)] == 0) --peak_;
  refresh(from);
  refresh(to);
}

void Sampler::advance(double u) {
  const auto& net = spec_.network;
  const double n = static_cast<double>(spec_.n);
  double cumulative = 0.0;
  double stay = 0.0;
  bool chosen = false;
  Vertex chosen_from = 0;
  Vertex chosen_to = 0;
  for (Vertex i = 0; i < x_.size(); ++i) {
    if (x_[i] < 1) continue;
    const double share = static_cast<double>(x_[i]) / n;
    const auto& neighbours = net.neighbours(i);
    if (spec_.kind == ModelKind::Model2) {
      double denominator = at_[i];
      for (Vertex k : neighbours) denominator += at_[k];
      if (!(denominator > 0.0)) {
        throw Error(ErrorCode::InternalModelError, "vanishing normaliser at vertex " + std::to_string(i));
      }
      for (Vertex j : neighbours) {
        cumulative += degree_factor_[i] * share * at_[j] / denominator;
        if (!chosen && u < cumulative) {
          chosen = true;
          chosen_from = i;
          chosen_to = j;
        }
      }
      stay += share * at_[i] / denominator;
    } else {
      for (Vertex j : neighbours) {
        const double denominator = at_[j] + origin_[i];
        if (!(denominator > 0.0)) {
          throw Error(ErrorCode::InternalModelError, "vanishing normaliser at vertex " + std::to_string(i));
        }
        cumulative += degree_factor_[i] * share * at_[j] / denominator;
        if (!chosen && u < cumulative) {
          chosen = true;
          chosen_from = i;
          chosen_to = j;
        }
        stay += degree_factor_[i] * share * origin_[i] / denominator;
      }
    }
  }
  const double total = cumulative + stay;
  if (!(std::abs(total - 1.0) <= kRowTolerance)) {
    std::ostringstream msg;
    msg << std::setprecision(17) << "transition row of " << format_configuration(x_) << " sums to "
        << total;
    throw Error(ErrorCode::InternalModelError, msg.str());
  }
  if (chosen) relocate(chosen_from, chosen_to);
}

Configuration step(const Configuration& x, const ModelSpec& spec, double eps, double u) {
  Sampler sampler(spec, eps, x);
  sampler.advance(u);
  return sampler.state();
}

Configuration step(const Configuration& x, const ModelSpec& spec, double eps, Rng& rng) {
  return step(x, spec, eps, rng.uniform());
}

InitialPattern parse_initial_pattern(std::string_view text) {
  InitialPattern pattern;
  if (text == "alternating") {
    pattern.kind = InitialPattern::Kind::Alternating;
    return pattern;
  }
  if (text == "uniform-random") {
    pattern.kind = InitialPattern::Kind::UniformRandom;
    return pattern;
  }
  constexpr std::string_view pole = "single-pole";
  if (text.substr(0, pole.size()) == pole) {
    std::string_view rest = text.substr(pole.size());
    if (rest.size() >= 2 && (rest.front() == ':' || (rest.front() == '(' && rest.back() == ')'))) {
      rest = rest.front() == ':' ? rest.substr(1) : rest.substr(1, rest.size() - 2);
      Vertex v = 0;
      auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), v);
      if (ec == std::errc() && ptr == rest.data() + rest.size()) {
        pattern.kind = InitialPattern::Kind::SinglePole;
        pattern.pole = v;
        return pattern;
      }
    }
    throw Error(ErrorCode::ConfigError, "malformed single-pole pattern '" + std::string(text) + "'");
  }
  pattern.kind = InitialPattern::Kind::Explicit;
  pattern.explicit_state = parse_configuration(text);
  return pattern;
}

std::string to_string(const InitialPattern& pattern) {
  switch (pattern.kind) {
    case InitialPattern::Kind::Alternating: return "alternating";
    case InitialPattern::Kind::UniformRandom: return "uniform-random";
    case InitialPattern::Kind::SinglePole: return "single-pole(" + std::to_string(pattern.pole) + ")";
    case InitialPattern::Kind::Explicit: return format_configuration(pattern.explicit_state);
  }
  return {};
}

Configuration initial_configuration(const InitialPattern& pattern, const ModelSpec& spec, Rng& rng) {
  const std::size_t m = spec.network.size();
  Configuration x{std::vector<int>(m, 0)};
  switch (pattern.kind) {
    case InitialPattern::Kind::Alternating: {
      const auto colouring = spec.network.bipartition();
      if (!colouring) {
        throw Error(ErrorCode::InvalidInitialPattern, "alternating pattern needs a bipartite network");
      }
      const auto first = std::count(colouring->begin(), colouring->end(), 0);
      if (first != spec.n) {
        throw Error(ErrorCode::InvalidInitialPattern,
                    "alternating pattern places " + std::to_string(first) + " particles but n = " +
                        std::to_string(spec.n));
      }
      for (Vertex v = 0; v < m; ++v) x.occupancy[v] = (*colouring)[v] == 0 ? 1 : 0;
      return x;
    }
    case InitialPattern::Kind::UniformRandom:
      for (int p = 0; p < spec.n; ++p) ++x.occupancy[rng.below(m)];
      return x;
    case InitialPattern::Kind::SinglePole:
      if (pattern.pole >= m) {
        throw Error(ErrorCode::InvalidInitialPattern, "pole vertex " + std::to_string(pattern.pole) +
                                                          " outside the network");
      }
      x.occupancy[pattern.pole] = spec.n;
      return x;
    case InitialPattern::Kind::Explicit:
      if (pattern.explicit_state.size() != m || pattern.explicit_state.total() != spec.n ||
          std::any_of(pattern.explicit_state.occupancy.begin(), pattern.explicit_state.occupancy.end(),
                      [](int v) { return v < 0; })) {
        throw Error(ErrorCode::InvalidInitialPattern,
                    "initial configuration " + format_configuration(pattern.explicit_state) +
                        " does not fit the model");
      }
      return pattern.explicit_state;
  }
  return x;
}

void validate(const SimConfig& config) {
  validate(config.spec);
  if (!(config.eps > 0.0)) throw Error(ErrorCode::InvalidParameters, "eps must be positive");
  if (config.averaging_window > config.steps) {
    throw Error(ErrorCode::InvalidParameters, "averaging window longer than the run");
  }
  for (auto t : config.snapshot_times) {
    if (t > config.steps) {
      throw Error(ErrorCode::InvalidParameters,
                  "snapshot time " + std::to_string(t) + " beyond the last step");
    }
  }
}

std::uint64_t default_stride(std::uint64_t steps) {
  constexpr std::uint64_t kMaxRecords = 1'000'000;
  return std::max<std::uint64_t>(1, (steps + kMaxRecords - 1) / kMaxRecords);
}

namespace {

template <typename T>
double window_mean(const std::vector<std::uint64_t>& steps, const std::vector<T>& values,
                   std::uint64_t from, std::uint64_t to) {
  const auto lo = std::lower_bound(steps.begin(), steps.end(), from);
  const auto hi = std::upper_bound(steps.begin(), steps.end(), to);
  if (lo >= hi) throw Error(ErrorCode::InvalidParameters, "no recorded steps in the window");
  double sum = 0.0;
  for (auto it = lo; it != hi; ++it) sum += static_cast<double>(values[static_cast<std::size_t>(it - steps.begin())]);
  return sum / static_cast<double>(hi - lo);
}

}  // namespace

double TrajectoryMetrics::support_window_average(std::uint64_t from, std::uint64_t to) const {
  return window_mean(steps, support_series, from, to);
}

double TrajectoryMetrics::peak_window_average(std::uint64_t from, std::uint64_t to) const {
  return window_mean(steps, peak_series, from, to);
}

TrajectoryMetrics run(const SimConfig& config) {
  validate(config);
  Rng rng(config.seed);
  Sampler sampler(config.spec, config.eps, initial_configuration(config.initial, config.spec, rng));

  TrajectoryMetrics metrics;
  metrics.stride = config.stride ? config.stride : default_stride(config.steps);
  const auto records = config.steps / metrics.stride + 1;
  metrics.steps.reserve(records);
  metrics.support_series.reserve(records);
  metrics.peak_series.reserve(records);

  auto snapshot_times = config.snapshot_times;
  std::sort(snapshot_times.begin(), snapshot_times.end());
  snapshot_times.erase(std::unique(snapshot_times.begin(), snapshot_times.end()), snapshot_times.end());
  auto next_snapshot = snapshot_times.begin();

  const double n = static_cast<double>(config.spec.n);
  auto observe = [&](std::uint64_t t) {
    if (t % metrics.stride == 0) {
      metrics.steps.push_back(t);
      metrics.support_series.push_back(static_cast<std::uint32_t>(sampler.support_size()));
      metrics.peak_series.push_back(static_cast<double>(sampler.peak()) / n);
    }
    if (next_snapshot != snapshot_times.end() && *next_snapshot == t) {
      metrics.snapshots.push_back({t, sampler.state()});
      ++next_snapshot;
    }
  };

  observe(0);
  for (std::uint64_t t = 1; t <= config.steps; ++t) {
    sampler.advance(rng.uniform());
    observe(t);
  }

  const std::uint64_t from =
      config.averaging_window == 0 ? 0 : config.steps - config.averaging_window + 1;
  const std::uint64_t lowest = std::min(from, metrics.steps.back());
  metrics.support_average = metrics.support_window_average(lowest, config.steps);
  metrics.peak_average = metrics.peak_window_average(lowest, config.steps);
  metrics.final_state = sampler.state();
  return metrics;
}

double total_variation(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::InvalidParameters, "distribution sizes differ");
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) sum += std::abs(a[k] - b[k]);
  return sum / 2.0;
}

std::vector<double> empirical_distribution(const ModelSpec& spec, double eps, std::uint64_t steps,
                                           std::uint64_t seed, double burn_in,
                                           std::uint64_t* samples) {
  if (!(burn_in >= 0.0 && burn_in < 1.0)) {
    throw Error(ErrorCode::InvalidParameters, "burn-in fraction must lie in [0, 1)");
  }
  const auto skip = static_cast<std::uint64_t>(std::floor(burn_in * static_cast<double>(steps)));
  const std::uint64_t kept = steps - skip;
  if (kept == 0) throw Error(ErrorCode::InsufficientSamples, "no samples after burn-in");
  const auto count = count_states(spec.n, spec.network.size());
  std::vector<double> frequencies(static_cast<std::size_t>(count), 0.0);

  Rng rng(seed);
  InitialPattern pattern;
  pattern.kind = InitialPattern::Kind::UniformRandom;
  Sampler sampler(spec, eps, initial_configuration(pattern, spec, rng));
  for (std::uint64_t t = 1; t <= steps; ++t) {
    sampler.advance(rng.uniform());
    if (t > skip) frequencies[lexicographic_rank(sampler.state())] += 1.0;
  }
  for (double& f : frequencies) f /= static_cast<double>(kept);
  if (samples) *samples = kept;
  return frequencies;
}

EmpiricalComparison empirical_vs_exact(const ModelSpec& spec, double eps, std::uint64_t steps,
                                       std::uint64_t seed, double burn_in) {
  EmpiricalComparison report;
  const auto pc = build_chain(spec);
  report.exact = solve_stationary(pc.chain, eps).probabilities;
  report.empirical = empirical_distribution(spec, eps, steps, seed, burn_in, &report.samples);
  report.tv_distance = total_variation(report.empirical, report.exact);
  return report;
}

std::string trajectory_csv(const TrajectoryMetrics& metrics) {
  std::ostringstream out;
  out << std::setprecision(10);
  out << "step,support_size,peak_ratio\n";
  for (std::size_t k = 0; k < metrics.steps.size(); ++k) {
    out << metrics.steps[k] << ',' << metrics.support_series[k] << ',' << metrics.peak_series[k]
        << '\n';
  }
  return out.str();
}

std::string snapshot_csv(const Configuration& x, const Network& network) {
  std::ostringstream out;
  const auto& grid = network.grid();
  out << (grid ? "vertex_index,row,col,occupancy\n" : "vertex_index,occupancy\n");
  for (Vertex v = 0; v < x.size(); ++v) {
    out << v << ',';
    if (grid) out << v / grid->width << ',' << v % grid->width << ',';
    out << x[v] << '\n';
  }
  return out.str();
}

nlohmann::ordered_json summary_json(const SimConfig& config, const TrajectoryMetrics& metrics) {
  nlohmann::ordered_json doc;
  doc["seed"] = config.seed;
  doc["eps"] = config.eps;
  doc["steps"] = config.steps;
  doc["stride"] = metrics.stride;
  doc["averaging_window"] = config.averaging_window;
  doc["initial"] = to_string(config.initial);
  doc["support_average"] = metrics.support_average;
  doc["peak_average"] = metrics.peak_average;
  doc["final_support"] = metrics.support_series.back();
  doc["final_peak"] = metrics.peak_series.back();
  auto& snaps = doc["snapshots"] = nlohmann::ordered_json::array();
  for (const auto& s : metrics.snapshots) {
    snaps.push_back({{"step", s.step}, {"state", format_configuration(s.state)}});
  }
  return doc;
}

}  // namespace omchain
