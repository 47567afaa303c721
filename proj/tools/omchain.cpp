// omchain command-line front end.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 a mathematical
// check failed, 3 the state-space cap was hit.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "omchain/config.hpp"
#include "omchain/error.hpp"
#include "omchain/om_core.hpp"
#include "omchain/particle_model.hpp"
#include "omchain/simulator.hpp"
#include "omchain/stationary.hpp"
#include "omchain/version.hpp"

namespace fs = std::filesystem;
using omchain::Json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitCheckFailed = 2;
constexpr int kExitCap = 3;

int exit_code_for(omchain::ErrorCode code) {
  using omchain::ErrorCode;
  switch (code) {
    case ErrorCode::SizeLimitExceeded:
      return kExitCap;
    case ErrorCode::ConfigError:
    case ErrorCode::InvalidParameters:
    case ErrorCode::UnsupportedFormat:
    case ErrorCode::InvalidThresholds:
    case ErrorCode::NotRegularNetwork:
    case ErrorCode::Disconnected:
    case ErrorCode::InvalidInitialPattern:
    case ErrorCode::EmptySourceVertex:
      return kExitUsage;
    default:
      return kExitCheckFailed;
  }
}

/// Everything recorded in the run manifest.
struct Invocation {
  std::string command;
  std::vector<std::string> argv;
  Json config = nullptr;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> outputs;
  std::string manifest_path;

  void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw omchain::Error(omchain::ErrorCode::ConfigError, "cannot write '" + path.string() + "'");
    out << text;
    if (text.empty() || text.back() != '\n') out << '\n';
    outputs.push_back(path.string());
  }
};

struct ModelSource {
  std::string config_path;
  std::string preset;

  void add_to(CLI::App* cmd) {
    auto* c = cmd->add_option("--config", config_path, "Model configuration file (JSON)")
                  ->check(CLI::ExistingFile);
    auto* p = cmd->add_option("--preset", preset, "Built-in configuration: fig1, torus-fig2");
    c->excludes(p);
  }

  bool given() const { return !config_path.empty() || !preset.empty(); }

  Json load(Invocation& inv) const {
    if (!given()) throw omchain::Error(omchain::ErrorCode::ConfigError, "need --config or --preset");
    Json doc = preset.empty() ? omchain::load_json_file(config_path) : omchain::preset(preset);
    inv.config = doc;
    return doc;
  }
};

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      grid.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw omchain::Error(omchain::ErrorCode::ConfigError, "bad eps value '" + item + "'");
    }
  }
  return grid;
}

std::string describe_cycle(const omchain::OMChain& chain, const std::vector<omchain::StateIndex>& cycle) {
  std::string text;
  for (std::size_t k = 0; k < cycle.size(); ++k) {
    if (k) text += " -> ";
    text += "(" + chain.label(cycle[k]) + ")";
  }
  return text;
}

// ---------------------------------------------------------------- enumerate

struct EnumerateArgs {
  int n = 0;
  std::size_t m = 1;
  std::string out;
};

int run_enumerate(const EnumerateArgs& args, Invocation& inv) {
  inv.config = {{"n", args.n}, {"m", args.m}};
  const auto states = omchain::enumerate_states(args.n, args.m, omchain::state_cap_from_env());
  std::cout << states.size() << (states.size() == 1 ? " state" : " states") << '\n';
  if (!args.out.empty()) {
    std::string text;
    for (const auto& x : states) text += omchain::format_configuration(x) + '\n';
    inv.write_file(args.out, text);
  }
  return kExitOk;
}

// ---------------------------------------------------------------- check

struct CheckArgs {
  ModelSource source;
  double eps = 1e-2;
  bool quiet_nu = false;
};

int run_check(const CheckArgs& args, Invocation& inv) {
  const auto target = omchain::parse_target(args.source.load(inv));
  std::optional<omchain::ParticleChain> pc;
  if (target.model) pc = omchain::build_chain(*target.model, omchain::state_cap_from_env());
  const omchain::OMChain& chain = pc ? pc->chain : *target.chain;
  std::cout << "states: " << chain.size() << ", transitions: " << chain.transition_count() << '\n';

  int status = kExitOk;
  const auto bad_rows = omchain::check_row_sums(chain, args.eps);
  std::cout << "row sums at eps=" << args.eps << ": "
            << (bad_rows.empty() ? "ok" : std::to_string(bad_rows.size()) + " rows off by > 1e-12") << '\n';
  if (!bad_rows.empty()) status = kExitCheckFailed;

  const auto label_errors = omchain::validate_order_labels(chain);
  std::cout << "order labels: " << (label_errors.empty() ? "ok" : std::to_string(label_errors.size()) + " inconsistent")
            << '\n';
  for (std::size_t k = 0; k < std::min<std::size_t>(label_errors.size(), 5); ++k) {
    const auto& e = label_errors[k];
    std::cout << "  (" << chain.label(e.from) << ") -> (" << chain.label(e.to) << "): " << e.reason << '\n';
  }
  if (!label_errors.empty()) status = kExitCheckFailed;

  const auto one_way = omchain::check_structural_symmetry(chain);
  if (!one_way.empty()) {
    const auto [u, v] = one_way.front();
    std::cout << "NOT OM-REVERSIBLE: " << one_way.size() << " one-way transitions, e.g. (" << chain.label(u)
              << ") -> (" << chain.label(v) << ")\n";
    return kExitCheckFailed;
  }
  if (!omchain::is_irreducible(chain)) {
    std::cout << "NOT OM-REVERSIBLE: chain is reducible\n";
    return kExitCheckFailed;
  }

  std::string classes;
  if (pc) {
    classes = std::string("; clustering: ") + (omchain::classify_clustering(*pc) ? "no" : "yes") +
              "; generalized: " + (omchain::classify_generalized(*pc) ? "no" : "yes");
  }
  if (auto violation = omchain::check_om_cycle(chain)) {
    std::cout << "NOT OM-REVERSIBLE" << classes << '\n';
    std::cout << "cycle: " << describe_cycle(chain, violation->cycle) << '\n';
    std::cout << "forward order sum " << violation->forward_sum << ", backward order sum "
              << violation->backward_sum << '\n';
    return kExitCheckFailed;
  }
  std::cout << "OM-REVERSIBLE" << classes << '\n';
  if (!args.quiet_nu) {
    const auto nu = omchain::compute_nu(chain);
    std::cout << "nu:\n";
    for (omchain::StateIndex x = 0; x < chain.size(); ++x) {
      std::cout << "  (" << chain.label(x) << ") " << nu[x] << '\n';
    }
  }
  return status;
}

// ---------------------------------------------------------------- exponents

struct ExponentsArgs {
  ModelSource source;
  std::string grid = "1e-2,1e-3,1e-4";
  std::string out;
  std::size_t jobs = 1;
};

int run_exponents(const ExponentsArgs& args, Invocation& inv) {
  const auto grid = parse_grid(args.grid);
  inv.config = args.source.load(inv);
  inv.config["eps_grid"] = grid;
  const auto target = omchain::parse_target(inv.config);
  std::optional<omchain::ParticleChain> pc;
  if (target.model) pc = omchain::build_chain(*target.model, omchain::state_cap_from_env());
  const omchain::OMChain& chain = pc ? pc->chain : *target.chain;

  omchain::ExponentOptions options;
  options.jobs = args.jobs;
  const auto estimate = omchain::estimate_exponents(chain, grid, options);
  std::cout << "states: " << chain.size() << "; max slope change with eps/2 probe: " << std::setprecision(3)
            << estimate.max_stability_delta << (estimate.stable() ? " (stable)" : " (UNSTABLE)")
            << std::setprecision(6) << '\n';

  bool all_passed = true;
  auto emit = [&](const char* title, const std::string& suffix, omchain::ExponentReport report) {
    std::cout << title << ": " << (report.passed() ? "PASS" : "FAIL") << " (" << report.matched() << '/'
              << report.states.size() << " states)\n";
    if (!report.passed()) {
      all_passed = false;
      std::size_t shown = 0;
      for (std::size_t x = 0; x < report.states.size() && shown < 5; ++x) {
        const auto& s = report.states[x];
        if (s.match) continue;
        ++shown;
        std::cout << "  (" << report.labels[x] << ") estimated " << s.estimated << ", reference "
                  << *s.reference << '\n';
      }
    }
    if (!args.out.empty()) {
      inv.write_file(args.out + suffix + ".csv", omchain::exponent_report_csv(report));
      inv.write_file(args.out + suffix + ".json", omchain::exponent_report_json(report).dump(2));
    }
  };

  const auto violation = omchain::check_om_cycle(chain);
  if (violation) {
    std::cout << "OMSTAT: SKIPPED (OM-cycle condition fails on " << describe_cycle(chain, violation->cycle)
              << ")\n";
    all_passed = false;
  } else {
    auto report = estimate;
    const auto nu = omchain::compute_nu(chain);
    omchain::attach_reference(report, {nu.values.begin(), nu.values.end()}, "nu");
    emit("OMSTAT", "", report);
  }

  if (pc && !pc->spec.carrying() && !omchain::classify_clustering(*pc)) {
    auto report = estimate;
    std::vector<long> reference;
    for (const auto& x : pc->states) reference.push_back(static_cast<long>(omchain::support_size(x)) - 1);
    omchain::attach_reference(report, reference, "support_minus_one");
    emit("SUPPORT", "-support", report);
  }
  if (pc && pc->spec.carrying() && pc->spec.thresholds.size() == 1) {
    auto report = estimate;
    const auto [L, K] = pc->spec.thresholds.front();
    std::vector<long> reference;
    for (const auto& x : pc->states) reference.push_back(omchain::mu_carrying(x, L, K));
    const long low = *std::min_element(reference.begin(), reference.end());
    for (long& r : reference) r -= low;
    omchain::attach_reference(report, reference, "mu_minus_min");
    emit("CARRYING", "-carrying", report);
  }
  return all_passed ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------------- omega0

struct Omega0Args {
  ModelSource source;
  int n = -1;
  std::size_t m = 0;
  int L = -1;
  int K = -1;
  std::string out;
};

int run_omega0(const Omega0Args& args, Invocation& inv) {
  const std::size_t cap = omchain::state_cap_from_env();
  std::optional<omchain::ParticleChain> pc;
  std::optional<omchain::Thresholds> thresholds;
  int n = args.n;
  std::size_t m = args.m;
  if (args.source.given()) {
    const auto target = omchain::parse_target(args.source.load(inv));
    if (target.model && target.model->carrying()) {
      if (target.model->thresholds.size() != 1) {
        throw omchain::Error(omchain::ErrorCode::InvalidThresholds, "omega0 needs uniform (L, K)");
      }
      thresholds = target.model->thresholds.front();
      n = target.model->n;
      m = target.model->network.size();
    } else if (target.model) {
      pc = omchain::build_chain(*target.model, cap);
    } else {
      // Explicit chain: level 0 of nu.
      const auto nu = omchain::compute_nu(*target.chain);
      const auto levels = omchain::partition_omega(nu);
      std::cout << "Omega0: " << levels.at(0).size() << " states\n";
      for (auto x : levels.at(0)) std::cout << "  " << target.chain->label(x) << '\n';
      return kExitOk;
    }
  } else {
    if (args.n < 0 || args.m == 0 || args.L < 0 || args.K < 0) {
      throw omchain::Error(omchain::ErrorCode::ConfigError, "need --config/--preset or all of --n --m --L --K");
    }
    thresholds = omchain::Thresholds{args.L, args.K};
    inv.config = {{"n", n}, {"m", m}, {"L", args.L}, {"K", args.K}};
  }

  Json doc;
  if (pc) {
    const auto nu = omchain::compute_nu(pc->chain);
    const auto levels = omchain::partition_omega(nu);
    std::cout << "Omega0: " << levels.at(0).size() << " states\n";
    doc["states"] = Json::array();
    for (auto x : levels.at(0)) {
      std::cout << "  " << omchain::format_configuration(pc->states[x]) << '\n';
      doc["states"].push_back(omchain::format_configuration(pc->states[x]));
    }
    if (!args.out.empty()) inv.write_file(args.out, doc.dump(2));
    return kExitOk;
  }

  const auto report = omchain::omega0_carrying(n, m, thresholds->L, thresholds->K, cap);
  std::cout << "Omega0 (brute force): " << report.states.size() << " states, min mu = " << report.min_mu << '\n';
  for (const auto& x : report.states) std::cout << "  " << omchain::format_configuration(x) << '\n';
  std::cout << "closed form (case " << report.closed_form_case << "): min mu = " << report.closed_form_min
            << " -> " << (report.min_matches ? "MATCH" : "MISMATCH") << '\n';
  std::cout << "closed-form minimiser set: " << report.described_states.size() << " states -> "
            << (report.set_matches ? "MATCH" : "MISMATCH") << '\n';
  doc["min_mu"] = report.min_mu;
  doc["closed_form_min"] = report.closed_form_min;
  doc["closed_form_case"] = report.closed_form_case;
  doc["min_matches"] = report.min_matches;
  doc["set_matches"] = report.set_matches;
  doc["states"] = Json::array();
  for (const auto& x : report.states) doc["states"].push_back(omchain::format_configuration(x));
  doc["described_states"] = Json::array();
  for (const auto& x : report.described_states) doc["described_states"].push_back(omchain::format_configuration(x));
  if (!args.out.empty()) inv.write_file(args.out, doc.dump(2));
  return report.min_matches && report.set_matches ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  ModelSource source;
  std::optional<std::uint64_t> steps;
  std::vector<std::uint64_t> seeds;
  std::optional<double> eps;
  std::optional<std::vector<std::uint64_t>> snapshots;
  std::optional<std::uint64_t> window;
  std::optional<std::string> initial;
  std::optional<std::uint64_t> stride;
  std::string out_dir;
  std::size_t jobs = 1;
};

int run_simulate(const SimulateArgs& args, Invocation& inv) {
  Json doc = args.source.load(inv);
  omchain::SimConfig base{omchain::parse_model_spec(doc), 0.0, 0, 0, {}, {}, 0, 0};
  base = omchain::parse_simulation(doc, std::move(base));
  if (args.eps) base.eps = *args.eps;
  if (args.initial) base.initial = omchain::parse_initial_pattern(*args.initial);
  if (args.stride) base.stride = *args.stride;
  if (args.steps) {
    base.steps = *args.steps;
    // Defaults inherited from the config are clipped to the shorter run.
    std::erase_if(base.snapshot_times, [&](std::uint64_t t) { return t > base.steps; });
    base.averaging_window = std::min(base.averaging_window, base.steps);
  }
  if (args.snapshots) base.snapshot_times = *args.snapshots;
  if (args.window) base.averaging_window = *args.window;
  if (base.steps == 0 && base.snapshot_times.empty()) base.snapshot_times.push_back(0);
  std::vector<std::uint64_t> seeds = args.seeds;
  if (seeds.empty()) seeds.push_back(base.seed);
  inv.seeds = seeds;

  Json& sim = inv.config["simulation"];
  sim["eps"] = base.eps;
  sim["steps"] = base.steps;
  sim["seed"] = seeds.front();
  sim["initial"] = omchain::to_string(base.initial);
  sim["snapshots"] = base.snapshot_times;
  sim["window"] = base.averaging_window;
  sim["stride"] = base.stride ? base.stride : omchain::default_stride(base.steps);
  omchain::validate(base);

  std::vector<omchain::SimConfig> configs;
  for (auto seed : seeds) {
    configs.push_back(base);
    configs.back().seed = seed;
  }
  std::vector<omchain::TrajectoryMetrics> results(configs.size());
  const std::size_t jobs = std::max<std::size_t>(1, args.jobs);
  for (std::size_t start = 0; start < configs.size(); start += jobs) {
    std::vector<std::future<omchain::TrajectoryMetrics>> batch;
    const std::size_t stop = std::min(configs.size(), start + jobs);
    for (std::size_t k = start; k < stop; ++k) {
      batch.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred,
                                 [&cfg = configs[k]] { return omchain::run(cfg); }));
    }
    for (std::size_t k = start; k < stop; ++k) results[k] = batch[k - start].get();
  }

  for (std::size_t k = 0; k < configs.size(); ++k) {
    const fs::path dir = configs.size() == 1 ? fs::path(args.out_dir)
                                             : fs::path(args.out_dir) / ("seed-" + std::to_string(seeds[k]));
    const auto& metrics = results[k];
    inv.write_file(dir / "trajectory.csv", omchain::trajectory_csv(metrics));
    for (const auto& snap : metrics.snapshots) {
      inv.write_file(dir / ("snapshot_" + std::to_string(snap.step) + ".csv"),
                     omchain::snapshot_csv(snap.state, configs[k].spec.network));
    }
    auto summary = omchain::summary_json(configs[k], metrics);
    summary["config"] = inv.config;
    summary["config"]["simulation"]["seed"] = seeds[k];
    inv.write_file(dir / "summary.json", summary.dump(2));
    std::cout << "seed " << seeds[k] << ": support average " << std::setprecision(6) << metrics.support_average
              << ", peak average " << metrics.peak_average << " (last " << configs[k].averaging_window
              << " steps)\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------- export-graph

struct ExportArgs {
  ModelSource source;
  std::string format = "json";
  std::string out;
};

int run_export(const ExportArgs& args, Invocation& inv) {
  const auto format = omchain::parse_graph_format(args.format);
  const auto target = omchain::parse_target(args.source.load(inv));
  std::optional<omchain::ParticleChain> pc;
  if (target.model) pc = omchain::build_chain(*target.model, omchain::state_cap_from_env());
  const omchain::OMChain& chain = pc ? pc->chain : *target.chain;
  const auto nu = omchain::compute_nu(chain);
  const auto text = omchain::export_layered_graph(chain, nu, format);
  if (args.out.empty()) {
    std::cout << text;
  } else {
    inv.write_file(args.out, text);
    std::cout << "wrote " << args.out << " (" << chain.size() << " nodes)\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------- manifest

void write_manifest(const Invocation& inv, int exit_code, double seconds, const std::string& explicit_path,
                    const std::string& default_dir) {
  fs::path path = explicit_path;
  if (path.empty()) path = fs::path(default_dir.empty() ? "." : default_dir) / "omchain-manifest.json";
  Json doc;
  doc["command"] = inv.command;
  doc["argv"] = inv.argv;
  doc["version"] = omchain::kVersion;
  doc["config"] = inv.config;
  doc["seeds"] = inv.seeds;
  doc["outputs"] = inv.outputs;
  doc["state_cap"] = omchain::state_cap_from_env();
  doc["exit_code"] = exit_code;
  doc["duration_seconds"] = seconds;
  try {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    out << doc.dump(2) << '\n';
  } catch (const std::exception& e) {
    std::cerr << "warning: could not write manifest: " << e.what() << '\n';
  }
}

std::string output_dir_of(const std::string& file) {
  if (file.empty()) return {};
  const auto parent = fs::path(file).parent_path();
  return parent.empty() ? std::string(".") : parent.string();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Order-of-magnitude reversibility analysis and simulation of particle Markov chains",
               "omchain"};
  app.set_version_flag("--version", std::string("omchain ") + omchain::kVersion);
  app.require_subcommand(1);
  app.footer("Exit codes: 0 success, 1 usage/config error, 2 check failed, 3 state cap exceeded.\n"
             "Environment: OMCHAIN_STATE_CAP overrides the state-space cap (default 2000000).");
  std::string manifest_path;
  app.add_option("--manifest", manifest_path, "Path of the run manifest (default: next to outputs)");

  EnumerateArgs enumerate_args;
  auto* enumerate = app.add_subcommand("enumerate", "List all configurations of n particles on m vertices");
  enumerate->add_option("--n", enumerate_args.n, "Number of particles")->required()->check(CLI::NonNegativeNumber);
  enumerate->add_option("--m", enumerate_args.m, "Number of vertices")->required()->check(CLI::PositiveNumber);
  enumerate->add_option("--out", enumerate_args.out, "Write the states, one per line");

  CheckArgs check_args;
  auto* check = app.add_subcommand("check", "Test OM-reversibility and classify the chain");
  check_args.source.add_to(check);
  check->add_option("--eps", check_args.eps, "eps used for the row-sum check")->check(CLI::PositiveNumber);
  check->add_flag("--no-nu", check_args.quiet_nu, "Do not print the order function");

  ExponentsArgs exponents_args;
  auto* exponents = app.add_subcommand("exponents", "Estimate stationary exponents and compare with theory");
  exponents_args.source.add_to(exponents);
  exponents->add_option("--eps-grid", exponents_args.grid, "Comma-separated eps values (at least two)");
  exponents->add_option("--out", exponents_args.out, "Prefix for CSV and JSON reports");
  exponents->add_option("--jobs", exponents_args.jobs, "Parallel stationary solves")->check(CLI::PositiveNumber);

  Omega0Args omega0_args;
  auto* omega0 = app.add_subcommand("omega0", "States carrying the stationary mass as eps -> 0");
  omega0_args.source.add_to(omega0);
  omega0->add_option("--n", omega0_args.n, "Particles (carrying-capacity brute force)");
  omega0->add_option("--m", omega0_args.m, "Vertices (carrying-capacity brute force)");
  omega0->add_option("--L", omega0_args.L, "Lower threshold");
  omega0->add_option("--K", omega0_args.K, "Carrying capacity");
  omega0->add_option("--out", omega0_args.out, "Write the listing as JSON");

  SimulateArgs simulate_args;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo trajectory with support and peak metrics");
  simulate_args.source.add_to(simulate);
  simulate->add_option("--steps", simulate_args.steps, "Number of steps");
  simulate->add_option("--seed", simulate_args.seeds, "Seed; repeat for several independent runs");
  simulate->add_option("--eps", simulate_args.eps, "Diffusion parameter")->check(CLI::PositiveNumber);
  simulate->add_option("--snapshots", simulate_args.snapshots, "Snapshot steps")->delimiter(',');
  simulate->add_option("--window", simulate_args.window, "Trailing averaging window in steps");
  simulate->add_option("--initial", simulate_args.initial,
                       "alternating | uniform-random | single-pole(v) | explicit occupancies");
  simulate->add_option("--stride", simulate_args.stride, "Record every k-th step");
  simulate->add_option("--out-dir", simulate_args.out_dir, "Output directory")->required();
  simulate->add_option("--jobs", simulate_args.jobs, "Seeds simulated in parallel")->check(CLI::PositiveNumber);

  ExportArgs export_args;
  auto* export_graph = app.add_subcommand("export-graph", "Layered transition graph (layer = order function)");
  export_args.source.add_to(export_graph);
  export_graph->add_option("--format", export_args.format, "dot | json");
  export_graph->add_option("--out", export_args.out, "Output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  Invocation inv;
  inv.argv.assign(argv, argv + argc);
  std::string default_dir;
  const auto started = std::chrono::steady_clock::now();
  int code = kExitOk;
  try {
    if (enumerate->parsed()) {
      inv.command = "enumerate";
      default_dir = output_dir_of(enumerate_args.out);
      code = run_enumerate(enumerate_args, inv);
    } else if (check->parsed()) {
      inv.command = "check";
      code = run_check(check_args, inv);
    } else if (exponents->parsed()) {
      inv.command = "exponents";
      default_dir = output_dir_of(exponents_args.out);
      code = run_exponents(exponents_args, inv);
    } else if (omega0->parsed()) {
      inv.command = "omega0";
      default_dir = output_dir_of(omega0_args.out);
      code = run_omega0(omega0_args, inv);
    } else if (simulate->parsed()) {
      inv.command = "simulate";
      default_dir = simulate_args.out_dir;
      code = run_simulate(simulate_args, inv);
    } else if (export_graph->parsed()) {
      inv.command = "export-graph";
      default_dir = output_dir_of(export_args.out);
      code = run_export(export_args, inv);
    }
  } catch (const omchain::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    code = exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    code = kExitUsage;
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  write_manifest(inv, code, seconds, manifest_path, default_dir);
  return code;
}
