#include <doctest.h>

#include <fstream>
#include <sstream>

#include "omchain/error.hpp"
#include "omchain/simulator.hpp"
#include "omchain/stationary.hpp"
#include "oracles.hpp"

using namespace omchain;

namespace {

ModelSpec fig1_spec(ModelKind kind = ModelKind::Model2) {
  return ModelSpec::clustering(kind, TendencyShape::Linear, make_cycle(4), 5);
}

SimConfig config_for(ModelSpec spec, double eps, std::uint64_t steps, std::uint64_t seed) {
  SimConfig c{std::move(spec)};
  c.eps = eps;
  c.steps = steps;
  c.seed = seed;
  c.initial.kind = InitialPattern::Kind::UniformRandom;
  return c;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

TEST_CASE("generator is the standard 64-bit Mersenne Twister") {
  Rng rng(5489);
  for (int k = 1; k < 10000; ++k) rng.next();
  CHECK(rng.next() == 9981545732273789042ULL);
  Rng unit(1);
  for (int k = 0; k < 1000; ++k) {
    const double u = unit.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("each CDF segment maps to its own outcome") {
  for (auto kind : {ModelKind::Model1, ModelKind::Model2, ModelKind::Model1MinusOne}) {
    const auto spec = fig1_spec(kind);
    const double eps = 0.05;
    for (const auto& x : std::vector<Configuration>{{{2, 1, 0, 2}}, {{0, 0, 0, 5}}, {{1, 1, 1, 2}}}) {
      double low = 0.0;
      for (Vertex i = 0; i < 4; ++i) {
        if (x[i] == 0) continue;
        for (Vertex j : spec.network.neighbours(i)) {
          const auto y = move(x, i, j);
          const double p = oracle::model_probability(kind, spec.network, 5, oracle::linear_tendency, x.occupancy,
                                                     y.occupancy, eps);
          CHECK(step(x, spec, eps, low + p / 2) == y);
          low += p;
        }
      }
      CHECK(step(x, spec, eps, (low + 1.0) / 2) == x);
      CHECK(step(x, spec, eps, 0.999999999) == x);
    }
  }
}

TEST_CASE("a fixed draw gives a fixed step") {
  const auto spec = fig1_spec();
  const Configuration x{{1, 2, 1, 1}};
  for (double u : {0.0, 0.1, 0.37, 0.8}) CHECK(step(x, spec, 0.01, u) == step(x, spec, 0.01, u));
}

TEST_CASE("a single pole never loses its vertex in one step") {
  const auto spec = fig1_spec();
  Rng rng(11);
  const Configuration pole{{0, 5, 0, 0}};
  int kept = 0;
  for (int k = 0; k < 2000; ++k) kept += step(pole, spec, 0.001, rng)[1] > 0;
  CHECK(kept == 2000);
}

TEST_CASE("one particle performs a lazy walk with uniform occupation") {
  const auto spec = ModelSpec::clustering(ModelKind::Model2, TendencyShape::Linear, make_cycle(4), 1);
  const auto freq = empirical_distribution(spec, 0.5, 1'000'000, 5, 0.0);
  for (double f : freq) CHECK(std::abs(f - 0.25) < 0.02 * 0.25);
}

TEST_CASE("trivial runs") {
  auto c = config_for(fig1_spec(), 0.01, 0, 1);
  c.initial = parse_initial_pattern("single-pole(2)");
  const auto m = run(c);
  CHECK(m.steps == std::vector<std::uint64_t>{0});
  CHECK(m.support_series == std::vector<std::uint32_t>{1});
  CHECK(m.peak_series == std::vector<double>{1.0});

  const auto one = run(config_for(ModelSpec::clustering(ModelKind::Model2, TendencyShape::Linear, make_cycle(6), 1),
                                  0.3, 5000, 2));
  for (auto s : one.support_series) CHECK(s == 1);
  for (double p : one.peak_series) CHECK(p == 1.0);
}

TEST_CASE("metrics invariants and particle conservation") {
  auto c = config_for(ModelSpec::clustering(ModelKind::Model2, TendencyShape::Quadratic, make_torus(4, 4), 8),
                      0.01, 20000, 3);
  c.initial = parse_initial_pattern("alternating");
  c.snapshot_times = {0, 100, 20000};
  c.averaging_window = 5000;
  const auto m = run(c);
  REQUIRE(m.steps.size() == 20001);
  for (std::size_t k = 0; k < m.steps.size(); ++k) {
    CHECK(m.support_series[k] >= 1);
    CHECK(m.support_series[k] <= 8);
    CHECK(m.peak_series[k] >= 1.0 / 8);
    CHECK(m.peak_series[k] <= 1.0);
    if (m.peak_series[k] == 1.0) CHECK(m.support_series[k] == 1);
  }
  REQUIRE(m.snapshots.size() == 3);
  for (const auto& s : m.snapshots) CHECK(s.state.total() == 8);
  CHECK(m.final_state.total() == 8);
  CHECK(m.support_average == doctest::Approx(m.support_window_average(15001, 20000)));
  CHECK(m.snapshots[0].state == Configuration{{1, 0, 1, 0, 0, 1, 0, 1, 1, 0, 1, 0, 0, 1, 0, 1}});
}

TEST_CASE("same seed, same trajectory; golden run") {
  auto c = config_for(fig1_spec(), 0.05, 10000, 42);
  const auto a = run(c);
  const auto b = run(c);
  CHECK(a.support_series == b.support_series);
  CHECK(a.peak_series == b.peak_series);
  const auto csv = trajectory_csv(a);
  const std::string golden_path = std::string(OMCHAIN_TEST_DATA) + "/golden/trajectory_fig1_seed42.csv";
  if (const char* regen = std::getenv("OMCHAIN_REGENERATE_GOLDEN"); regen && *regen) {
    std::ofstream(golden_path) << csv;
  }
  CHECK(csv == read_file(golden_path));
  c.seed = 43;
  CHECK(run(c).support_series != a.support_series);
}

TEST_CASE("stride and windows") {
  CHECK(default_stride(10) == 1);
  CHECK(default_stride(1'000'000) == 1);
  CHECK(default_stride(1'000'001) == 2);
  CHECK(default_stride(3'000'000) == 3);
  auto c = config_for(fig1_spec(), 0.05, 1000, 1);
  c.stride = 10;
  const auto m = run(c);
  CHECK(m.steps.size() == 101);
  CHECK(m.steps.back() == 1000);
  CHECK_THROWS_AS(m.support_window_average(1, 9), Error);
}

TEST_CASE("initial patterns") {
  Rng rng(1);
  const auto torus = ModelSpec::clustering(ModelKind::Model2, TendencyShape::Quadratic, make_torus(20, 12), 120);
  const auto alt = initial_configuration(parse_initial_pattern("alternating"), torus, rng);
  CHECK(alt.total() == 120);
  CHECK(support_size(alt) == 120);
  CHECK(occupied_vertices_isolated(torus.network, alt));

  const auto wrong_n = ModelSpec::clustering(ModelKind::Model2, TendencyShape::Quadratic, make_torus(4, 4), 5);
  const auto odd = ModelSpec::clustering(ModelKind::Model2, TendencyShape::Quadratic, make_cycle(5), 2);
  for (const auto* spec : {&wrong_n, &odd}) {
    try {
      initial_configuration(parse_initial_pattern("alternating"), *spec, rng);
      FAIL("expected InvalidInitialPattern");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InvalidInitialPattern);
    }
  }
  CHECK(initial_configuration(parse_initial_pattern("single-pole:3"), fig1_spec(), rng) ==
        Configuration{{0, 0, 0, 5}});
  CHECK_THROWS_AS(initial_configuration(parse_initial_pattern("single-pole(9)"), fig1_spec(), rng), Error);
  CHECK_THROWS_AS(initial_configuration(parse_initial_pattern("1,1,1"), fig1_spec(), rng), Error);
  CHECK(initial_configuration(parse_initial_pattern("2,1,1,1"), fig1_spec(), rng) == Configuration{{2, 1, 1, 1}});
  CHECK(initial_configuration(parse_initial_pattern("uniform-random"), fig1_spec(), rng).total() == 5);
  CHECK_THROWS_AS(parse_initial_pattern("single-pole(x)"), Error);
}

TEST_CASE("configuration validation") {
  auto c = config_for(fig1_spec(), 0.05, 100, 1);
  c.snapshot_times = {101};
  CHECK_THROWS_AS(run(c), Error);
  c.snapshot_times = {};
  c.averaging_window = 200;
  CHECK_THROWS_AS(run(c), Error);
  c.averaging_window = 0;
  c.eps = 0.0;
  CHECK_THROWS_AS(run(c), Error);
}

TEST_CASE("empirical occupation against the exact solve") {
  const auto spec = ModelSpec::clustering(ModelKind::Model2, TendencyShape::Linear, make_path(3), 2);
  const auto cmp = empirical_vs_exact(spec, 0.01, 300'000, 1);
  CHECK(cmp.samples == 270'000);
  CHECK(cmp.tv_distance < 0.04);
  try {
    empirical_vs_exact(spec, 0.01, 0, 1);
    FAIL("expected InsufficientSamples");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InsufficientSamples);
  }
}

TEST_CASE("output formats") {
  const auto torus = make_torus(3, 3);
  const auto csv = snapshot_csv(Configuration{{0, 1, 0, 0, 2, 0, 0, 0, 3}}, torus);
  CHECK(csv.rfind("vertex_index,row,col,occupancy\n0,0,0,0\n1,0,1,1\n", 0) == 0);
  CHECK(csv.find("8,2,2,3\n") != std::string::npos);
  CHECK(snapshot_csv(Configuration{{1, 0}}, make_path(2)) == "vertex_index,occupancy\n0,1\n1,0\n");

  auto c = config_for(fig1_spec(), 0.05, 10, 4);
  c.snapshot_times = {5};
  const auto m = run(c);
  CHECK(trajectory_csv(m).rfind("step,support_size,peak_ratio\n0,", 0) == 0);
  const auto summary = summary_json(c, m);
  CHECK(summary["seed"] == 4);
  CHECK(summary["snapshots"].size() == 1);
  CHECK(summary["snapshots"][0]["step"] == 5);
}
