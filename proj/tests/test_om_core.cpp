#include <doctest.h>

#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "omchain/error.hpp"
#include "omchain/om_core.hpp"
#include "omchain/particle_model.hpp"
#include "oracles.hpp"

using namespace omchain;

namespace {

OMChain triangle(int back_last) {
  // Forward 0 -> 1 -> 2 -> 0 all order 0; backward orders (0, 0, back_last).
  ChainBuilder b(3);
  b.add_power(0, 1, 0.3, 0).add_power(1, 2, 0.3, 0).add_power(2, 0, 0.3, 0);
  b.add_power(1, 0, 0.3, 0).add_power(2, 1, 0.3, 0).add_power(0, 2, 0.3, back_last);
  b.add_remainder_everywhere();
  return b.build();
}

OMChain two_state(double a, int oa, double b, int ob) {
  ChainBuilder builder(std::vector<std::string>{"a", "b"});
  builder.add_power(0, 1, a, oa).add_power(1, 0, b, ob).add_remainder_everywhere();
  return builder.build();
}

OMChain single_state() {
  ChainBuilder b(1);
  b.add_remainder(0);
  return b.build();
}

ParticleChain fig1(ModelKind kind = ModelKind::Model2) {
  return build_chain(ModelSpec::clustering(kind, TendencyShape::Linear, make_cycle(4), 5));
}

}  // namespace

TEST_CASE("structural symmetry") {
  CHECK(check_structural_symmetry(fig1().chain).empty());
  ChainBuilder b(std::vector<std::string>{"a", "b"});
  b.add_power(0, 1, 0.5, 0).add_remainder_everywhere();
  const auto one_way = check_structural_symmetry(b.build());
  REQUIRE(one_way.size() == 1);
  CHECK(one_way[0] == StatePair{0, 1});
  CHECK(check_structural_symmetry(single_state()).empty());
}

TEST_CASE("OM-cycle condition") {
  CHECK_FALSE(check_om_cycle(fig1(ModelKind::Model1).chain).has_value());
  CHECK_FALSE(check_om_cycle(triangle(0)).has_value());

  const auto violation = check_om_cycle(triangle(1));
  REQUIRE(violation.has_value());
  CHECK(violation->cycle.front() == violation->cycle.back());
  CHECK(violation->cycle.size() == 4);
  CHECK(std::min(violation->forward_sum, violation->backward_sum) == 0);
  CHECK(std::max(violation->forward_sum, violation->backward_sum) == 1);

  // Symmetric random walk on a 5-cycle: exactly reversible.
  ChainBuilder walk(5);
  for (StateIndex v = 0; v < 5; ++v) {
    walk.add_power(v, (v + 1) % 5, 0.25, 0).add_power(v, (v + 4) % 5, 0.25, 0);
  }
  walk.add_remainder_everywhere();
  const auto rw = walk.build();
  CHECK_FALSE(check_om_cycle(rw).has_value());
  CHECK_FALSE(check_classical_reversibility(rw, 0.01).has_value());
}

TEST_CASE("OM-cycle preconditions") {
  ChainBuilder one_way(2);
  one_way.add_power(0, 1, 0.5, 0).add_remainder_everywhere();
  CHECK_THROWS_AS(check_om_cycle(one_way.build()), Error);

  ChainBuilder split(4);
  split.add_power(0, 1, 0.5, 0).add_power(1, 0, 0.5, 0);
  split.add_power(2, 3, 0.5, 0).add_power(3, 2, 0.5, 0).add_remainder_everywhere();
  const auto reducible = split.build();
  CHECK_FALSE(is_irreducible(reducible));
  try {
    check_om_cycle(reducible);
    FAIL("expected NotIrreducible");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotIrreducible);
  }
}

TEST_CASE("compute_nu examples") {
  const auto two = two_state(0.5, 1, 0.5, 0);
  const auto nu = compute_nu(two);
  CHECK(nu.values == std::vector<int>{0, 1});
  CHECK(compute_nu(two, 1) == nu);

  // Path graph m=3, n=2 clustering chain: nu = |s(x)| - 1.
  const auto pc = build_chain(ModelSpec::clustering(ModelKind::Model2, TendencyShape::Linear, make_path(3), 2));
  REQUIRE(pc.states.size() == 6);
  const auto path_nu = compute_nu(pc.chain);
  for (StateIndex x = 0; x < pc.states.size(); ++x) {
    CHECK(path_nu[x] == static_cast<int>(support_size(pc.states[x])) - 1);
  }

  try {
    compute_nu(triangle(1));
    FAIL("expected OMCycleViolated");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OMCycleViolated);
  }
}

TEST_CASE("nu does not depend on the base state") {
  const auto pc = fig1();
  const auto reference = compute_nu(pc.chain);
  for (StateIndex base = 0; base < pc.chain.size(); ++base) CHECK(compute_nu(pc.chain, base) == reference);
}

TEST_CASE("OM detailed balance and local perturbation") {
  const auto pc = fig1();
  auto nu = compute_nu(pc.chain);
  CHECK(verify_om_detailed_balance(pc.chain, nu).empty());

  const StateIndex victim = 17;
  nu.values[victim] += 1;
  const auto broken = verify_om_detailed_balance(pc.chain, nu);
  REQUIRE_FALSE(broken.empty());
  std::size_t incident = 0;
  for (const auto& t : pc.chain.transitions(victim)) incident += t.to != victim;
  // Every reported edge touches the perturbed state, and every incident edge is reported.
  for (const auto& [u, v] : broken) CHECK((u == victim || v == victim));
  CHECK(broken.size() >= incident);

  CHECK(verify_om_detailed_balance(single_state(), NuFunction{{0}}).empty());
}

TEST_CASE("level sets") {
  const auto pc = fig1();
  const auto levels = partition_omega(compute_nu(pc.chain));
  CHECK(levels.size() == 4);
  REQUIRE(levels.count(0) == 1);
  REQUIRE(levels.at(0).size() == 4);
  for (auto x : levels.at(0)) CHECK(support_size(pc.states[x]) == 1);

  const auto small = build_chain(ModelSpec::clustering(ModelKind::Model2, TendencyShape::Linear, make_cycle(4), 3));
  const auto small_levels = partition_omega(compute_nu(small.chain));
  REQUIRE(small_levels.count(2) == 1);
  std::vector<std::string> top;
  for (auto x : small_levels.at(2)) top.push_back(format_configuration(small.states[x]));
  CHECK(top == std::vector<std::string>{"0,1,1,1", "1,0,1,1", "1,1,0,1", "1,1,1,0"});

  const auto flat = partition_omega(NuFunction{{0, 0, 0}});
  CHECK(flat.size() == 1);
  CHECK(flat.at(0).size() == 3);
}

TEST_CASE("layering: edges going up a level carry positive order") {
  const auto pc = fig1(ModelKind::Model1);
  const auto nu = compute_nu(pc.chain);
  for (StateIndex x = 0; x < pc.chain.size(); ++x) {
    for (const auto& t : pc.chain.transitions(x)) {
      const int back = pc.chain.order(t.to, x)->exponent;
      CHECK(nu[t.to] - nu[x] == t.order - back);
      if (nu[t.to] > nu[x]) CHECK(t.order >= 1);
    }
  }
}

TEST_CASE("classical reversibility") {
  // Model 2 on the 4-cycle is OM-reversible but not reversible at fixed eps;
  // detailed balance against the GTH stationary vector confirms it.
  const auto pc = fig1();
  const auto violation = check_classical_reversibility(pc.chain, 0.01);
  REQUIRE(violation.has_value());
  const auto pi = oracle::gth_stationary(oracle::dense(pc.chain, 0.01));
  double worst = 0.0;
  for (StateIndex x = 0; x < pc.chain.size(); ++x) {
    for (const auto& t : pc.chain.transitions(x)) {
      const double a = pi[x] * pc.chain.prob(x, t.to, 0.01);
      const double b = pi[t.to] * pc.chain.prob(t.to, x, 0.01);
      worst = std::max(worst, std::abs(a - b) / std::max(a, b));
    }
  }
  CHECK(worst > 1e-6);

  const auto minus_one = fig1(ModelKind::Model1MinusOne);
  CHECK_FALSE(check_classical_reversibility(minus_one.chain, 1e-2).has_value());
  CHECK_FALSE(check_classical_reversibility(minus_one.chain, 1e-3).has_value());
}

TEST_CASE("absorbing states of the eps -> 0 limit") {
  const auto pc = fig1();
  const auto absorbing = absorbing_in_limit(pc.chain);
  const auto isolated = absorbing_states_eps0(make_cycle(4), 5);
  REQUIRE(absorbing.size() == isolated.size());
  for (std::size_t k = 0; k < absorbing.size(); ++k) CHECK(pc.states[absorbing[k]] == isolated[k]);
}

TEST_CASE("order label validation") {
  CHECK(validate_order_labels(fig1().chain).empty());
  // Declared order 1, actual order 2.
  ChainBuilder b(2);
  b.add(0, 1, 1, [](double eps) { return 0.5 * eps * eps; }).add_power(1, 0, 0.5, 0).add_remainder_everywhere();
  const auto bad = validate_order_labels(b.build());
  REQUIRE_FALSE(bad.empty());
  CHECK(bad.front().from == 0);
  CHECK(bad.front().to == 1);
  // Non-integer exponent eps^1.5 declared as 1.
  ChainBuilder c(2);
  c.add(0, 1, 1, [](double eps) { return 0.5 * eps * std::sqrt(eps); }).add_power(1, 0, 0.5, 0).add_remainder_everywhere();
  CHECK_FALSE(validate_order_labels(c.build()).empty());
}

TEST_CASE("row sums") {
  CHECK(check_row_sums(fig1().chain, 0.01).empty());
  ChainBuilder b(2);
  b.add_power(0, 1, 0.5, 0).add_power(1, 0, 0.5, 0);
  CHECK(check_row_sums(b.build(), 0.01).size() == 2);
}

TEST_CASE("graph export") {
  const auto pc = fig1();
  const auto nu = compute_nu(pc.chain);
  const auto doc = nlohmann::json::parse(export_layered_graph(pc.chain, nu, GraphFormat::Json));
  CHECK(doc["format_version"] == 1);
  CHECK(doc["nodes"].size() == 56);
  std::set<int> layers;
  for (const auto& node : doc["nodes"]) layers.insert(node["layer"].get<int>());
  CHECK(layers == std::set<int>{0, 1, 2, 3});
  for (const auto& edge : doc["edges"]) {
    const int from = doc["nodes"][edge["source"].get<std::size_t>()]["layer"];
    const int to = doc["nodes"][edge["target"].get<std::size_t>()]["layer"];
    if (to < from) {
      CHECK(edge["order"] == 0);
      CHECK(edge["direction"] == "down");
    }
  }

  const auto dot = export_layered_graph(pc.chain, nu, GraphFormat::Dot);
  CHECK(dot.rfind("digraph", 0) == 0);
  CHECK(dot.find("color=\"red\"") != std::string::npos);
  CHECK(dot.find("color=\"green\"") != std::string::npos);

  const auto lonely = nlohmann::json::parse(export_layered_graph(single_state(), NuFunction{{0}}, GraphFormat::Json));
  CHECK(lonely["nodes"].size() == 1);
  CHECK(lonely["nodes"][0]["layer"] == 0);
  CHECK(lonely["edges"].empty());

  const auto twenty = build_chain(ModelSpec::clustering(ModelKind::Model2, TendencyShape::Linear, make_cycle(4), 3));
  const auto twenty_doc =
      nlohmann::json::parse(export_layered_graph(twenty.chain, compute_nu(twenty.chain), GraphFormat::Json));
  CHECK(twenty_doc["nodes"].size() == 20);

  CHECK_THROWS_AS(parse_graph_format("svg"), Error);
  CHECK(parse_graph_format("dot") == GraphFormat::Dot);
}

TEST_CASE("randomized equivalence of the cycle test, nu and detailed balance") {
  std::mt19937_64 rng(7);
  int consistent = 0;
  int inconsistent = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const auto [chain, by_construction] = oracle::random_chain(rng);
    const bool expected = oracle::om_cycle_condition(chain);
    if (chain.size() <= 7) CHECK(oracle::om_cycle_condition_simple_cycles(chain) == expected);
    if (by_construction) CHECK(expected);
    const bool cycle_ok = !check_om_cycle(chain).has_value();
    bool nu_ok = false;
    try {
      nu_ok = verify_om_detailed_balance(chain, compute_nu(chain)).empty();
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::OMCycleViolated);
    }
    CHECK(cycle_ok == expected);
    CHECK(nu_ok == expected);
    (expected ? consistent : inconsistent)++;
  }
  CHECK(consistent > 50);
  CHECK(inconsistent > 50);
}
