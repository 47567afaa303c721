#include <doctest.h>

#include <random>

#include "omchain/order.hpp"

using omchain::om_add;
using omchain::om_div;
using omchain::om_mul;
using omchain::Order;
using omchain::OrderMagnitude;

namespace {
Order k(int e) { return OrderMagnitude{e}; }
}  // namespace

TEST_CASE("om_add takes the smaller exponent") {
  CHECK(om_add(k(2), k(0)) == k(0));
  CHECK(om_add(k(-3), k(4)) == k(-3));
  for (int e = -5; e <= 5; ++e) CHECK(om_add(k(e), k(e)) == k(e));
}

TEST_CASE("zero function is the identity for addition and annihilates products") {
  CHECK(om_add(std::nullopt, k(3)) == k(3));
  CHECK(om_add(k(3), std::nullopt) == k(3));
  CHECK_FALSE(om_add(std::nullopt, std::nullopt).has_value());
  CHECK_FALSE(om_mul(std::nullopt, k(5)).has_value());
  CHECK_FALSE(om_mul(k(5), std::nullopt).has_value());
  CHECK_FALSE(om_div(std::nullopt, OrderMagnitude{2}).has_value());
}

TEST_CASE("om_mul adds exponents") {
  CHECK(om_mul(k(1), k(1)) == k(2));
  for (int e = -4; e <= 4; ++e) CHECK(om_mul(k(0), k(e)) == k(e));
  CHECK(om_div(k(1), OrderMagnitude{1}) == k(0));
  CHECK(om_div(k(0), OrderMagnitude{1}) == k(-1));
}

TEST_CASE("algebra laws on random exponents") {
  std::mt19937_64 rng(20240611);
  std::uniform_int_distribution<int> draw(-20, 20);
  std::bernoulli_distribution absent(0.1);
  auto random_order = [&]() -> Order { return absent(rng) ? Order{} : k(draw(rng)); };
  for (int trial = 0; trial < 2000; ++trial) {
    const Order a = random_order();
    const Order b = random_order();
    const Order c = random_order();
    CHECK(om_add(a, b) == om_add(b, a));
    CHECK(om_add(om_add(a, b), c) == om_add(a, om_add(b, c)));
    CHECK(om_add(a, a) == a);
    CHECK(om_mul(a, b) == om_mul(b, a));
    CHECK(om_mul(om_mul(a, b), c) == om_mul(a, om_mul(b, c)));
    // Multiplication distributes over the min.
    CHECK(om_mul(a, om_add(b, c)) == om_add(om_mul(a, b), om_mul(a, c)));
    if (a && b) CHECK(om_mul(a, b)->exponent == a->exponent + b->exponent);
  }
}
