#pragma once

#include <compare>
#include <optional>
#include <ostream>

namespace omchain {

/// Exponent k of a positive function that behaves like eps^k as eps -> 0.
struct OrderMagnitude {
  int exponent = 0;

  friend auto operator<=>(const OrderMagnitude&, const OrderMagnitude&) = default;
};

/// The zero function has no order; it is std::nullopt, never a sentinel value.
using Order = std::optional<OrderMagnitude>;

/// Order of a sum of positive functions: the smaller exponent dominates.
constexpr Order om_add(Order a, Order b) {
  if (!a) return b;
  if (!b) return a;
  return a->exponent <= b->exponent ? a : b;
}

/// Order of a product: exponents add; zero annihilates.
constexpr Order om_mul(Order a, Order b) {
  if (!a || !b) return std::nullopt;
  return OrderMagnitude{a->exponent + b->exponent};
}

/// Order of a quotient a/b with b nonzero.
constexpr Order om_div(Order a, OrderMagnitude b) {
  if (!a) return std::nullopt;
  return OrderMagnitude{a->exponent - b.exponent};
}

inline std::ostream& operator<<(std::ostream& os, OrderMagnitude o) {
  return os << "eps^" << o.exponent;
}

}  // namespace omchain
