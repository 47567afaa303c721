#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "omchain/network.hpp"

namespace omchain {

/// Occupancy vector x = (x_1, ..., x_m); the particle-chain state.
struct Configuration {
  std::vector<int> occupancy;

  std::size_t size() const noexcept { return occupancy.size(); }
  int operator[](Vertex v) const { return occupancy[v]; }
  int total() const;

  friend auto operator<=>(const Configuration&, const Configuration&) = default;
};

/// Comma-separated occupancies, e.g. "0,0,0,5".
std::string format_configuration(const Configuration& x);
Configuration parse_configuration(std::string_view text);

constexpr std::size_t kDefaultStateCap = 2'000'000;

/// Cap from OMCHAIN_STATE_CAP if set and valid, otherwise kDefaultStateCap.
std::size_t state_cap_from_env();

/// C(n + m - 1, m - 1), saturating at UINT64_MAX.
std::uint64_t count_states(int n, std::size_t m);

/// All weak compositions of n into m parts in ascending lexicographic order.
/// Throws SizeLimitExceeded when there are more than `cap`.
std::vector<Configuration> enumerate_states(int n, std::size_t m,
                                            std::size_t cap = kDefaultStateCap);

/// Position of x in enumerate_states(x.total(), x.size()).
std::size_t lexicographic_rank(const Configuration& x);

/// x^{i,j}: one particle from i to j; move(x, i, i) == x.
/// Throws EmptySourceVertex when x_i == 0 and i != j.
Configuration move(const Configuration& x, Vertex i, Vertex j);

struct Support {
  std::vector<Vertex> vertices;
  std::size_t size = 0;
};

Support support(const Configuration& x);
std::size_t support_size(const Configuration& x);

/// True when no two occupied vertices are adjacent.
bool occupied_vertices_isolated(const Network& network, const Configuration& x);

}  // namespace omchain
