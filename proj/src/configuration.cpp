#include "omchain/configuration.hpp"

#include <charconv>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <sstream>

#include "omchain/error.hpp"

namespace omchain {

int Configuration::total() const { return std::accumulate(occupancy.begin(), occupancy.end(), 0); }

std::string format_configuration(const Configuration& x) {
  std::string out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) out.push_back(',');
    out += std::to_string(x.occupancy[i]);
  }
  return out;
}

Configuration parse_configuration(std::string_view text) {
  Configuration x;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    auto field = text.substr(start, end - start);
    while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
    while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
    int value = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size() || value < 0) {
      throw Error(ErrorCode::ConfigError, "bad configuration '" + std::string(text) + "'");
    }
    x.occupancy.push_back(value);
    start = end + 1;
  }
  return x;
}

std::size_t state_cap_from_env() {
  const char* raw = std::getenv("OMCHAIN_STATE_CAP");
  if (!raw || !*raw) return kDefaultStateCap;
  std::size_t value = 0;
  std::string_view text(raw);
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || value == 0) return kDefaultStateCap;
  return value;
}

std::uint64_t count_states(int n, std::size_t m) {
  if (n < 0 || m == 0) return 0;
  // C(n + k, k) with k = m - 1, built incrementally; exact while it fits.
  const std::uint64_t k = m - 1;
  std::uint64_t result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // result = C(n + i, i) = C(n + i - 1, i - 1) * (n + i) / i
    const std::uint64_t g = std::gcd(result, i);
    const std::uint64_t factor = (static_cast<std::uint64_t>(n) + i) / (i / g);
    if (__builtin_mul_overflow(result / g, factor, &result)) {
      return std::numeric_limits<std::uint64_t>::max();
    }
  }
  return result;
}

std::vector<Configuration> enumerate_states(int n, std::size_t m, std::size_t cap) {
  if (n < 0 || m == 0) throw Error(ErrorCode::InvalidParameters, "need n >= 0 and m >= 1");
  const std::uint64_t count = count_states(n, m);
  if (count > cap) {
    throw Error(ErrorCode::SizeLimitExceeded,
                std::to_string(count) + " states exceed the cap of " + std::to_string(cap));
  }
  std::vector<Configuration> states;
  states.reserve(static_cast<std::size_t>(count));
  Configuration x{std::vector<int>(m, 0)};
  x.occupancy.back() = n;
  // Ascending lexicographic successor: bump the rightmost slot k < m-1 that
  // has mass to its right and push the rest of that mass to the last slot.
  while (true) {
    states.push_back(x);
    std::ptrdiff_t k = static_cast<std::ptrdiff_t>(m) - 2;
    int suffix = x.occupancy[m - 1];
    while (k >= 0 && suffix == 0) {
      suffix += x.occupancy[static_cast<std::size_t>(k)];
      --k;
    }
    if (k < 0) break;
    x.occupancy[static_cast<std::size_t>(k)] += 1;
    for (std::size_t l = static_cast<std::size_t>(k) + 1; l < m; ++l) x.occupancy[l] = 0;
    x.occupancy[m - 1] = suffix - 1;
  }
  return states;
}

std::size_t lexicographic_rank(const Configuration& x) {
  const std::size_t m = x.size();
  std::size_t rank = 0;
  int remaining = x.total();
  for (std::size_t k = 0; k + 1 < m; ++k) {
    const std::size_t parts_after = m - k - 1;
    for (int v = 0; v < x.occupancy[k]; ++v) {
      rank += static_cast<std::size_t>(count_states(remaining - v, parts_after));
    }
    remaining -= x.occupancy[k];
  }
  return rank;
}

Configuration move(const Configuration& x, Vertex i, Vertex j) {
  if (i >= x.size() || j >= x.size()) throw Error(ErrorCode::InvalidParameters, "vertex out of range");
  if (i == j) return x;
  if (x.occupancy[i] < 1) {
    throw Error(ErrorCode::EmptySourceVertex, "vertex " + std::to_string(i + 1) + " is empty");
  }
  Configuration y = x;
  --y.occupancy[i];
  ++y.occupancy[j];
  return y;
}

Support support(const Configuration& x) {
  Support s;
  for (Vertex v = 0; v < x.size(); ++v) {
    if (x.occupancy[v] >= 1) s.vertices.push_back(v);
  }
  s.size = s.vertices.size();
  return s;
}

std::size_t support_size(const Configuration& x) {
  std::size_t count = 0;
  for (int v : x.occupancy) count += v >= 1 ? 1 : 0;
  return count;
}

bool occupied_vertices_isolated(const Network& network, const Configuration& x) {
  for (Vertex v = 0; v < x.size(); ++v) {
    if (x.occupancy[v] == 0) continue;
    for (Vertex w : network.neighbours(v)) {
      if (x.occupancy[w] > 0) return false;
    }
  }
  return true;
}

}  // namespace omchain
