#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace omchain {

using Vertex = std::size_t;

/// Finite, undirected, connected graph without self-loops.
class Network {
 public:
  struct GridShape {
    std::size_t width;
    std::size_t height;
  };

  /// Validates symmetry, absence of self-loops and duplicates, connectivity.
  explicit Network(std::vector<std::vector<Vertex>> adjacency,
                   std::optional<GridShape> grid = std::nullopt);

  std::size_t size() const noexcept { return adjacency_.size(); }
  const std::vector<Vertex>& neighbours(Vertex v) const { return adjacency_.at(v); }
  std::size_t degree(Vertex v) const { return adjacency_.at(v).size(); }
  bool adjacent(Vertex a, Vertex b) const;

  /// Common degree when every vertex has the same degree.
  std::optional<std::size_t> regular_degree() const;

  /// Row/column layout for torus networks (vertex = row * width + col).
  const std::optional<GridShape>& grid() const noexcept { return grid_; }

  /// Two-colouring by BFS; nullopt if the graph has an odd cycle.
  std::optional<std::vector<int>> bipartition() const;

 private:
  std::vector<std::vector<Vertex>> adjacency_;
  std::optional<GridShape> grid_;
};

Network make_cycle(std::size_t m);
Network make_path(std::size_t m);
/// width x height grid with wraparound; 4-regular.
Network make_torus(std::size_t width, std::size_t height);
Network make_complete(std::size_t m);
Network make_custom(std::size_t m, const std::vector<std::pair<Vertex, Vertex>>& edges);

}  // namespace omchain
