#include "omchain/network.hpp"

#include <algorithm>
#include <deque>

#include "omchain/error.hpp"

namespace omchain {

Network::Network(std::vector<std::vector<Vertex>> adjacency, std::optional<GridShape> grid)
    : adjacency_(std::move(adjacency)), grid_(grid) {
  const std::size_t m = adjacency_.size();
  if (m == 0) throw Error(ErrorCode::InvalidParameters, "network needs at least one vertex");
  for (Vertex v = 0; v < m; ++v) {
    auto sorted = adjacency_[v];
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw Error(ErrorCode::InvalidParameters, "duplicate edge at vertex " + std::to_string(v));
    }
    for (Vertex w : adjacency_[v]) {
      if (w >= m) throw Error(ErrorCode::InvalidParameters, "neighbour out of range");
      if (w == v) throw Error(ErrorCode::InvalidParameters, "self-loop at vertex " + std::to_string(v));
      const auto& back = adjacency_[w];
      if (std::find(back.begin(), back.end(), v) == back.end()) {
        throw Error(ErrorCode::InvalidParameters, "adjacency is not symmetric");
      }
    }
  }
  std::vector<char> seen(m, 0);
  std::deque<Vertex> queue{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!queue.empty()) {
    Vertex v = queue.front();
    queue.pop_front();
    for (Vertex w : adjacency_[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        ++count;
        queue.push_back(w);
      }
    }
  }
  if (count != m) throw Error(ErrorCode::Disconnected, "network is not connected");
  if (grid_ && grid_->width * grid_->height != m) {
    throw Error(ErrorCode::InvalidParameters, "grid shape does not match vertex count");
  }
}

bool Network::adjacent(Vertex a, Vertex b) const {
  const auto& adj = adjacency_.at(a);
  return std::find(adj.begin(), adj.end(), b) != adj.end();
}

std::optional<std::size_t> Network::regular_degree() const {
  std::size_t d = adjacency_.front().size();
  for (const auto& adj : adjacency_) {
    if (adj.size() != d) return std::nullopt;
  }
  return d;
}

std::optional<std::vector<int>> Network::bipartition() const {
  std::vector<int> colour(size(), -1);
  std::deque<Vertex> queue{0};
  colour[0] = 0;
  while (!queue.empty()) {
    Vertex v = queue.front();
    queue.pop_front();
    for (Vertex w : adjacency_[v]) {
      if (colour[w] < 0) {
        colour[w] = 1 - colour[v];
        queue.push_back(w);
      } else if (colour[w] == colour[v]) {
        return std::nullopt;
      }
    }
  }
  return colour;
}

Network make_cycle(std::size_t m) {
  if (m < 3) throw Error(ErrorCode::InvalidParameters, "cycle needs at least 3 vertices");
  std::vector<std::vector<Vertex>> adj(m);
  for (Vertex v = 0; v < m; ++v) adj[v] = {(v + m - 1) % m, (v + 1) % m};
  return Network(std::move(adj));
}

Network make_path(std::size_t m) {
  if (m < 1) throw Error(ErrorCode::InvalidParameters, "path needs at least 1 vertex");
  std::vector<std::vector<Vertex>> adj(m);
  for (Vertex v = 0; v + 1 < m; ++v) {
    adj[v].push_back(v + 1);
    adj[v + 1].push_back(v);
  }
  for (auto& a : adj) std::sort(a.begin(), a.end());
  return Network(std::move(adj));
}

Network make_torus(std::size_t width, std::size_t height) {
  if (width < 3 || height < 3) {
    throw Error(ErrorCode::InvalidParameters, "torus dimensions must be at least 3");
  }
  std::vector<std::vector<Vertex>> adj(width * height);
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      auto at = [width](std::size_t row, std::size_t col) { return row * width + col; };
      adj[at(r, c)] = {at((r + height - 1) % height, c), at(r, (c + width - 1) % width),
                       at(r, (c + 1) % width), at((r + 1) % height, c)};
    }
  }
  return Network(std::move(adj), Network::GridShape{width, height});
}

Network make_complete(std::size_t m) {
  if (m < 1) throw Error(ErrorCode::InvalidParameters, "complete graph needs at least 1 vertex");
  std::vector<std::vector<Vertex>> adj(m);
  for (Vertex v = 0; v < m; ++v) {
    for (Vertex w = 0; w < m; ++w) {
      if (w != v) adj[v].push_back(w);
    }
  }
  return Network(std::move(adj));
}

Network make_custom(std::size_t m, const std::vector<std::pair<Vertex, Vertex>>& edges) {
  std::vector<std::vector<Vertex>> adj(m);
  for (auto [a, b] : edges) {
    if (a >= m || b >= m) throw Error(ErrorCode::InvalidParameters, "edge endpoint out of range");
    if (a == b) throw Error(ErrorCode::InvalidParameters, "self-loop in edge list");
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  for (auto& a : adj) std::sort(a.begin(), a.end());
  return Network(std::move(adj));
}

}  // namespace omchain
