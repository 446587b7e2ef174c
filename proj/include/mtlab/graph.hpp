#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace mtlab {

using Vertex = std::uint32_t;

inline constexpr std::uint32_t kUnreachable = std::numeric_limits<std::uint32_t>::max();

/// Undirected edge in canonical order u < v.
struct Edge {
  Vertex u = 0;
  Vertex v = 0;

  /// Canonicalizes; throws std::invalid_argument on a loop.
  static Edge make(Vertex a, Vertex b);

  friend auto operator<=>(const Edge&, const Edge&) = default;
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Compressed adjacency. Entry k of a vertex's row pairs a neighbour with the
/// index of the edge in the owning graph's edge list.
struct Adjacency {
  std::vector<std::size_t> offsets;
  std::vector<Vertex> neighbors;
  std::vector<std::uint32_t> edge_ids;

  std::span<const Vertex> of(Vertex v) const {
    return {neighbors.data() + offsets[v], offsets[v + 1] - offsets[v]};
  }
  std::span<const std::uint32_t> edges_of(Vertex v) const {
    return {edge_ids.data() + offsets[v], offsets[v + 1] - offsets[v]};
  }
  std::size_t degree(Vertex v) const { return offsets[v + 1] - offsets[v]; }
};

/// Simple undirected graph on [0, n). The adjacency index is built on first use.
class Graph {
 public:
  Graph() = default;
  explicit Graph(std::size_t n) : n_(n) {}
  /// Validates range, canonicalizes, rejects loops and duplicate edges.
  Graph(std::size_t n, std::vector<Edge> edges);

  std::size_t vertex_count() const { return n_; }
  std::size_t edge_count() const { return edges_.size(); }
  std::span<const Edge> edges() const { return edges_; }

  const Adjacency& adjacency() const;
  std::size_t degree(Vertex v) const { return adjacency().degree(v); }

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  mutable std::optional<Adjacency> adjacency_;
};

/// Union-by-size with path compression. Sizes live at roots so the largest
/// component is available in O(1).
class DisjointSets {
 public:
  DisjointSets() = default;
  explicit DisjointSets(std::size_t n);

  Vertex find(Vertex v);
  /// Merges the components of the endpoints; false if already joined.
  bool unite(Vertex a, Vertex b);
  bool unite(Edge e) { return unite(e.u, e.v); }
  bool same(Vertex a, Vertex b) { return find(a) == find(b); }

  std::size_t size_of(Vertex v) { return size_[find(v)]; }
  std::size_t vertex_count() const { return parent_.size(); }
  std::size_t component_count() const { return components_; }
  std::size_t largest() const { return largest_; }

 private:
  void check(Vertex v) const;

  std::vector<Vertex> parent_;
  std::vector<std::uint32_t> size_;
  std::size_t components_ = 0;
  std::size_t largest_ = 0;
};

struct ComponentSummary {
  std::size_t count = 0;
  std::vector<std::size_t> sizes;  // descending
};

ComponentSummary components(const Graph& g);
/// Component id per vertex, ids assigned in order of smallest vertex.
std::vector<std::uint32_t> component_labels(const Graph& g);
std::size_t component_count(std::size_t n, std::span<const Edge> edges);
bool is_connected(const Graph& g);
/// Hop distances from src; kUnreachable where no path exists.
std::vector<std::uint32_t> bfs_distances(const Graph& g, Vertex src);

/// True iff the edges are acyclic on [0, n).
bool is_forest(std::size_t n, std::span<const Edge> edges);
/// True iff the edges form a spanning tree of [0, n).
bool is_spanning_tree(std::size_t n, std::span<const Edge> edges);

}  // namespace mtlab
