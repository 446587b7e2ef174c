#include "mtlab/graph.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <stdexcept>
#include <string>

namespace mtlab {

Edge Edge::make(Vertex a, Vertex b) {
  if (a == b) throw std::invalid_argument("edge endpoints must differ: " + std::to_string(a));
  return a < b ? Edge{a, b} : Edge{b, a};
}

Graph::Graph(std::size_t n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
  for (Edge& e : edges_) {
    if (e.u >= n_ || e.v >= n_) throw std::invalid_argument("edge vertex out of range");
    e = Edge::make(e.u, e.v);
  }
  std::vector<Edge> sorted = edges_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("duplicate edge in graph");
  }
}

const Adjacency& Graph::adjacency() const {
  if (adjacency_) return *adjacency_;
  Adjacency adj;
  adj.offsets.assign(n_ + 1, 0);
  for (const Edge& e : edges_) {
    ++adj.offsets[e.u + 1];
    ++adj.offsets[e.v + 1];
  }
  for (std::size_t v = 0; v < n_; ++v) adj.offsets[v + 1] += adj.offsets[v];
  adj.neighbors.resize(2 * edges_.size());
  adj.edge_ids.resize(2 * edges_.size());
  std::vector<std::size_t> fill(adj.offsets.begin(), adj.offsets.end() - 1);
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    adj.neighbors[fill[e.u]] = e.v;
    adj.edge_ids[fill[e.u]++] = static_cast<std::uint32_t>(i);
    adj.neighbors[fill[e.v]] = e.u;
    adj.edge_ids[fill[e.v]++] = static_cast<std::uint32_t>(i);
  }
  adjacency_ = std::move(adj);
  return *adjacency_;
}

DisjointSets::DisjointSets(std::size_t n)
    : parent_(n), size_(n, 1), components_(n), largest_(n > 0 ? 1 : 0) {
  for (std::size_t v = 0; v < n; ++v) parent_[v] = static_cast<Vertex>(v);
}

void DisjointSets::check(Vertex v) const {
  if (v >= parent_.size()) {
    throw std::invalid_argument("vertex " + std::to_string(v) + " out of range for " +
                                std::to_string(parent_.size()) + " vertices");
  }
}

Vertex DisjointSets::find(Vertex v) {
  check(v);
  Vertex root = v;
  while (parent_[root] != root) root = parent_[root];
  while (parent_[v] != root) {
    const Vertex next = parent_[v];
    parent_[v] = root;
    v = next;
  }
  return root;
}

bool DisjointSets::unite(Vertex a, Vertex b) {
  Vertex ra = find(a);
  Vertex rb = find(b);
  if (ra == rb) return false;
  if (size_[ra] < size_[rb]) std::swap(ra, rb);
  parent_[rb] = ra;
  size_[ra] += size_[rb];
  largest_ = std::max<std::size_t>(largest_, size_[ra]);
  --components_;
  return true;
}

std::vector<std::uint32_t> component_labels(const Graph& g) {
  const std::size_t n = g.vertex_count();
  const Adjacency& adj = g.adjacency();
  std::vector<std::uint32_t> label(n, kUnreachable);
  std::vector<Vertex> stack;
  std::uint32_t next = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (label[s] != kUnreachable) continue;
    label[s] = next;
    stack.push_back(static_cast<Vertex>(s));
    while (!stack.empty()) {
      const Vertex v = stack.back();
      stack.pop_back();
      for (Vertex w : adj.of(v)) {
        if (label[w] == kUnreachable) {
          label[w] = next;
          stack.push_back(w);
        }
      }
    }
    ++next;
  }
  return label;
}

ComponentSummary components(const Graph& g) {
  const auto label = component_labels(g);
  ComponentSummary out;
  for (std::uint32_t l : label) {
    if (l >= out.sizes.size()) out.sizes.resize(l + 1, 0);
    ++out.sizes[l];
  }
  out.count = out.sizes.size();
  std::sort(out.sizes.begin(), out.sizes.end(), std::greater<>());
  return out;
}

std::size_t component_count(std::size_t n, std::span<const Edge> edges) {
  DisjointSets ds(n);
  for (const Edge& e : edges) ds.unite(e);
  return ds.component_count();
}

bool is_connected(const Graph& g) { return components(g).count == 1; }

std::vector<std::uint32_t> bfs_distances(const Graph& g, Vertex src) {
  if (src >= g.vertex_count()) throw std::invalid_argument("bfs source out of range");
  const Adjacency& adj = g.adjacency();
  std::vector<std::uint32_t> dist(g.vertex_count(), kUnreachable);
  std::queue<Vertex> queue;
  dist[src] = 0;
  queue.push(src);
  while (!queue.empty()) {
    const Vertex v = queue.front();
    queue.pop();
    for (Vertex w : adj.of(v)) {
      if (dist[w] == kUnreachable) {
        dist[w] = dist[v] + 1;
        queue.push(w);
      }
    }
  }
  return dist;
}

bool is_forest(std::size_t n, std::span<const Edge> edges) {
  DisjointSets ds(n);
  for (const Edge& e : edges) {
    if (e.u == e.v || !ds.unite(e)) return false;
  }
  return true;
}

bool is_spanning_tree(std::size_t n, std::span<const Edge> edges) {
  return n >= 1 && edges.size() == n - 1 && is_forest(n, edges);
}

}  // namespace mtlab
