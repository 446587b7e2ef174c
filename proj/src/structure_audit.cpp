#include "mtlab/structure_audit.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <numeric>
#include <queue>
#include <set>
#include <stdexcept>

#include "json.hpp"
#include "mtlab/rng.hpp"

namespace mtlab {

using nlohmann::json;

UniversalParams UniversalParams::compute(std::size_t n, std::size_t m) {
  if (n < 16) throw std::invalid_argument("universal parameters need n >= 16");
  UniversalParams p;
  p.n = static_cast<double>(n);
  p.m = static_cast<double>(m);
  const double ln = std::log(p.n);
  const double lnln = std::log(ln);
  p.omega = std::pow(ln, 0.4);
  p.eps = 1.0 / p.omega;
  p.theta0 = 5.0 * lnln / ln;
  p.sigma0 = 10.0 * p.omega * p.omega * lnln / ln;
  p.a_max = p.m / (2.0 * p.n * ln);
  p.s1 = ln / (10.0 * lnln);
  p.n0_small = p.n / (ln * ln * ln);
  p.a2 = 3.0 * std::pow(p.n, -4.0 / 25.0);
  if (p.a2 > p.a1) p.flags.push_back("a2_exceeds_a1");
  if (p.a_max < p.a1) p.flags.push_back("a_max_below_a1");
  if (p.sigma0 > 1.0) p.flags.push_back("sigma0_exceeds_1");
  if (p.s1 < 3.0) p.flags.push_back("s1_below_3");
  if (ln / 12.0 < 1.0) p.flags.push_back("e_bound_below_1");
  if (p.n0_small < 4.0) p.flags.push_back("n0_small_below_4");
  return p;
}

double UniversalParams::theta_of_m() const { return 2.0 * m / (n * std::log(n)) - 1.0; }

double sigma_of_a(double a, double eps, double theta) {
  if (!(a > 0)) throw std::invalid_argument("sigma(a) needs a > 0");
  const double radicand = 2.0 * a * (1.0 + theta) / (1.0 + eps);
  if (!(radicand > 0)) throw std::invalid_argument("sigma(a) radicand must be positive");
  return std::sqrt(radicand);
}

std::string to_string(SearchMode mode) {
  switch (mode) {
    case SearchMode::kExhaustive: return "exhaustive";
    case SearchMode::kPeel: return "peel";
    case SearchMode::kSample: return "sample";
  }
  return "?";
}

namespace {

// Set membership with O(1) reset.
class Marker {
 public:
  explicit Marker(std::size_t n) : stamp_(n, 0) {}
  void next() { ++epoch_; }
  void mark(Vertex v) { stamp_[v] = epoch_; }
  bool marked(Vertex v) const { return stamp_[v] == epoch_; }

 private:
  std::vector<std::uint32_t> stamp_;
  std::uint32_t epoch_ = 0;
};

bool violates(std::size_t edges, std::size_t size, double bound, Strictness strictness) {
  const double limit = bound * static_cast<double>(size);
  const double e = static_cast<double>(edges);
  return strictness == Strictness::kAtMost ? e > limit : e >= limit;
}

std::vector<std::uint32_t> adjacency_masks(const Graph& g) {
  std::vector<std::uint32_t> masks(g.vertex_count(), 0);
  for (const Edge& e : g.edges()) {
    masks[e.u] |= 1u << e.v;
    masks[e.v] |= 1u << e.u;
  }
  return masks;
}

std::size_t mask_edges(const std::vector<std::uint32_t>& adj, std::uint32_t mask) {
  std::size_t twice = 0;
  for (std::uint32_t rest = mask; rest; rest &= rest - 1) {
    twice += std::popcount(adj[std::countr_zero(rest)] & mask);
  }
  return twice / 2;
}

std::vector<Vertex> mask_vertices(std::uint32_t mask) {
  std::vector<Vertex> out;
  for (std::uint32_t rest = mask; rest; rest &= rest - 1) out.push_back(std::countr_zero(rest));
  return out;
}

void require_small(const Graph& g) {
  if (g.vertex_count() > 20) {
    throw std::invalid_argument("exhaustive search refused for n > 20");
  }
}

// Core numbers by bucket peeling, plus the removal order.
struct Peeling {
  std::vector<std::uint32_t> core;
  std::vector<Vertex> order;
};

Peeling peel(const Graph& g) {
  const std::size_t n = g.vertex_count();
  const Adjacency& adj = g.adjacency();
  Peeling out;
  out.core.assign(n, 0);
  std::vector<std::uint32_t> degree(n);
  std::uint32_t max_degree = 0;
  for (Vertex v = 0; v < n; ++v) {
    degree[v] = static_cast<std::uint32_t>(adj.degree(v));
    max_degree = std::max(max_degree, degree[v]);
  }
  std::vector<std::vector<Vertex>> buckets(max_degree + 1);
  for (auto v = static_cast<Vertex>(n); v-- > 0;) buckets[degree[v]].push_back(v);
  std::vector<char> removed(n, 0);
  std::uint32_t level = 0;
  std::uint32_t k = 0;
  while (out.order.size() < n) {
    while (buckets[level].empty()) ++level;
    const Vertex v = buckets[level].back();
    buckets[level].pop_back();
    if (removed[v] || degree[v] != level) continue;
    removed[v] = 1;
    k = std::max(k, level);
    out.core[v] = k;
    out.order.push_back(v);
    for (Vertex w : adj.of(v)) {
      if (removed[w]) continue;
      --degree[w];
      buckets[degree[w]].push_back(w);
      if (degree[w] < level) level = degree[w];
    }
  }
  return out;
}

// Greedy densification: repeatedly add the outside vertex with the most
// neighbours inside (ties to the smallest id). `visit(size, edges)` sees every
// prefix; returning false stops the expansion.
class Expander {
 public:
  explicit Expander(const Graph& g) : g_(g), gain_(g.vertex_count(), 0), inside_(g.vertex_count()) {}

  template <class Visit>
  void grow(Vertex seed, std::size_t cap, Visit&& visit) {
    const Adjacency& adj = g_.adjacency();
    inside_.next();
    for (Vertex v : touched_) gain_[v] = 0;
    touched_.clear();
    members_.clear();
    std::priority_queue<std::pair<std::uint32_t, std::uint32_t>> heap;  // (gain, ~vertex)
    heap.push({0, ~seed});
    std::size_t edges = 0;
    while (members_.size() < cap && !heap.empty()) {
      const auto [gain, key] = heap.top();
      heap.pop();
      const Vertex v = ~key;
      if (inside_.marked(v) || gain != gain_[v]) continue;
      inside_.mark(v);
      members_.push_back(v);
      edges += gain;
      if (!visit(members_.size(), edges)) return;
      for (Vertex w : adj.of(v)) {
        if (inside_.marked(w)) continue;
        if (gain_[w] == 0) touched_.push_back(w);
        heap.push({++gain_[w], ~w});
      }
    }
  }

  std::vector<Vertex> prefix(std::size_t size) const {
    std::vector<Vertex> s(members_.begin(), members_.begin() + static_cast<std::ptrdiff_t>(size));
    std::sort(s.begin(), s.end());
    return s;
  }

 private:
  const Graph& g_;
  std::vector<std::uint32_t> gain_;
  Marker inside_;
  std::vector<Vertex> touched_;
  std::vector<Vertex> members_;
};

std::vector<Vertex> expansion_seeds(const Graph& g, SearchMode mode, std::size_t count,
                                    std::uint64_t seed, const Peeling* peeling) {
  const std::size_t n = g.vertex_count();
  std::vector<Vertex> all(n);
  std::iota(all.begin(), all.end(), Vertex{0});
  count = std::min(count, n);
  if (mode == SearchMode::kPeel && peeling) {
    std::stable_sort(all.begin(), all.end(),
                     [&](Vertex a, Vertex b) { return peeling->core[a] > peeling->core[b]; });
  } else {
    Rng rng(seed);
    for (std::size_t i = 0; i < count; ++i) {
      std::swap(all[i], all[i + uniform_below(rng, n - i)]);
    }
  }
  all.resize(count);
  return all;
}

}  // namespace

std::size_t induced_edge_count(const Graph& g, std::span<const Vertex> set) {
  Marker mark(g.vertex_count());
  mark.next();
  for (Vertex v : set) {
    if (v >= g.vertex_count()) throw std::invalid_argument("set vertex out of range");
    mark.mark(v);
  }
  const Adjacency& adj = g.adjacency();
  std::size_t count = 0;
  for (Vertex v : set) {
    for (Vertex w : adj.of(v)) count += (w > v && mark.marked(w)) ? 1 : 0;
  }
  return count;
}

DensityResult density_check(const Graph& g, const DensityQuery& q) {
  DensityResult out;
  const std::size_t n = g.vertex_count();
  const std::size_t cap = std::min(q.size_cap, n);
  auto consider = [&](std::size_t size, std::size_t edges, auto&& materialize) {
    ++out.effort;
    const double density = static_cast<double>(edges) / static_cast<double>(size);
    const bool bad = violates(edges, size, q.bound, q.strictness);
    const bool better_witness =
        bad && (out.pass || density > static_cast<double>(out.witness_edges) /
                                          static_cast<double>(out.witness.size()));
    if (better_witness) {
      out.pass = false;
      out.witness = materialize();
      out.witness_edges = edges;
    }
    out.best_density = std::max(out.best_density, density);
  };

  if (q.mode == SearchMode::kExhaustive) {
    require_small(g);
    const auto adj = adjacency_masks(g);
    const std::uint32_t limit = 1u << n;
    for (std::uint32_t mask = 1; mask < limit; ++mask) {
      const auto size = static_cast<std::size_t>(std::popcount(mask));
      if (size > cap) continue;
      consider(size, mask_edges(adj, mask), [&] { return mask_vertices(mask); });
    }
    return out;
  }
  if (cap == 0 || n == 0) return out;

  Peeling peeling;
  if (q.mode == SearchMode::kPeel) {
    // Remaining sets of the min-degree peeling, smallest first.
    peeling = peel(g);
    const Adjacency& adj = g.adjacency();
    std::vector<std::size_t> position(n);
    for (std::size_t i = 0; i < n; ++i) position[peeling.order[i]] = i;
    std::size_t edges = g.edge_count();
    std::vector<std::size_t> edges_left(n + 1, 0);  // indexed by remaining size
    for (std::size_t i = 0; i < n; ++i) {
      edges_left[n - i] = edges;
      const Vertex v = peeling.order[i];
      for (Vertex w : adj.of(v)) edges -= position[w] > i ? 1 : 0;
    }
    for (std::size_t size = 1; size <= cap; ++size) {
      consider(size, edges_left[size], [&] {
        std::vector<Vertex> s(peeling.order.end() - static_cast<std::ptrdiff_t>(size),
                              peeling.order.end());
        std::sort(s.begin(), s.end());
        return s;
      });
    }
  }
  Expander expander(g);
  for (Vertex seed : expansion_seeds(g, q.mode, q.seeds, q.seed, &peeling)) {
    expander.grow(seed, cap, [&](std::size_t size, std::size_t edges) {
      consider(size, edges, [&] { return expander.prefix(size); });
      return true;
    });
  }
  return out;
}

DenseSetScan dense_small_set_scan(const Graph& g, std::size_t size_cap, SearchMode mode,
                                  std::uint64_t seed, std::size_t seeds) {
  DenseSetScan out;
  const std::size_t n = g.vertex_count();
  const std::size_t cap = std::min(size_cap, n);
  if (mode == SearchMode::kExhaustive) {
    require_small(g);
    const auto adj = adjacency_masks(g);
    const std::uint32_t limit = 1u << n;
    for (std::uint32_t mask = 1; mask < limit; ++mask) {
      const auto size = static_cast<std::size_t>(std::popcount(mask));
      if (size > cap) continue;
      ++out.effort;
      if (mask_edges(adj, mask) >= size + 1) out.sets.push_back(mask_vertices(mask));
    }
    return out;
  }
  if (cap < 4) return out;  // e(S) <= C(|S|,2) < |S| + 1 below four vertices
  Peeling peeling;
  if (mode == SearchMode::kPeel) peeling = peel(g);
  std::set<std::vector<Vertex>> found;
  Expander expander(g);
  for (Vertex start : expansion_seeds(g, mode, seeds, seed, &peeling)) {
    expander.grow(start, cap, [&](std::size_t size, std::size_t edges) {
      ++out.effort;
      if (edges >= size + 1) {
        found.insert(expander.prefix(size));
        return false;
      }
      return true;
    });
  }
  out.sets.assign(found.begin(), found.end());
  return out;
}

std::vector<std::size_t> window_sizes(std::size_t n, double sigma0) {
  const double raw = std::ceil(sigma0 * static_cast<double>(n));
  const std::size_t first = raw >= static_cast<double>(n) ? n : std::max<std::size_t>(2, static_cast<std::size_t>(raw));
  std::vector<std::size_t> sizes{first, n / 2, n};
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
  return sizes;
}

WindowResult edge_density_window_check(const Graph& g, std::span<const std::size_t> sizes,
                                       double eps, std::size_t samples, std::uint64_t seed) {
  WindowResult out;
  const std::size_t n = g.vertex_count();
  const double total = static_cast<double>(pair_count(n));
  const double m = static_cast<double>(g.edge_count());
  std::vector<std::size_t> distinct(sizes.begin(), sizes.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  Rng rng(seed);
  std::vector<Vertex> perm(n);
  std::iota(perm.begin(), perm.end(), Vertex{0});
  for (std::size_t k : distinct) {
    if (k < 2 || k > n) continue;
    const double expected = static_cast<double>(pair_count(k)) * m / total;
    const std::size_t rounds = k == n ? 1 : samples;
    for (std::size_t r = 0; r < rounds; ++r) {
      for (std::size_t i = 0; i < k && k < n; ++i) std::swap(perm[i], perm[i + uniform_below(rng, n - i)]);
      const std::span<const Vertex> set(perm.data(), k);
      const std::size_t e = induced_edge_count(g, set);
      ++out.effort;
      const double deviation = expected > 0 ? std::abs(static_cast<double>(e) / expected - 1.0) : 0.0;
      const bool inside = static_cast<double>(e) >= (1.0 - eps) * expected &&
                          static_cast<double>(e) <= (1.0 + eps) * expected;
      out.worst_deviation = std::max(out.worst_deviation, deviation);
      if (!inside && out.pass) {
        out.pass = false;
        out.witness.assign(set.begin(), set.end());
        std::sort(out.witness.begin(), out.witness.end());
        out.witness_edges = e;
        out.expected = expected;
      }
    }
  }
  return out;
}

std::uint64_t short_cycle_count(const Graph& g, std::size_t length, std::size_t max_length) {
  if (length > max_length) {
    throw std::invalid_argument("cycle length " + std::to_string(length) + " exceeds enumeration cap " +
                                std::to_string(max_length));
  }
  if (length < 3) return 0;
  const Adjacency& adj = g.adjacency();
  const std::size_t n = g.vertex_count();
  std::vector<char> on_path(n, 0);
  std::vector<Vertex> path;
  std::uint64_t count = 0;
  // Cycles are counted from their smallest vertex, in the direction whose
  // second vertex is smaller than the last.
  std::function<void(Vertex, Vertex)> walk = [&](Vertex start, Vertex v) {
    for (Vertex w : adj.of(v)) {
      if (w == start) {
        if (path.size() >= 3 && path[1] < path.back()) ++count;
        continue;
      }
      if (w < start || on_path[w] || path.size() >= length) continue;
      on_path[w] = 1;
      path.push_back(w);
      walk(start, w);
      path.pop_back();
      on_path[w] = 0;
    }
  };
  for (Vertex s = 0; s < n; ++s) {
    path.assign(1, s);
    on_path[s] = 1;
    walk(s, s);
    on_path[s] = 0;
  }
  return count;
}

namespace {

// Shortest u-v path avoiding the direct edge, at most `max_edges` edges.
std::vector<Vertex> bounded_cycle(const Graph& g, Edge e, std::size_t max_edges,
                                  std::vector<std::uint32_t>& dist, std::vector<Vertex>& parent,
                                  std::vector<Vertex>& touched) {
  const Adjacency& adj = g.adjacency();
  const auto nbrs = adj.of(e.u);
  if (std::find(nbrs.begin(), nbrs.end(), e.v) == nbrs.end()) return {};
  for (Vertex v : touched) dist[v] = kUnreachable;
  touched.clear();
  std::vector<Vertex> frontier{e.u};
  dist[e.u] = 0;
  touched.push_back(e.u);
  bool reached = false;
  for (std::size_t depth = 0; depth < max_edges && !frontier.empty() && !reached; ++depth) {
    std::vector<Vertex> next;
    for (Vertex v : frontier) {
      for (Vertex w : adj.of(v)) {
        if (v == e.u && w == e.v) continue;
        if (dist[w] != kUnreachable) continue;
        dist[w] = static_cast<std::uint32_t>(depth + 1);
        parent[w] = v;
        touched.push_back(w);
        if (w == e.v) reached = true;
        next.push_back(w);
      }
    }
    frontier = std::move(next);
  }
  if (!reached) return {};
  std::vector<Vertex> cycle;
  for (Vertex v = e.v; v != e.u; v = parent[v]) cycle.push_back(v);
  cycle.push_back(e.u);
  std::reverse(cycle.begin(), cycle.end());
  return cycle;
}

}  // namespace

std::vector<Vertex> shortest_cycle_through(const Graph& g, Edge e) {
  const std::size_t n = g.vertex_count();
  if (e.u >= n || e.v >= n || e.u == e.v) throw std::invalid_argument("edge out of range");
  std::vector<std::uint32_t> dist(n, kUnreachable);
  std::vector<Vertex> parent(n, 0);
  std::vector<Vertex> touched;
  return bounded_cycle(g, Edge::make(e.u, e.v), n, dist, parent, touched);
}

std::size_t cut_size(const Graph& g, std::span<const Vertex> set) {
  Marker mark(g.vertex_count());
  mark.next();
  for (Vertex v : set) {
    if (v >= g.vertex_count()) throw std::invalid_argument("set vertex out of range");
    mark.mark(v);
  }
  const Adjacency& adj = g.adjacency();
  std::size_t cut = 0;
  for (Vertex v : set) {
    for (Vertex w : adj.of(v)) cut += mark.marked(w) ? 0 : 1;
  }
  return cut;
}

namespace {

// BFS order from `start`, continuing from the smallest unvisited vertex when
// a component runs out, truncated to `size` vertices.
std::vector<Vertex> bfs_ball(const Graph& g, Vertex start, std::size_t size) {
  const std::size_t n = g.vertex_count();
  const Adjacency& adj = g.adjacency();
  std::vector<char> seen(n, 0);
  std::vector<Vertex> order;
  order.reserve(size);
  Vertex next_root = 0;
  std::size_t head = 0;
  seen[start] = 1;
  order.push_back(start);
  while (order.size() < size) {
    if (head == order.size()) {
      while (seen[next_root]) ++next_root;
      seen[next_root] = 1;
      order.push_back(next_root);
      continue;
    }
    const Vertex v = order[head++];
    for (Vertex w : adj.of(v)) {
      if (seen[w] || order.size() >= size) continue;
      seen[w] = 1;
      order.push_back(w);
    }
  }
  return order;
}

}  // namespace

CutResult cut_check(const Graph& g, double a, std::size_t trials, std::uint64_t seed) {
  CutResult out;
  const std::size_t n = g.vertex_count();
  const double nd = static_cast<double>(n);
  out.bound = 2.0 * a * nd * std::log(nd);
  const auto lo = static_cast<std::size_t>(std::max(1.0, std::ceil(10.0 * a * nd)));
  const double hi_raw = std::floor(nd - 10.0 * a * nd);
  if (hi_raw < static_cast<double>(lo)) {
    out.vacuous = true;
    return out;
  }
  const auto hi = static_cast<std::size_t>(hi_raw);
  out.min_cut = std::numeric_limits<std::size_t>::max();
  auto consider = [&](std::vector<Vertex> set) {
    ++out.effort;
    const std::size_t c = cut_size(g, set);
    if (c < out.min_cut) {
      out.min_cut = c;
      std::sort(set.begin(), set.end());
      out.witness = std::move(set);
    }
  };
  Rng rng(seed);
  auto random_size = [&] { return lo + uniform_below(rng, hi - lo + 1); };
  std::vector<Vertex> perm(n);
  std::iota(perm.begin(), perm.end(), Vertex{0});
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t k = random_size();
    for (std::size_t i = 0; i < k; ++i) std::swap(perm[i], perm[i + uniform_below(rng, n - i)]);
    consider(std::vector<Vertex>(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(k)));
  }
  const std::size_t balls = std::max<std::size_t>(1, trials / 10);
  for (std::size_t t = 0; t < balls; ++t) {
    const auto start = static_cast<Vertex>(uniform_below(rng, n));
    consider(bfs_ball(g, start, lo));
    consider(bfs_ball(g, start, random_size()));
  }
  std::vector<Vertex> by_degree(n);
  std::iota(by_degree.begin(), by_degree.end(), Vertex{0});
  std::stable_sort(by_degree.begin(), by_degree.end(),
                   [&](Vertex x, Vertex y) { return g.degree(x) < g.degree(y); });
  for (std::size_t t = 0; t < std::min(balls, n); ++t) consider(bfs_ball(g, by_degree[t], lo));
  out.pass = static_cast<double>(out.min_cut) >= out.bound;
  return out;
}

LowDegreeReport low_degree_audit(const Graph& g, std::size_t max_degree) {
  LowDegreeReport out;
  const std::size_t n = g.vertex_count();
  const Adjacency& adj = g.adjacency();
  std::vector<std::uint32_t> dist(n, kUnreachable);
  std::vector<Vertex> source(n, 0);
  std::vector<Vertex> queue;
  for (Vertex v = 0; v < n; ++v) {
    if (adj.degree(v) <= max_degree) {
      out.vertices.push_back(v);
      dist[v] = 0;
      source[v] = v;
      queue.push_back(v);
    }
  }
  out.count = out.vertices.size();
  if (out.count < 2) return out;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const Vertex v = queue[head];
    for (Vertex w : adj.of(v)) {
      if (dist[w] != kUnreachable) continue;
      dist[w] = dist[v] + 1;
      source[w] = source[v];
      queue.push_back(w);
    }
  }
  // The closest pair of sources is joined through some edge between two
  // different BFS cells.
  for (const Edge& e : g.edges()) {
    if (dist[e.u] == kUnreachable || source[e.u] == source[e.v]) continue;
    const std::uint32_t d = dist[e.u] + dist[e.v] + 1;
    const Vertex a = std::min(source[e.u], source[e.v]);
    const Vertex b = std::max(source[e.u], source[e.v]);
    if (d < out.min_distance || (d == out.min_distance && std::pair(a, b) < std::pair(out.first, out.second))) {
      out.min_distance = d;
      out.first = a;
      out.second = b;
    }
  }
  return out;
}

std::vector<std::size_t> low_degree_indices(TupleStream& ts, std::size_t m, std::size_t max_degree) {
  if (ts.s() < 2) throw std::invalid_argument("two-process check needs s >= 2");
  const Graph second = prefix_graph(ts, 1, m);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < m; ++i) {
    const Edge f = ts.edge(1, i);
    if (second.degree(f.u) <= max_degree || second.degree(f.v) <= max_degree) out.push_back(i);
  }
  return out;
}

CrossProcessResult cross_process_audit(const Graph& g, std::span<const Edge> marked, double s1,
                                       std::size_t pair_budget, std::uint64_t seed) {
  CrossProcessResult out;
  if (marked.empty()) return out;
  const double vertex_cap = 2.0 * s1;  // pairs are the largest sets tried
  if (vertex_cap < 3.0) {
    out.vacuous = true;
    return out;
  }
  const auto max_edges = static_cast<std::size_t>(std::floor(vertex_cap)) - 1;
  const std::size_t n = g.vertex_count();
  std::vector<std::uint32_t> dist(n, kUnreachable);
  std::vector<Vertex> parent(n, 0);
  std::vector<Vertex> touched;
  std::vector<std::vector<Vertex>> cycles(marked.size());
  std::vector<std::size_t> with_cycle;
  for (std::size_t i = 0; i < marked.size(); ++i) {
    ++out.effort;
    cycles[i] = bounded_cycle(g, Edge::make(marked[i].u, marked[i].v), max_edges, dist, parent, touched);
    if (cycles[i].empty()) continue;
    with_cycle.push_back(i);
    if (static_cast<double>(cycles[i].size()) <= s1) {
      out.pass = false;
      out.witness_marks = {i};
      out.witness_set = cycles[i];
      std::sort(out.witness_set.begin(), out.witness_set.end());
      return out;
    }
  }
  auto try_pair = [&](std::size_t x, std::size_t y) {
    ++out.effort;
    std::vector<Vertex> a = cycles[x];
    std::vector<Vertex> b = cycles[y];
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::vector<Vertex> both;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(both));
    if (both.size() == a.size() + b.size()) return false;  // no shared vertex
    if (static_cast<double>(both.size()) > 2.0 * s1) return false;
    out.pass = false;
    out.witness_marks = {std::min(x, y), std::max(x, y)};
    out.witness_set = std::move(both);
    return true;
  };
  const std::size_t k = with_cycle.size();
  const std::size_t pairs = k < 2 ? 0 : k * (k - 1) / 2;
  if (pairs <= pair_budget) {
    for (std::size_t x = 0; x < k; ++x) {
      for (std::size_t y = x + 1; y < k; ++y) {
        if (try_pair(with_cycle[x], with_cycle[y])) return out;
      }
    }
  } else {
    Rng rng(seed);
    for (std::size_t t = 0; t < pair_budget; ++t) {
      const std::size_t x = uniform_below(rng, k);
      std::size_t y = uniform_below(rng, k - 1);
      if (y >= x) ++y;
      if (try_pair(with_cycle[x], with_cycle[y])) return out;
    }
  }
  return out;
}

CoverageResult vertex_coverage_sample(const Graph& g, const UniversalParams& params,
                                      std::size_t samples, std::uint64_t seed) {
  CoverageResult out;
  if (params.a_max < params.a1) {
    out.vacuous = true;
    return out;
  }
  const std::size_t n = g.vertex_count();
  const std::size_t m = g.edge_count();
  const double ln = std::log(params.n);
  const double theta = std::clamp(params.theta_of_m(), -params.theta0, params.theta0);
  const Adjacency& adj = g.adjacency();
  Rng rng(seed);
  std::vector<std::size_t> ids(m);
  std::iota(ids.begin(), ids.end(), std::size_t{0});
  Marker touched(n);
  double worst = std::numeric_limits<double>::infinity();
  auto consider = [&](std::vector<std::size_t> edge_set, double a) {
    ++out.effort;
    touched.next();
    std::size_t covered = 0;
    for (std::size_t id : edge_set) {
      for (Vertex v : {g.edges()[id].u, g.edges()[id].v}) {
        if (!touched.marked(v)) {
          touched.mark(v);
          ++covered;
        }
      }
    }
    const double bound = sigma_of_a(a, params.eps, theta) * params.n;
    const double ratio = static_cast<double>(covered) / bound;
    if (ratio < worst) {
      worst = ratio;
      out.min_vertices = covered;
      out.bound = bound;
      out.a = a;
      std::sort(edge_set.begin(), edge_set.end());
      out.witness = std::move(edge_set);
    }
  };
  for (std::size_t t = 0; t < samples; ++t) {
    const double a = params.a1 + (params.a_max - params.a1) * uniform01(rng);
    const auto k = std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(a * params.n * ln)), 1, m);
    for (std::size_t i = 0; i < k; ++i) std::swap(ids[i], ids[i + uniform_below(rng, m - i)]);
    consider(std::vector<std::size_t>(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(k)), a);

    // Compact A: edges induced by a growing BFS ball, in discovery order.
    const auto order = bfs_ball(g, static_cast<Vertex>(uniform_below(rng, n)), n);
    std::vector<std::size_t> rank(n);
    for (std::size_t i = 0; i < n; ++i) rank[order[i]] = i;
    std::vector<std::size_t> compact;
    for (std::size_t i = 0; i < n && compact.size() < k; ++i) {
      const auto nbrs = adj.of(order[i]);
      const auto eids = adj.edges_of(order[i]);
      for (std::size_t x = 0; x < nbrs.size() && compact.size() < k; ++x) {
        if (rank[nbrs[x]] < i) compact.push_back(eids[x]);
      }
    }
    consider(std::move(compact), a);
  }
  out.pass = worst >= 1.0;
  return out;
}

// ---------------------------------------------------------------------------

std::span<const std::string> audit_lemma_ids() {
  static const std::vector<std::string> ids{"a(a)", "a(b)", "aaa", "b(a)", "b(b)", "d",
                                            "e",    "f",    "g(a)", "g(b)", "g(c)"};
  return ids;
}

std::vector<std::size_t> conn_grid(std::size_t n, std::size_t points) {
  if (points == 0) throw std::invalid_argument("grid needs at least one point");
  const auto [lo, hi] = conn_window(static_cast<double>(n));
  std::vector<std::size_t> grid;
  for (std::size_t k = 0; k < points; ++k) {
    grid.push_back(points == 1 ? lo : lo + (k * (hi - lo) + (points - 1) / 2) / (points - 1));
  }
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

namespace {

bool selected(const AuditOptions& options, const std::string& id) {
  return options.lemmas.empty() ||
         std::find(options.lemmas.begin(), options.lemmas.end(), id) != options.lemmas.end();
}

const char* verdict(bool pass) { return pass ? "pass" : "violation"; }

}  // namespace

std::vector<AuditRow> audit_trial(std::size_t n, std::uint64_t seed, const AuditOptions& options) {
  for (const std::string& id : options.lemmas) {
    const auto ids = audit_lemma_ids();
    if (std::find(ids.begin(), ids.end(), id) == ids.end()) {
      throw std::invalid_argument("unknown lemma id " + id);
    }
  }
  if (options.mode == SearchMode::kExhaustive && n > 20) {
    throw std::invalid_argument("exhaustive search refused for n > 20");
  }
  TupleStream ts = TupleStream::generate(n, 2, seed);
  std::vector<AuditRow> rows;
  const std::string heuristic = to_string(options.mode);
  for (std::size_t m : conn_grid(n, options.grid_points)) {
    const UniversalParams params = UniversalParams::compute(n, m);
    const double ln = std::log(params.n);
    const Graph first = prefix_graph(ts, 0, m);
    const bool need_second = selected(options, "g(a)") || selected(options, "g(b)");
    const Graph second = need_second ? prefix_graph(ts, 1, m) : Graph();
    auto add = [&](const std::string& lemma, const std::string& mode, std::uint64_t effort,
                   const std::string& result, const json& witness) {
      rows.push_back({lemma, n, seed, m, mode, effort, result, witness.is_null() ? "{}" : witness.dump()});
    };
    auto sub = [&](std::uint64_t tag) { return mix_seed(mix_seed(seed, m), tag); };
    auto density_row = [&](const std::string& lemma, std::size_t cap, double bound, Strictness strict,
                           std::uint64_t tag) {
      DensityQuery q;
      q.size_cap = cap;
      q.bound = bound;
      q.strictness = strict;
      q.mode = options.mode;
      q.seed = sub(tag);
      q.seeds = options.expansion_seeds;
      const DensityResult r = density_check(first, q);
      json w;
      if (!r.pass) {
        w = {{"kind", "density"}, {"graph", 1}, {"S", r.witness}, {"edges", r.witness_edges},
             {"bound", bound}, {"strict", strict == Strictness::kLessThan}, {"cap", cap}};
      }
      add(lemma, heuristic, r.effort, verdict(r.pass), w);
    };

    if (selected(options, "a(a)")) {
      const auto sizes = window_sizes(n, params.sigma0);
      const WindowResult r = edge_density_window_check(first, sizes, params.eps, options.window_samples, sub(1));
      json w;
      if (!r.pass) {
        w = {{"kind", "window"}, {"graph", 1}, {"S", r.witness}, {"edges", r.witness_edges},
             {"expected", r.expected}, {"eps", params.eps}};
      }
      add("a(a)", "sample", r.effort, verdict(r.pass), w);
    }
    if (selected(options, "a(b)")) {
      density_row("a(b)", static_cast<std::size_t>(params.n0_small), 2.0, Strictness::kAtMost, 2);
    }
    if (selected(options, "aaa")) {
      const CoverageResult r = vertex_coverage_sample(first, params, options.coverage_samples, sub(3));
      json w;
      if (!r.pass) {
        w = {{"kind", "coverage"}, {"graph", 1}, {"A", r.witness}, {"a", r.a}, {"bound", r.bound}};
      }
      add("aaa", "sample-partial", r.effort, r.vacuous ? "vacuous" : verdict(r.pass), w);
    }
    if (selected(options, "b(a)")) {
      const auto cap = static_cast<std::size_t>(std::floor(2.0 * params.s1));
      const SearchMode mode = n <= 20 ? SearchMode::kExhaustive : options.mode;
      const DenseSetScan r = dense_small_set_scan(first, cap, mode, sub(4), options.expansion_seeds);
      json w;
      if (!r.sets.empty()) w = {{"kind", "dense_set"}, {"graph", 1}, {"S", r.sets.front()}, {"cap", cap}};
      add("b(a)", to_string(mode), r.effort, cap < 4 ? "vacuous" : verdict(r.sets.empty()), w);
    }
    if (selected(options, "b(b)")) {
      const auto length = static_cast<std::size_t>(std::ceil(params.s1));
      const std::uint64_t count = short_cycle_count(first, length);
      const double bound = std::sqrt(params.n);
      const bool pass = static_cast<double>(count) <= bound;
      json w;
      if (!pass) w = {{"kind", "cycles"}, {"graph", 1}, {"length", length}, {"count", count}, {"bound", bound}};
      add("b(b)", "exact", count, length < 3 ? "vacuous" : verdict(pass), w);
    }
    if (selected(options, "d")) {
      const CutResult r = cut_check(first, params.a1, options.cut_trials, sub(5));
      json w;
      if (!r.pass) w = {{"kind", "cut"}, {"graph", 1}, {"S", r.witness}, {"bound", r.bound}, {"a", params.a1}};
      add("d", "sample", r.effort, r.vacuous ? "vacuous" : verdict(r.pass), w);
    }
    if (selected(options, "e")) {
      density_row("e", static_cast<std::size_t>(std::floor(12.0 * params.a1 * params.n)), ln / 12.0,
                  Strictness::kLessThan, 6);
    }
    if (selected(options, "f")) {
      density_row("f", static_cast<std::size_t>(std::floor(std::pow(params.n, 0.9))),
                  1.0 + 10.0 * params.theta0, Strictness::kAtMost, 7);
    }
    if (need_second) {
      const LowDegreeReport r = low_degree_audit(second, 10);
      if (selected(options, "g(a)")) {
        const double bound = std::pow(ln, 12.0);
        const bool pass = static_cast<double>(r.count) <= bound;
        json w;
        if (!pass) w = {{"kind", "low_count"}, {"graph", 2}, {"count", r.count}, {"bound", bound}};
        add("g(a)", "exact", r.count, verdict(pass), w);
      }
      if (selected(options, "g(b)")) {
        const bool pass = r.min_distance >= 3;
        json w;
        if (!pass) {
          w = {{"kind", "distance"}, {"graph", 2}, {"pair", json::array({r.first, r.second})}, {"distance", r.min_distance}};
        }
        add("g(b)", "exact", r.count, verdict(pass), w);
      }
    }
    if (selected(options, "g(c)")) {
      const auto indices = low_degree_indices(ts, m, 10);
      std::vector<Edge> marked;
      marked.reserve(indices.size());
      for (std::size_t i : indices) marked.push_back(ts.edge(0, i));
      const CrossProcessResult r = cross_process_audit(first, marked, params.s1, options.pair_budget, sub(8));
      json w;
      if (!r.pass) {
        std::vector<std::size_t> stream_indices;
        for (std::size_t x : r.witness_marks) stream_indices.push_back(indices[x]);
        w = {{"kind", "cross"}, {"graph", 1}, {"I", stream_indices}, {"S", r.witness_set}, {"s1", params.s1}};
      }
      add("g(c)", "sample", r.effort, r.vacuous ? "vacuous" : verdict(r.pass), w);
    }
  }
  return rows;
}

namespace {

// True iff the subgraph induced by `set` is connected and has no bridge.
bool two_edge_connected(const Graph& g, const std::vector<Vertex>& set) {
  if (set.size() < 3) return false;
  std::vector<Edge> edges;
  std::vector<Vertex> local(g.vertex_count(), kUnreachable);
  for (std::size_t i = 0; i < set.size(); ++i) local[set[i]] = static_cast<Vertex>(i);
  for (const Edge& e : g.edges()) {
    if (local[e.u] != kUnreachable && local[e.v] != kUnreachable) edges.push_back(Edge::make(local[e.u], local[e.v]));
  }
  const Graph h(set.size(), edges);
  if (!is_connected(h)) return false;
  for (std::size_t skip = 0; skip < edges.size(); ++skip) {
    DisjointSets ds(set.size());
    for (std::size_t i = 0; i < edges.size(); ++i) {
      if (i != skip) ds.unite(edges[i]);
    }
    if (ds.component_count() > 1) return false;
  }
  return true;
}

}  // namespace

bool replay_witness(const AuditRow& row) {
  if (row.result != "violation") return false;
  const json w = json::parse(row.witness_json);
  TupleStream ts = TupleStream::generate(row.n, 2, row.seed);
  const int which = w.at("graph").get<int>();
  const Graph g = prefix_graph(ts, static_cast<std::size_t>(which - 1), row.m);
  const std::string kind = w.at("kind").get<std::string>();
  if (kind == "density") {
    const auto set = w.at("S").get<std::vector<Vertex>>();
    if (set.empty() || set.size() > w.at("cap").get<std::size_t>()) return false;
    const Strictness s = w.at("strict").get<bool>() ? Strictness::kLessThan : Strictness::kAtMost;
    return violates(induced_edge_count(g, set), set.size(), w.at("bound").get<double>(), s);
  }
  if (kind == "window") {
    const auto set = w.at("S").get<std::vector<Vertex>>();
    const double e = static_cast<double>(induced_edge_count(g, set));
    const double expected = static_cast<double>(pair_count(set.size())) * static_cast<double>(row.m) /
                            static_cast<double>(pair_count(row.n));
    const double eps = w.at("eps").get<double>();
    return e < (1.0 - eps) * expected || e > (1.0 + eps) * expected;
  }
  if (kind == "coverage") {
    std::set<Vertex> covered;
    for (std::size_t id : w.at("A").get<std::vector<std::size_t>>()) {
      covered.insert(g.edges()[id].u);
      covered.insert(g.edges()[id].v);
    }
    return static_cast<double>(covered.size()) < w.at("bound").get<double>();
  }
  if (kind == "dense_set") {
    const auto set = w.at("S").get<std::vector<Vertex>>();
    return set.size() <= w.at("cap").get<std::size_t>() && induced_edge_count(g, set) >= set.size() + 1;
  }
  if (kind == "cycles") {
    const auto count = short_cycle_count(g, w.at("length").get<std::size_t>());
    return static_cast<double>(count) > w.at("bound").get<double>();
  }
  if (kind == "cut") {
    const auto set = w.at("S").get<std::vector<Vertex>>();
    const double a = w.at("a").get<double>();
    const double nd = static_cast<double>(row.n);
    const bool in_window = static_cast<double>(set.size()) >= 10.0 * a * nd &&
                           static_cast<double>(set.size()) <= nd - 10.0 * a * nd;
    return in_window && static_cast<double>(cut_size(g, set)) < w.at("bound").get<double>();
  }
  if (kind == "low_count") {
    return static_cast<double>(low_degree_audit(g, 10).count) > w.at("bound").get<double>();
  }
  if (kind == "distance") {
    const auto pair = w.at("pair").get<std::vector<Vertex>>();
    if (pair.size() != 2 || g.degree(pair[0]) > 10 || g.degree(pair[1]) > 10) return false;
    const auto d = bfs_distances(g, pair[0])[pair[1]];
    return d == w.at("distance").get<std::uint32_t>() && d < 3;
  }
  if (kind == "cross") {
    const auto indices = w.at("I").get<std::vector<std::size_t>>();
    const auto set = w.at("S").get<std::vector<Vertex>>();
    const auto low = low_degree_indices(ts, row.m, 10);
    std::set<Vertex> members(set.begin(), set.end());
    for (std::size_t i : indices) {
      if (!std::binary_search(low.begin(), low.end(), i)) return false;
      const Edge e = ts.edge(0, i);
      if (!members.count(e.u) || !members.count(e.v)) return false;
    }
    return static_cast<double>(set.size()) <= w.at("s1").get<double>() * static_cast<double>(indices.size()) &&
           two_edge_connected(g, set);
  }
  return false;
}

}  // namespace mtlab
