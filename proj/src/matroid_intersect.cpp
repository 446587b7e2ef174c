#include "mtlab/matroid_intersect.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <ostream>
#include <queue>
#include <stdexcept>

namespace mtlab {

IntersectionInstance IntersectionInstance::from_stream(TupleStream& ts, std::size_t m) {
  if (ts.s() < 2) throw std::invalid_argument("intersection instance needs two rows");
  if (m > ts.total()) throw std::invalid_argument("prefix longer than N");
  IntersectionInstance inst;
  inst.n = ts.n();
  const auto a = ts.prefix(0, m);
  const auto b = ts.prefix(1, m);
  inst.first.assign(a.begin(), a.end());
  inst.second.assign(b.begin(), b.end());
  return inst;
}

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

// A forest given by element ids, rooted per component for path queries.
class RootedForest {
 public:
  RootedForest(std::size_t n, std::span<const Edge> edges, std::span<const std::size_t> members)
      : parent_(n, kNoVertex), parent_elem_(n, kNone), depth_(n, 0), comp_(n, kNoVertex) {
    std::vector<std::vector<std::pair<Vertex, std::size_t>>> adj(n);
    for (std::size_t x : members) {
      const Edge& e = edges[x];
      adj[e.u].push_back({e.v, x});
      adj[e.v].push_back({e.u, x});
    }
    std::vector<Vertex> stack;
    for (Vertex r = 0; r < n; ++r) {
      if (comp_[r] != kNoVertex) continue;
      comp_[r] = r;
      stack.push_back(r);
      while (!stack.empty()) {
        const Vertex v = stack.back();
        stack.pop_back();
        for (const auto& [w, x] : adj[v]) {
          if (comp_[w] != kNoVertex) continue;
          comp_[w] = r;
          parent_[w] = v;
          parent_elem_[w] = x;
          depth_[w] = depth_[v] + 1;
          stack.push_back(w);
        }
      }
    }
  }

  bool joined(Edge e) const { return comp_[e.u] == comp_[e.v]; }

  // Elements on the tree path between the endpoints of e (must be joined).
  void path(Edge e, std::vector<std::size_t>& out) const {
    out.clear();
    Vertex a = e.u;
    Vertex b = e.v;
    while (depth_[a] > depth_[b]) {
      out.push_back(parent_elem_[a]);
      a = parent_[a];
    }
    while (depth_[b] > depth_[a]) {
      out.push_back(parent_elem_[b]);
      b = parent_[b];
    }
    while (a != b) {
      out.push_back(parent_elem_[a]);
      out.push_back(parent_elem_[b]);
      a = parent_[a];
      b = parent_[b];
    }
  }

 private:
  static constexpr Vertex kNoVertex = std::numeric_limits<Vertex>::max();
  std::vector<Vertex> parent_;
  std::vector<std::size_t> parent_elem_;
  std::vector<std::uint32_t> depth_;
  std::vector<Vertex> comp_;
};

std::size_t components_of(std::size_t n, const std::vector<Edge>& edges,
                          const std::vector<char>& pick, char want) {
  DisjointSets ds(n);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (pick[i] == want) ds.unite(edges[i]);
  }
  return ds.component_count();
}

}  // namespace

CommonForestResult max_common_forest(const IntersectionInstance& inst,
                                     std::span<const std::size_t> warm_start) {
  const std::size_t n = inst.n;
  const std::size_t m = inst.size();
  if (inst.second.size() != m) throw std::invalid_argument("instance coordinates differ in length");
  for (std::size_t i = 0; i < m; ++i) {
    for (const Edge& e : {inst.first[i], inst.second[i]}) {
      if (e.u >= n || e.v >= n || e.u == e.v) throw std::invalid_argument("instance edge invalid");
    }
  }

  std::vector<char> in_set(m, 0);
  DisjointSets ds1(n);
  DisjointSets ds2(n);
  for (std::size_t x : warm_start) {
    if (x >= m || in_set[x]) throw std::invalid_argument("warm start index invalid");
    if (!ds1.unite(inst.first[x]) || !ds2.unite(inst.second[x])) {
      throw std::invalid_argument("warm start is not a common forest");
    }
    in_set[x] = 1;
  }
  for (std::size_t x = 0; x < m; ++x) {
    if (in_set[x]) continue;
    if (!ds1.same(inst.first[x].u, inst.first[x].v) && !ds2.same(inst.second[x].u, inst.second[x].v)) {
      ds1.unite(inst.first[x]);
      ds2.unite(inst.second[x]);
      in_set[x] = 1;
    }
  }

  CommonForestResult out;
  std::vector<char> visited(m, 0);
  std::vector<std::size_t> prev(m, kNone);
  std::vector<std::size_t> path;
  for (;;) {
    std::vector<std::size_t> members;
    for (std::size_t x = 0; x < m; ++x) {
      if (in_set[x]) members.push_back(x);
    }
    if (members.size() + 1 >= n) break;  // spanning in both; nothing can be added
    const RootedForest f1(n, inst.first, members);
    const RootedForest f2(n, inst.second, members);

    // Arcs y -> x (y in I, x outside) exist when y lies on the first-forest
    // cycle of x; arcs x -> y when y lies on the second-forest cycle of x.
    std::vector<std::vector<std::size_t>> into(m);
    std::vector<char> source(m, 0);
    std::vector<char> sink(m, 0);
    for (std::size_t x = 0; x < m; ++x) {
      if (in_set[x]) continue;
      source[x] = !f1.joined(inst.first[x]);
      sink[x] = !f2.joined(inst.second[x]);
      if (!source[x]) {
        f1.path(inst.first[x], path);
        for (std::size_t y : path) into[y].push_back(x);
      }
    }

    std::fill(visited.begin(), visited.end(), 0);
    std::fill(prev.begin(), prev.end(), kNone);
    std::queue<std::size_t> queue;
    for (std::size_t x = 0; x < m; ++x) {
      if (source[x]) {
        visited[x] = 1;
        queue.push(x);
      }
    }
    std::size_t end = kNone;
    while (!queue.empty() && end == kNone) {
      const std::size_t z = queue.front();
      queue.pop();
      if (!in_set[z]) {
        if (sink[z]) {
          end = z;
          break;
        }
        f2.path(inst.second[z], path);
        std::sort(path.begin(), path.end());
        for (std::size_t y : path) {
          if (!visited[y]) {
            visited[y] = 1;
            prev[y] = z;
            queue.push(y);
          }
        }
      } else {
        for (std::size_t x : into[z]) {
          if (!visited[x]) {
            visited[x] = 1;
            prev[x] = z;
            queue.push(x);
          }
        }
      }
    }
    if (end == kNone) break;
    for (std::size_t z = end; z != kNone; z = prev[z]) in_set[z] ^= 1;
    ++out.augmentations;
  }

  // Dual: A is the complement of the set reachable in the last (failed)
  // search. A spanning common tree is certified by A = [m] instead.
  for (std::size_t x = 0; x < m; ++x) {
    if (in_set[x]) out.independent.push_back(x);
  }
  std::vector<char> in_a(m, 1);
  if (out.independent.size() + 1 < n) {
    for (std::size_t x = 0; x < m; ++x) in_a[x] = visited[x] ? 0 : 1;
  }
  for (std::size_t x = 0; x < m; ++x) {
    if (in_a[x]) out.certificate.push_back(x);
  }
  out.kappa_first = components_of(n, inst.first, in_a, 1);
  out.kappa_second = components_of(n, inst.second, in_a, 0);
  if (out.independent.size() + out.kappa_first + out.kappa_second != 2 * n) {
    throw std::logic_error("matroid intersection dual certificate mismatch");
  }
  return out;
}

KappaValues kappa(const IntersectionInstance& inst, std::span<const std::size_t> subset) {
  std::vector<char> in_a(inst.size(), 0);
  for (std::size_t x : subset) {
    if (x >= inst.size()) throw std::invalid_argument("kappa subset index out of range");
    in_a[x] = 1;
  }
  return {components_of(inst.n, inst.first, in_a, 1), components_of(inst.n, inst.second, in_a, 0)};
}

namespace {

std::size_t mstar_lower_bound(TupleStream& ts) {
  if (ts.s() < 2) throw std::invalid_argument("exact m* needs s >= 2");
  std::size_t lower = 0;
  for (std::size_t j = 0; j < 2; ++j) {
    DisjointSets ds(ts.n());
    std::size_t m = 0;
    while (ds.component_count() > 1) ds.unite(ts.edge(j, m++));
    lower = std::max(lower, m);
  }
  return lower;
}

}  // namespace

MStarResult exact_mstar(TupleStream& ts) {
  MStarResult out;
  out.lower_bound = mstar_lower_bound(ts);
  const std::size_t target = ts.n() - 1;
  const std::size_t total = ts.total();
  auto probe = [&](std::size_t m) {
    ++out.probes;
    return max_common_forest(IntersectionInstance::from_stream(ts, m));
  };

  CommonForestResult r = probe(out.lower_bound);
  if (r.rank() == target) {
    out.m_star = out.lower_bound;
    out.witness = r.independent;
    return out;
  }
  std::size_t fail = out.lower_bound;
  std::size_t good = 0;
  for (std::size_t step = 1;; step *= 2) {
    if (fail == total) throw std::logic_error("no multitree even in the full stream");
    const std::size_t cand = std::min<std::size_t>(total, fail + step);
    r = probe(cand);
    if (r.rank() == target) {
      good = cand;
      out.witness = r.independent;
      break;
    }
    fail = cand;
  }
  while (good - fail > 1) {
    const std::size_t mid = fail + (good - fail) / 2;
    r = probe(mid);
    if (r.rank() == target) {
      good = mid;
      out.witness = r.independent;
    } else {
      fail = mid;
    }
  }
  out.m_star = good;
  return out;
}

MStarResult exact_mstar_linear(TupleStream& ts) {
  MStarResult out;
  out.lower_bound = mstar_lower_bound(ts);
  const std::size_t target = ts.n() - 1;
  std::size_t m = out.lower_bound;
  CommonForestResult r = max_common_forest(IntersectionInstance::from_stream(ts, m));
  ++out.probes;
  while (r.rank() < target) {
    if (m == ts.total()) throw std::logic_error("no multitree even in the full stream");
    ++m;
    r = max_common_forest(IntersectionInstance::from_stream(ts, m), r.independent);
    ++out.probes;
  }
  out.m_star = m;
  out.witness = r.independent;
  return out;
}

void write_instance(std::ostream& os, const IntersectionInstance& inst) {
  os << inst.n << ' ' << inst.size() << '\n';
  for (std::size_t i = 0; i < inst.size(); ++i) {
    os << inst.first[i].u << ' ' << inst.first[i].v << ' ' << inst.second[i].u << ' '
       << inst.second[i].v << '\n';
  }
}

IntersectionInstance read_instance(std::istream& is) {
  IntersectionInstance inst;
  std::size_t m = 0;
  if (!(is >> inst.n >> m)) throw std::invalid_argument("bad instance header");
  for (std::size_t i = 0; i < m; ++i) {
    Vertex a = 0, b = 0, c = 0, d = 0;
    if (!(is >> a >> b >> c >> d)) throw std::invalid_argument("truncated instance");
    if (a >= inst.n || b >= inst.n || c >= inst.n || d >= inst.n) {
      throw std::invalid_argument("instance vertex out of range");
    }
    inst.first.push_back(Edge::make(a, b));
    inst.second.push_back(Edge::make(c, d));
  }
  return inst;
}

}  // namespace mtlab
