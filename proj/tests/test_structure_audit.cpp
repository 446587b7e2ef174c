#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "mtlab/rng.hpp"
#include "mtlab/structure_audit.hpp"

using namespace mtlab;

namespace {

Graph complete(std::size_t n) {
  std::vector<Edge> edges;
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v) edges.push_back({u, v});
  return Graph(n, edges);
}

Graph random_graph(std::size_t n, double p, Rng& rng) {
  std::vector<Edge> edges;
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v)
      if (uniform01(rng) < p) edges.push_back({u, v});
  return Graph(n, edges);
}

// Cycles as edge subsets: connected, every vertex of degree exactly 2.
std::uint64_t brute_cycles(const Graph& g, std::size_t max_length) {
  const auto edges = g.edges();
  std::uint64_t count = 0;
  for (std::uint32_t mask = 1; mask < (1u << edges.size()); ++mask) {
    const auto k = static_cast<std::size_t>(__builtin_popcount(mask));
    if (k < 3 || k > max_length) continue;
    std::vector<int> deg(g.vertex_count(), 0);
    DisjointSets ds(g.vertex_count());
    for (std::size_t i = 0; i < edges.size(); ++i) {
      if (mask >> i & 1) {
        deg[edges[i].u]++;
        deg[edges[i].v]++;
        ds.unite(edges[i]);
      }
    }
    bool ok = true;
    std::set<Vertex> roots;
    for (Vertex v = 0; v < g.vertex_count(); ++v) {
      if (deg[v] == 0) continue;
      ok = ok && deg[v] == 2;
      roots.insert(ds.find(v));
    }
    count += ok && roots.size() == 1;
  }
  return count;
}

// Densest violation by plain subset enumeration.
bool brute_violation(const Graph& g, std::size_t cap, double bound, Strictness strict) {
  const std::size_t n = g.vertex_count();
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    const auto k = static_cast<std::size_t>(__builtin_popcount(mask));
    if (k > cap) continue;
    std::size_t e = 0;
    for (const Edge& ed : g.edges()) e += (mask >> ed.u & 1) && (mask >> ed.v & 1);
    const double b = static_cast<double>(e) / static_cast<double>(k);
    if (strict == Strictness::kAtMost ? b > bound : b >= bound) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("universal parameters") {
  CHECK_THROWS_AS(UniversalParams::compute(15, 100), std::invalid_argument);
  const UniversalParams p = UniversalParams::compute(10000, 50000);
  const double ln = std::log(1e4);
  CHECK(p.omega == doctest::Approx(std::pow(ln, 0.4)));
  CHECK(p.eps == doctest::Approx(1 / p.omega));
  CHECK(p.theta0 == doctest::Approx(5 * std::log(ln) / ln));
  CHECK(p.s1 == doctest::Approx(ln / (10 * std::log(ln))));
  CHECK(p.a2 == doctest::Approx(3 * std::pow(1e4, -4.0 / 25)));
  CHECK(p.a_max == doctest::Approx(50000 / (2 * 1e4 * ln)));
  // Desk scale breaks the asymptotic ordering; each break is flagged.
  for (const char* f : {"a2_exceeds_a1", "sigma0_exceeds_1", "s1_below_3"}) {
    CHECK(std::find(p.flags.begin(), p.flags.end(), f) != p.flags.end());
  }
  CHECK(p.theta_of_m() == doctest::Approx(2 * 50000 / (1e4 * ln) - 1));
}

TEST_CASE("sigma of a") {
  CHECK(sigma_of_a(0.5, 0, 0) == doctest::Approx(1.0));
  CHECK(sigma_of_a(1e-3, 0.1, 0) == doctest::Approx(0.042640143).epsilon(1e-8));
  CHECK(sigma_of_a(0.2, 0.1, 0) < sigma_of_a(0.3, 0.1, 0));
  CHECK(sigma_of_a(0.2, 0.1, 0) > sigma_of_a(0.2, 0.2, 0));
  CHECK_THROWS_AS(sigma_of_a(0, 0.1, 0), std::invalid_argument);
}

TEST_CASE("density check examples") {
  DensityQuery q;
  q.size_cap = 3;
  q.bound = 2;
  q.mode = SearchMode::kExhaustive;
  const DensityResult tri = density_check(complete(3), q);
  CHECK(tri.pass);
  CHECK(tri.best_density == doctest::Approx(1.0));

  q.size_cap = 5;
  const DensityResult at_most = density_check(complete(5), q);
  CHECK(at_most.pass);
  q.strictness = Strictness::kLessThan;
  const DensityResult strict = density_check(complete(5), q);
  CHECK_FALSE(strict.pass);
  CHECK(strict.witness == std::vector<Vertex>{0, 1, 2, 3, 4});
  CHECK(strict.witness_edges == 10);

  for (SearchMode mode : {SearchMode::kPeel, SearchMode::kSample}) {
    q.mode = mode;
    CHECK_FALSE(density_check(complete(5), q).pass);
  }
  q.mode = SearchMode::kExhaustive;
  CHECK_THROWS_AS(density_check(Graph(21), q), std::invalid_argument);
}

TEST_CASE("exhaustive density agrees with subset enumeration for n <= 10") {
  Rng rng(12);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + uniform_below(rng, 9);
    const Graph g = random_graph(n, 0.2 + 0.6 * uniform01(rng), rng);
    DensityQuery q;
    q.size_cap = 1 + uniform_below(rng, n);
    q.bound = 0.5 + 2.0 * uniform01(rng);
    q.strictness = uniform01(rng) < 0.5 ? Strictness::kAtMost : Strictness::kLessThan;
    q.mode = SearchMode::kExhaustive;
    const DensityResult r = density_check(g, q);
    CHECK(r.pass == !brute_violation(g, q.size_cap, q.bound, q.strictness));
    if (!r.pass) {
      CHECK(r.witness.size() <= q.size_cap);
      CHECK(r.witness_edges == induced_edge_count(g, r.witness));
    }
  }
}

TEST_CASE("heuristic density finds a planted clique") {
  Rng rng(3);
  std::vector<Edge> edges;
  for (Vertex u = 0; u < 200; ++u)
    for (Vertex v = u + 1; v < 200; ++v)
      if (uniform01(rng) < 0.01) edges.push_back({u, v});
  for (Vertex u = 150; u < 156; ++u)
    for (Vertex v = u + 1; v < 156; ++v)
      if (std::find(edges.begin(), edges.end(), Edge{u, v}) == edges.end()) edges.push_back({u, v});
  const Graph g(200, edges);
  DensityQuery q;
  q.size_cap = 10;
  q.bound = 2.0;
  q.strictness = Strictness::kAtMost;
  for (SearchMode mode : {SearchMode::kPeel, SearchMode::kSample}) {
    q.mode = mode;
    q.seeds = 200;
    const DensityResult r = density_check(g, q);
    CHECK_FALSE(r.pass);
    CHECK(r.effort > 0);
  }
}

TEST_CASE("dense small sets") {
  std::vector<Edge> path;
  for (Vertex v = 0; v + 1 < 10; ++v) path.push_back({v, v + 1});
  CHECK(dense_small_set_scan(Graph(10, path), 8, SearchMode::kExhaustive).sets.empty());
  const auto k4 = dense_small_set_scan(complete(4), 4, SearchMode::kExhaustive);
  REQUIRE(!k4.sets.empty());
  CHECK(std::find(k4.sets.begin(), k4.sets.end(), std::vector<Vertex>{0, 1, 2, 3}) != k4.sets.end());
  CHECK_FALSE(dense_small_set_scan(complete(4), 4, SearchMode::kPeel).sets.empty());
}

TEST_CASE("edge density window") {
  const Graph k = complete(30);
  const std::vector<std::size_t> all{30};
  const WindowResult exact = edge_density_window_check(k, all, 0.0, 5, 1);
  CHECK(exact.pass);
  CHECK(exact.worst_deviation == doctest::Approx(0.0));
  Rng rng(8);
  const Graph g = random_graph(60, 0.3, rng);
  const std::vector<std::size_t> sizes{20, 30};
  CHECK_FALSE(edge_density_window_check(g, sizes, 0.0, 50, 2).pass);
  CHECK(edge_density_window_check(g, sizes, 10.0, 50, 2).pass);
  const auto ws = window_sizes(100, 0.3);
  CHECK(ws == std::vector<std::size_t>{30, 50, 100});
  CHECK(window_sizes(100, 14.0) == std::vector<std::size_t>{50, 100});
}

TEST_CASE("short cycles") {
  std::vector<Edge> tree{{0, 1}, {0, 2}, {2, 3}, {2, 4}};
  CHECK(short_cycle_count(Graph(5, tree), 12) == 0);
  CHECK(short_cycle_count(complete(4), 4) == 7);
  CHECK(short_cycle_count(complete(4), 3) == 4);
  CHECK_THROWS_AS(short_cycle_count(complete(4), 13), std::invalid_argument);
  const auto c = shortest_cycle_through(complete(4), {0, 1});
  CHECK(c.size() == 3);
  CHECK(shortest_cycle_through(Graph(5, tree), {0, 1}).empty());
}

TEST_CASE("short cycle count agrees with brute force for n <= 8") {
  Rng rng(21);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t n = 3 + uniform_below(rng, 6);
    Graph g = random_graph(n, 0.45, rng);
    if (g.edge_count() > 16) continue;
    const std::size_t length = 3 + uniform_below(rng, 6);
    CHECK(short_cycle_count(g, length) == brute_cycles(g, length));
  }
}

TEST_CASE("cuts") {
  const Graph k = complete(12);
  for (std::size_t size = 1; size < 12; ++size) {
    std::vector<Vertex> s(size);
    std::iota(s.begin(), s.end(), 0);
    CHECK(cut_size(k, s) == size * (12 - size));
  }
  std::vector<Vertex> everything(12);
  std::iota(everything.begin(), everything.end(), 0);
  CHECK(cut_size(k, everything) == 0);
  Rng rng(4);
  const Graph g = random_graph(200, 0.1, rng);
  const CutResult r = cut_check(g, 0.01, 200, 6);
  CHECK_FALSE(r.vacuous);
  CHECK(r.witness.size() >= 20);
  CHECK(r.witness.size() <= 180);
  CHECK(r.min_cut == cut_size(g, r.witness));
  CHECK(cut_check(g, 0.06, 10, 6).vacuous);
}

TEST_CASE("low degree audit") {
  std::vector<Edge> star;
  for (Vertex v = 1; v < 8; ++v) star.push_back({0, v});
  const LowDegreeReport s = low_degree_audit(Graph(8, star), 1);
  CHECK(s.count == 7);
  CHECK(s.min_distance == 2);
  CHECK(bfs_distances(Graph(8, star), s.first)[s.second] == 2);

  const LowDegreeReport full = low_degree_audit(complete(13), 10);
  CHECK(full.count == 0);
  CHECK(full.min_distance == kUnreachable);

  // Exact pairwise distance agrees with all-pairs BFS.
  Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const Graph g = random_graph(80, 0.05, rng);
    const LowDegreeReport r = low_degree_audit(g, 3);
    std::uint32_t best = kUnreachable;
    for (Vertex a : r.vertices) {
      const auto d = bfs_distances(g, a);
      for (Vertex b : r.vertices)
        if (b != a) best = std::min(best, d[b]);
    }
    CHECK(r.min_distance == best);
  }
}

TEST_CASE("cross-process audit") {
  CHECK(cross_process_audit(complete(5), {}, 4, 10, 1).pass);
  // Planted: cycle 0-1-2-3-0 carries marked edges 01 and 23; the rest is a tree.
  std::vector<Edge> edges{{0, 1}, {1, 2}, {2, 3}, {0, 3}, {3, 4}, {4, 5}, {5, 6}, {6, 7}};
  const Graph g(8, edges);
  const std::vector<Edge> marked{{0, 1}, {2, 3}};
  const CrossProcessResult r = cross_process_audit(g, marked, 4.0, 100, 1);
  CHECK_FALSE(r.pass);
  auto set = r.witness_set;
  std::sort(set.begin(), set.end());
  CHECK(set == std::vector<Vertex>{0, 1, 2, 3});
  // Marked tree edges sit in no cycle.
  const std::vector<Edge> bridges{{4, 5}, {6, 7}};
  CHECK(cross_process_audit(g, bridges, 4.0, 100, 1).pass);
  CHECK(cross_process_audit(g, marked, 1.0, 100, 1).vacuous);
}

TEST_CASE("coverage sampling") {
  Rng rng(10);
  const Graph g = random_graph(300, 0.1, rng);
  const UniversalParams p = UniversalParams::compute(300, g.edge_count());
  const CoverageResult r = vertex_coverage_sample(g, p, 20, 3);
  CHECK_FALSE(r.vacuous);
  CHECK(r.a >= p.a1);
  CHECK(r.effort > 0);
}

TEST_CASE("audit trial rows and witness replay") {
  AuditOptions options;
  options.grid_points = 3;
  options.window_samples = 50;
  options.cut_trials = 50;
  options.coverage_samples = 5;
  const auto rows = audit_trial(400, 77, options);
  CHECK(rows.size() == 3 * audit_lemma_ids().size());
  const auto grid = conn_grid(400, 3);
  CHECK(grid.front() == conn_window(400).first);
  CHECK(grid.back() == conn_window(400).second);
  for (const AuditRow& row : rows) {
    CHECK((row.result == "pass" || row.result == "violation" || row.result == "vacuous"));
    if (row.result == "violation") CHECK(replay_witness(row));
  }
  // Lemma e's strict bound ln n / 12 is below 1 here, so any tree with an edge violates it.
  const auto e_rows = std::count_if(rows.begin(), rows.end(),
                                    [](const AuditRow& r) { return r.lemma == "e" && r.result == "violation"; });
  CHECK(e_rows == 3);
  AuditOptions bad;
  bad.lemmas = {"zz"};
  CHECK_THROWS_AS(audit_trial(400, 1, bad), std::invalid_argument);
}

TEST_CASE("replay rejects a tampered witness") {
  AuditOptions options;
  options.grid_points = 1;
  options.lemmas = {"e"};
  auto rows = audit_trial(300, 5, options);
  REQUIRE(rows.size() == 1);
  REQUIRE(rows[0].result == "violation");
  CHECK(replay_witness(rows[0]));
  AuditRow other = rows[0];
  other.seed += 1;
  other.witness_json = R"({"kind":"density","graph":1,"S":[0,1,2],"edges":3,"bound":0.1,"strict":true,"cap":2})";
  CHECK_FALSE(replay_witness(other));
}
