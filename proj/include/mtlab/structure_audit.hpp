#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mtlab/graph.hpp"
#include "mtlab/tuple_stream.hpp"

namespace mtlab {

/// Parameters shared by the structural statements, natural logarithms
/// throughout. Flags record where the asymptotic ordering fails at this n.
struct UniversalParams {
  double n = 0;
  double m = 0;
  double omega = 0;     // (ln n)^{2/5}
  double eps = 0;       // 1/omega
  double theta0 = 0;    // 5 ln ln n / ln n
  double sigma0 = 0;    // 10 omega^2 ln ln n / ln n
  double a_max = 0;     // m / (2 n ln n)
  double s1 = 0;        // ln n / (10 ln ln n)
  double n0_small = 0;  // n / ln^3 n
  double a1 = 1e-3;
  double a2 = 0;        // 3 n^{-4/25}
  std::vector<std::string> flags;

  /// Throws std::invalid_argument for n < 16.
  static UniversalParams compute(std::size_t n, std::size_t m);
  /// theta implied by m = (1 + theta) n ln n / 2.
  double theta_of_m() const;
};

/// (2a(1+theta)/(1+eps))^{1/2}. Throws for a <= 0 or a nonpositive radicand.
double sigma_of_a(double a, double eps, double theta);

// ---------------------------------------------------------------------------
// Dense small sets.

enum class SearchMode { kExhaustive, kPeel, kSample };
enum class Strictness { kAtMost, kLessThan };  // the bound the lemma asserts

std::string to_string(SearchMode mode);

std::size_t induced_edge_count(const Graph& g, std::span<const Vertex> set);

struct DensityQuery {
  std::size_t size_cap = 0;
  double bound = 2.0;
  Strictness strictness = Strictness::kAtMost;
  SearchMode mode = SearchMode::kPeel;
  std::uint64_t seed = 0;
  std::size_t seeds = 64;  // expansion starts for peel / sample
};

struct DensityResult {
  bool pass = true;
  std::vector<Vertex> witness;  // sorted; empty on pass
  std::size_t witness_edges = 0;
  double best_density = 0;       // densest set seen within the cap
  std::uint64_t effort = 0;      // candidate sets evaluated
};

/// Searches for S, |S| <= size_cap, violating b(S) <= bound (or < bound).
/// Exhaustive mode is a proof and refuses n > 20 with std::invalid_argument;
/// peel and sample are best-effort.
DensityResult density_check(const Graph& g, const DensityQuery& query);

/// Sets with |S| <= size_cap and e(S) >= |S| + 1. Exhaustive mode lists all
/// of them (n <= 20); other modes return what the search met.
struct DenseSetScan {
  std::vector<std::vector<Vertex>> sets;
  std::uint64_t effort = 0;
};
DenseSetScan dense_small_set_scan(const Graph& g, std::size_t size_cap, SearchMode mode,
                                  std::uint64_t seed = 0, std::size_t seeds = 64);

// ---------------------------------------------------------------------------
// Edge density of large sets.

struct WindowResult {
  bool pass = true;
  std::vector<Vertex> witness;
  std::size_t witness_edges = 0;
  double expected = 0;
  std::uint64_t effort = 0;
  double worst_deviation = 0;  // max |e(S)/expected - 1|
};

/// Samples `samples` random S for each size in `sizes` (deduplicated, sizes
/// equal to n evaluated once) and checks e(S) in (1 +- eps) C(|S|,2) p with
/// p = m/N. A set exactly on the boundary passes.
WindowResult edge_density_window_check(const Graph& g, std::span<const std::size_t> sizes,
                                       double eps, std::size_t samples, std::uint64_t seed);

/// ceil(sigma0 n) clamped to [2, n], n/2 and n.
std::vector<std::size_t> window_sizes(std::size_t n, double sigma0);

// ---------------------------------------------------------------------------
// Short cycles.

inline constexpr std::size_t kMaxCycleLength = 12;

/// Exact number of cycles of length 3..L. Throws std::invalid_argument when
/// L exceeds max_length.
std::uint64_t short_cycle_count(const Graph& g, std::size_t length,
                                std::size_t max_length = kMaxCycleLength);

/// Vertices of the shortest cycle through edge e (empty if e is a bridge or
/// absent); ordered along the cycle.
std::vector<Vertex> shortest_cycle_through(const Graph& g, Edge e);

// ---------------------------------------------------------------------------
// Cuts.

std::size_t cut_size(const Graph& g, std::span<const Vertex> set);

struct CutResult {
  bool pass = true;
  bool vacuous = false;  // size window empty
  std::size_t min_cut = 0;
  std::vector<Vertex> witness;  // set achieving min_cut
  double bound = 0;             // 2 a n ln n
  std::uint64_t effort = 0;
};

/// Minimum of e(S : S̄) over random sets, BFS balls and low-degree-seeded
/// balls with |S| in [10an, n - 10an]; pass iff min >= 2 a n ln n.
CutResult cut_check(const Graph& g, double a, std::size_t trials, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Low-degree vertices.

struct LowDegreeReport {
  std::size_t count = 0;
  std::uint32_t min_distance = kUnreachable;  // kUnreachable when count < 2 or no path
  Vertex first = 0;                           // closest pair when min_distance is finite
  Vertex second = 0;
  std::vector<Vertex> vertices;
};

/// Exact: degree scan plus a multi-source BFS over the low-degree set.
LowDegreeReport low_degree_audit(const Graph& g, std::size_t max_degree = 10);

// ---------------------------------------------------------------------------
// Two-process check.

/// Indices i < m whose second-row edge touches a vertex of degree <= max_degree
/// in the second-row graph on the first m tuples.
std::vector<std::size_t> low_degree_indices(TupleStream& ts, std::size_t m,
                                            std::size_t max_degree = 10);

struct CrossProcessResult {
  bool pass = true;
  bool vacuous = false;  // no cycle can fit in 2 s1 vertices
  std::vector<std::size_t> witness_marks;  // positions into `marked`
  std::vector<Vertex> witness_set;         // 2-edge-connected, contains the marked edges
  std::uint64_t effort = 0;
};

/// Looks for I' ⊆ marked edges lying inside a 2-edge-connected subgraph of g
/// on at most s1 |I'| vertices. Singles use the shortest cycle through the
/// edge; pairs use the union of two such cycles that share a vertex. At most
/// `pair_budget` pairs are tried, drawn with `seed`.
CrossProcessResult cross_process_audit(const Graph& g, std::span<const Edge> marked, double s1,
                                       std::size_t pair_budget, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Vertex coverage of edge sets.

struct CoverageResult {
  bool pass = true;
  bool vacuous = false;  // a_max < a1
  std::size_t min_vertices = 0;  // smallest v(A) seen
  double bound = 0;              // sigma(a) n
  double a = 0;
  std::vector<std::size_t> witness;  // edge ids of A
  std::uint64_t effort = 0;
};

/// Partial check of v(A) >= sigma(a) n for |A| = a n ln n: random A and
/// compact A built from BFS balls, a drawn uniformly from [a1, a_max].
CoverageResult vertex_coverage_sample(const Graph& g, const UniversalParams& params,
                                      std::size_t samples, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Per-trial audit over the connectivity window.

struct AuditRow {
  std::string lemma;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::size_t m = 0;
  std::string mode;
  std::uint64_t effort = 0;
  std::string result;  // pass | violation | vacuous
  std::string witness_json;
};

struct AuditOptions {
  std::size_t grid_points = 11;
  SearchMode mode = SearchMode::kPeel;
  std::size_t window_samples = 1000;
  std::size_t cut_trials = 1000;
  std::size_t coverage_samples = 100;
  std::size_t expansion_seeds = 64;
  std::size_t pair_budget = 2000;
  /// Lemma ids to run; empty runs all of them.
  std::vector<std::string> lemmas;
};

/// Every lemma id the audit knows, in output order.
std::span<const std::string> audit_lemma_ids();

/// m values: `points` evenly spaced over [m_-, m_+] including both ends.
std::vector<std::size_t> conn_grid(std::size_t n, std::size_t points);

/// Builds a two-row stream from `seed`, then runs the selected checks at every
/// grid m. Row 0 plays the first process and row 1 the second.
std::vector<AuditRow> audit_trial(std::size_t n, std::uint64_t seed, const AuditOptions& options);

/// Re-evaluates a violation row against a fresh stream for its (n, seed, m).
/// True iff the recorded witness still violates.
bool replay_witness(const AuditRow& row);

}  // namespace mtlab
