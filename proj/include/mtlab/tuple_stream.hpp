#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mtlab/graph.hpp"
#include "mtlab/rng.hpp"

namespace mtlab {

using EdgeId = std::uint64_t;

/// N = n(n-1)/2.
constexpr std::uint64_t pair_count(std::uint64_t n) { return n < 2 ? 0 : n * (n - 1) / 2; }

/// Lexicographic rank of canonical edges of K_n: (0,1)=0, (0,2)=1, ..., (n-2,n-1)=N-1.
class EdgeIndexer {
 public:
  explicit EdgeIndexer(std::size_t n);
  std::size_t vertex_count() const { return n_; }
  EdgeId rank(Edge e) const;
  Edge unrank(EdgeId id) const;

 private:
  std::size_t n_;
  std::vector<std::uint64_t> offsets_;  // offsets_[u] = #edges with first endpoint < u
};

/// s independent uniform permutations of E(K_n). Row j is a forward
/// Fisher-Yates shuffle of the ranked edge list driven by mt19937_64 seeded
/// with mix_seed(master, j); rows are produced lazily on demand, so long
/// streams at large n only cost what is read.
class TupleStream {
 public:
  /// Throws std::invalid_argument when n < 2 or s < 1.
  static TupleStream generate(std::size_t n, std::size_t s, std::uint64_t seed);
  /// Explicit rows; each must be a permutation of E(K_n).
  static TupleStream from_rows(std::size_t n, std::vector<std::vector<Edge>> rows,
                               std::uint64_t seed = 0);

  std::size_t n() const { return indexer_.vertex_count(); }
  std::size_t s() const { return rows_.size(); }
  std::uint64_t total() const { return total_; }
  std::uint64_t seed() const { return seed_; }
  const EdgeIndexer& indexer() const { return indexer_; }

  /// e_{i,j}, 0-based in both i and j. Extends the row if needed.
  const Edge& edge(std::size_t j, std::size_t i);
  /// First m edges of row j.
  std::span<const Edge> prefix(std::size_t j, std::size_t m);
  /// Makes at least m tuples available in every row.
  void ensure(std::size_t m);
  std::size_t available() const;

  /// Forces the dense or sparse shuffle backing for rows not yet started;
  /// both produce the same sequence.
  void set_sparse_backing(bool sparse);

 private:
  struct Row {
    Rng rng;
    std::vector<EdgeId> dense;
    std::unordered_map<EdgeId, EdgeId> sparse;
    bool use_sparse = false;
    std::vector<Edge> out;
    bool explicit_row = false;
  };

  TupleStream(std::size_t n, std::uint64_t seed) : indexer_(n), total_(pair_count(n)), seed_(seed) {}
  void extend(Row& row, std::size_t m);

  EdgeIndexer indexer_;
  std::uint64_t total_;
  std::uint64_t seed_;
  std::vector<Row> rows_;
};

/// Γ_{j,m}: the first m edges of row j.
Graph prefix_graph(TupleStream& ts, std::size_t j, std::size_t m);

struct HittingTimes {
  std::vector<std::size_t> connect;     // m_j: first m with Γ_{j,m} connected
  std::vector<std::size_t> min_degree;  // d_j: first m with no isolated vertex
  std::size_t max_connect() const;
};

HittingTimes connectivity_hitting_times(TupleStream& ts);

/// I_conn = [floor(n/2 (ln n - ln ln n)), ceil(n/2 (ln n + ln ln n))].
/// Throws std::invalid_argument for n < 3.
std::pair<std::uint64_t, std::uint64_t> conn_window(double n);

/// "n s seed" header, then s lines of N space-separated edge ranks.
void write_stream(std::ostream& os, TupleStream& ts);
TupleStream read_stream(std::istream& is);

}  // namespace mtlab
