#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "mtlab/graph.hpp"
#include "mtlab/partite_cover.hpp"
#include "mtlab/tuple_stream.hpp"

namespace mtlab {

/// Parts: 2s parts of floor(n/2s) vertices, coordinate j crosses parts 2j and
/// 2j+1. Bisect: two halves A, B of floor(n/2) vertices crossed by every
/// coordinate.
enum class SchemeMode { kParts, kBisect };

std::string to_string(SchemeMode mode);
SchemeMode scheme_mode_from(const std::string& name);

inline constexpr std::uint32_t kDiscarded = std::numeric_limits<std::uint32_t>::max();

struct PartitionScheme {
  SchemeMode mode = SchemeMode::kParts;
  std::size_t n = 0;
  std::size_t s = 0;
  std::vector<std::vector<Vertex>> parts;  // each sorted
  std::vector<Vertex> discarded;           // sorted
  std::vector<std::uint32_t> part_of;      // kDiscarded outside every part
  std::vector<std::uint32_t> slot_of;      // position inside its part

  std::size_t part_size() const { return parts.empty() ? 0 : parts.front().size(); }
  /// Part indices crossed by coordinate j.
  std::pair<std::size_t, std::size_t> sides(std::size_t j) const;
  /// Tuples in a perfect multimatching of the reduced instance.
  std::size_t target() const { return part_size(); }
};

/// Uniform random equitable partition, deterministic per seed. Parts mode
/// needs n >= 2s, bisect mode n >= 2; otherwise std::invalid_argument.
PartitionScheme partition(std::size_t n, std::size_t s, std::uint64_t seed,
                          SchemeMode mode = SchemeMode::kParts);

/// Tuples whose every coordinate edge crosses its designated part pair, in
/// stream order. Each kept tuple occupies 2s hypergraph slots: for coordinate
/// j the endpoint in side A_j then the one in side B_j.
struct KeptTuples {
  std::vector<std::size_t> indices;
  PartiteHypergraph hypergraph;
  std::size_t examined = 0;  // stream positions scanned
};

/// Scans the stream from position 0 until `max_kept` tuples are kept,
/// `max_examined` positions were scanned, or the stream ends.
KeptTuples filter_cross(TupleStream& ts, const PartitionScheme& scheme,
                        std::size_t max_kept = std::numeric_limits<std::size_t>::max(),
                        std::size_t max_examined = std::numeric_limits<std::size_t>::max());

/// The first `count` kept tuples, as if the scan had stopped there.
KeptTuples first_kept(const KeptTuples& kept, std::size_t count);

/// Exact keep probability of one tuple: prod_j P(e_j crosses its pair).
double keep_probability(const PartitionScheme& scheme);

enum class MatchStatus { kFound, kNotFoundProven, kNotFoundBudget };

std::string to_string(MatchStatus status);

struct MatchOptions {
  std::uint64_t seed = 0;
  std::size_t exact_part_size = 8;  // at or below: unbudgeted backtracking
  std::uint64_t local_steps = 0;    // 0 means 2000 * target * s
  std::uint64_t node_budget = 2'000'000;
};

struct MultiMatching {
  MatchStatus status = MatchStatus::kNotFoundBudget;
  std::vector<std::size_t> indices;                 // stream indices, ascending
  std::vector<std::vector<Edge>> coordinate_edges;  // per coordinate, in index order
  std::uint64_t effort = 0;                         // local moves plus search nodes
  bool exact = false;
};

/// Perfect multimatching among the kept tuples: greedy saturation, then
/// randomized local augmentation, then budgeted backtracking. In the exact
/// regime (part size <= exact_part_size) the backtracking is unbudgeted and
/// a miss is proven.
MultiMatching find_multi_perfect_matching(TupleStream& ts, const PartitionScheme& scheme,
                                          const KeptTuples& kept, const MatchOptions& options = {});

/// Every coordinate's edges pairwise disjoint and |I| == target.
bool verify_multimatching(TupleStream& ts, std::span<const std::size_t> indices, std::size_t target);

/// True iff no chosen edge touches a discarded vertex.
bool avoids_discarded(TupleStream& ts, const PartitionScheme& scheme,
                      std::span<const std::size_t> indices);

/// Lifted size of a perfect multimatching on K_n: floor(n/2).
inline std::size_t lifted_target(std::size_t n) { return n / 2; }

}  // namespace mtlab
