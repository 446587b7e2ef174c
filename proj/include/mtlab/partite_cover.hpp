#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace mtlab {

/// Perfect matching search in a k-partite k-uniform hypergraph whose parts
/// all have `part_size` vertices. Edge e occupies vertex slots[e*k + p] of
/// part p. A solution picks part_size edges covering every vertex once.
struct PartiteHypergraph {
  std::size_t parts = 0;
  std::size_t part_size = 0;
  std::vector<std::uint32_t> slots;  // edge-major, `parts` entries per edge

  std::size_t edge_count() const { return parts == 0 ? 0 : slots.size() / parts; }
  std::span<const std::uint32_t> edge(std::size_t e) const {
    return {slots.data() + e * parts, parts};
  }
};

enum class CoverStatus { kFound, kInfeasible, kBudgetExhausted };

struct CoverResult {
  CoverStatus status = CoverStatus::kInfeasible;
  std::vector<std::size_t> chosen;  // edge indices, ascending
  std::uint64_t nodes = 0;
};

/// Exact backtracking: branch on the uncovered vertex with the fewest live
/// edges, lowest edge index first. node_budget == 0 means unlimited.
CoverResult exact_partite_cover(const PartiteHypergraph& h, std::uint64_t node_budget = 0);

struct LocalSearchOptions {
  std::uint64_t steps = 0;
  std::uint64_t seed = 0;
  double temperature = 0.35;       // Metropolis acceptance of a finished move
  double walk_temperature = 0.3;   // heat-bath choice along the walk
};

/// Randomized local search for at most `steps` moves. Parts 0 and 1 are kept
/// perfectly matched by alternating-path moves while collisions in the other
/// parts are annealed away. kInfeasible means a vertex lies in no edge or
/// parts 0 and 1 admit no perfect matching; nodes counts the moves made.
CoverResult local_partite_cover(const PartiteHypergraph& h, const LocalSearchOptions& options);

/// True iff `chosen` is a perfect matching of h.
bool is_partite_cover(const PartiteHypergraph& h, std::span<const std::size_t> chosen);

}  // namespace mtlab
