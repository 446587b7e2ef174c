#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mtlab/graph.hpp"
#include "mtlab/tuple_stream.hpp"

namespace mtlab {

// ---------------------------------------------------------------------------
// Giant component fraction of the random graph with average degree c.

/// Positive root of g = 1 - exp(-c g); 0 for c <= 1.
double giant_fraction(double c);
/// c0 with giant_fraction(c0) = 1/2 (equals 2 ln 2).
double solve_c0();

// ---------------------------------------------------------------------------
// Phase 1: greedy multiforest.

/// I_t together with the s forests F_{t,j} it induces.
struct MultiForestState {
  std::size_t n = 0;
  std::vector<std::size_t> chosen;    // I_t, increasing stream indices
  std::size_t next_index = 0;         // k_t + 1: first index not yet examined
  std::vector<DisjointSets> forests;  // F_{t,j}

  MultiForestState() = default;
  MultiForestState(std::size_t n, std::size_t s);

  std::size_t steps() const { return chosen.size(); }
  std::size_t examined() const { return next_index; }
  std::size_t giant(std::size_t j) const { return forests[j].largest(); }
  std::size_t min_giant() const;
};

/// True iff I_t + {k} is still a multiforest.
bool is_addable(MultiForestState& state, TupleStream& ts, std::size_t k);

enum class StopKind { kGiantHalf, kFixedSteps, kExhaust };

struct StopRule {
  StopKind kind = StopKind::kGiantHalf;
  std::size_t steps = 0;  // kFixedSteps only

  static StopRule giant_half() { return {StopKind::kGiantHalf, 0}; }
  static StopRule fixed_steps(std::size_t m0) { return {StopKind::kFixedSteps, m0}; }
  static StopRule exhaust() { return {StopKind::kExhaust, 0}; }
};

enum class Phase1Status { kStopped, kExhaustedBeforeStop };

struct Phase1Result {
  MultiForestState state;
  Phase1Status status = Phase1Status::kStopped;
};

/// Examines the next tuples in order and accepts the first addable one.
/// Returns false if the stream ends first.
bool phase1_step(MultiForestState& state, TupleStream& ts);

/// Greedy growth until the stop rule holds. GiantHalf waits for every
/// forest's largest tree to reach ceil(n/2); Exhaust runs to t = n-1 or the
/// end of the stream. An optional trace receives one PHASE1 line per step.
Phase1Result phase1(TupleStream& ts, StopRule stop, std::ostream* trace = nullptr);
Phase1Result phase1(TupleStream& ts, StopRule stop, MultiForestState start,
                    std::ostream* trace = nullptr);

// ---------------------------------------------------------------------------
// Small tree labelling of the Phase 1 forests.

inline constexpr std::int32_t kGiantLabel = -1;

struct ForestLabels {
  std::size_t giant_size = 0;
  std::vector<std::int32_t> label;      // per vertex: kGiantLabel or small tree index
  std::vector<std::size_t> tree_sizes;  // t_{i,j}
};

struct SmallTreeLabeling {
  std::size_t small_count = 0;  // n0
  std::vector<ForestLabels> forests;
};

class GiantTie : public std::runtime_error {
 public:
  explicit GiantTie(std::size_t forest)
      : std::runtime_error("two largest components tie in forest " + std::to_string(forest)),
        forest_(forest) {}
  std::size_t forest() const { return forest_; }

 private:
  std::size_t forest_;
};

/// Splits every forest into its giant tree T_j and small trees numbered by
/// smallest vertex. Throws GiantTie if the largest component is not unique.
SmallTreeLabeling label_small_trees(MultiForestState& state);

// ---------------------------------------------------------------------------
// Phase 2: acceptable tuples and MultiTree inducing matchings.

struct AcceptableTuple {
  std::size_t index = 0;
  std::vector<std::uint32_t> labels;  // l_j(u)
  std::vector<Vertex> outside;        // x_{u,j}, outside T_j
  std::vector<Vertex> inside;         // y_{u,j}, inside T_j
};

struct Phase2Batch {
  std::vector<AcceptableTuple> tuples;
  std::size_t next_index = 0;
  std::size_t examined = 0;
  bool exhausted = false;
};

/// Scans from from_index and keeps tuples whose every coordinate edge has
/// exactly one endpoint in the giant tree, until `budget` are kept.
Phase2Batch phase2_collect(TupleStream& ts, const SmallTreeLabeling& labeling,
                           std::size_t from_index, std::size_t budget);

using LabelTuple = std::vector<std::uint32_t>;

enum class InducingStatus { kFound, kNotFoundProven, kNotFoundBudget };

struct InducingResult {
  InducingStatus status = InducingStatus::kNotFoundProven;
  std::vector<std::size_t> selected;  // positions in the input, ascending
  /// s <= 2 infeasibility certificate: side-0 labels whose side-1
  /// neighbourhood is smaller than the set (Hall violation).
  std::vector<std::uint32_t> hall_set;
  std::uint64_t nodes = 0;
};

/// Picks n0 tuples whose j-th labels are a permutation of [0, n0) for every
/// j. s = 2 is solved exactly by bipartite matching; s >= 3 by local search
/// (local_steps moves, 0 means 1000 * n0 * s) and then MRV backtracking
/// limited to node_budget nodes (0 = unlimited).
InducingResult find_inducing_matching(std::span<const LabelTuple> tuples, std::size_t n0,
                                      std::size_t s, std::uint64_t node_budget = 2'000'000,
                                      std::uint64_t local_steps = 0, std::uint64_t seed = 0);

// ---------------------------------------------------------------------------
// Full construction.

struct MultiTree {
  std::vector<std::size_t> indices;     // |I| = n-1, increasing
  std::vector<std::vector<Edge>> trees; // per coordinate
};

/// Independent check that `indices` spans a tree in every coordinate.
bool verify_multitree(TupleStream& ts, std::span<const std::size_t> indices);

struct BuildOptions {
  std::size_t initial_budget = 0;  // 0: 4 * n0 + 16 acceptable tuples
  std::uint64_t node_budget = 2'000'000;
  std::ostream* trace = nullptr;
};

struct BuildResult {
  bool success = false;
  MultiTree tree;
  std::size_t m_used = 0;        // stream prefix length touched
  std::size_t phase1_steps = 0;
  std::size_t phase1_examined = 0;
  std::size_t small_count = 0;   // n0
  std::size_t acceptable = 0;
  std::size_t phase2_examined = 0;
  std::string diagnostics;
};

BuildResult build_multitree(TupleStream& ts, const BuildOptions& options = {});

}  // namespace mtlab
