#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "mtlab/graph.hpp"
#include "mtlab/tuple_stream.hpp"

namespace mtlab {

/// X_m: m index positions, each carrying one edge per coordinate graph.
struct IntersectionInstance {
  std::size_t n = 0;
  std::vector<Edge> first;   // e_i
  std::vector<Edge> second;  // f_i

  std::size_t size() const { return first.size(); }
  /// First m tuples of rows 0 and 1.
  static IntersectionInstance from_stream(TupleStream& ts, std::size_t m);
};

/// Maximum common independent set of the two graphic matroids together with
/// the dual set A: |I| = 2n - kappa_first(A) - kappa_second([m] \ A).
struct CommonForestResult {
  std::vector<std::size_t> independent;  // ascending
  std::vector<std::size_t> certificate;  // A, ascending
  std::size_t kappa_first = 0;
  std::size_t kappa_second = 0;
  std::size_t augmentations = 0;

  std::size_t rank() const { return independent.size(); }
};

/// Greedy start in index order, then shortest augmenting paths in the
/// exchange graph (BFS, lowest index first). `warm_start` must be a common
/// independent set of the instance.
CommonForestResult max_common_forest(const IntersectionInstance& inst,
                                     std::span<const std::size_t> warm_start = {});

struct KappaValues {
  std::size_t first = 0;   // components of ([n], {e_i : i in A})
  std::size_t second = 0;  // components of ([n], {f_i : i not in A})
  std::size_t sum() const { return first + second; }
};

/// Throws std::invalid_argument for an index outside [0, m).
KappaValues kappa(const IntersectionInstance& inst, std::span<const std::size_t> subset);

struct MStarResult {
  std::size_t m_star = 0;
  std::size_t lower_bound = 0;  // max(m_1, m_2)
  std::vector<std::size_t> witness;
  std::size_t probes = 0;
};

/// Smallest m whose first m pairs contain a multitree. Probes are solved
/// from scratch: first at max(m_1, m_2), then with doubling steps, then by
/// bisection between the last failing and first succeeding probe.
/// Throws std::invalid_argument if s < 2, std::logic_error if even m = N fails.
MStarResult exact_mstar(TupleStream& ts);

/// Same quantity by a linear scan that grows m one pair at a time and
/// warm-starts from the previous optimum.
MStarResult exact_mstar_linear(TupleStream& ts);

/// "n m" header then m lines "e_u e_v f_u f_v".
void write_instance(std::ostream& os, const IntersectionInstance& inst);
IntersectionInstance read_instance(std::istream& is);

}  // namespace mtlab
