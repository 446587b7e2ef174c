#include "mtlab/multimatching.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "mtlab/rng.hpp"

namespace mtlab {

std::string to_string(SchemeMode mode) { return mode == SchemeMode::kParts ? "parts" : "bisect"; }

SchemeMode scheme_mode_from(const std::string& name) {
  if (name == "parts") return SchemeMode::kParts;
  if (name == "bisect") return SchemeMode::kBisect;
  throw std::invalid_argument("unknown scheme mode '" + name + "'");
}

std::string to_string(MatchStatus status) {
  switch (status) {
    case MatchStatus::kFound: return "found";
    case MatchStatus::kNotFoundProven: return "not_found_proven";
    case MatchStatus::kNotFoundBudget: return "not_found_budget";
  }
  return "?";
}

std::pair<std::size_t, std::size_t> PartitionScheme::sides(std::size_t j) const {
  if (j >= s) throw std::invalid_argument("coordinate out of range");
  return mode == SchemeMode::kParts ? std::pair{2 * j, 2 * j + 1} : std::pair<std::size_t, std::size_t>{0, 1};
}

PartitionScheme partition(std::size_t n, std::size_t s, std::uint64_t seed, SchemeMode mode) {
  if (s == 0) throw std::invalid_argument("partition needs s >= 1");
  const std::size_t count = mode == SchemeMode::kParts ? 2 * s : 2;
  if (n < count) {
    throw std::invalid_argument("partition needs n >= " + std::to_string(count) + ", got " + std::to_string(n));
  }
  PartitionScheme scheme;
  scheme.mode = mode;
  scheme.n = n;
  scheme.s = s;
  std::vector<Vertex> perm(n);
  std::iota(perm.begin(), perm.end(), Vertex{0});
  Rng rng(seed);
  shuffle(std::span<Vertex>(perm), rng);
  const std::size_t q = n / count;
  scheme.part_of.assign(n, kDiscarded);
  scheme.slot_of.assign(n, kDiscarded);
  for (std::size_t p = 0; p < count; ++p) {
    std::vector<Vertex> part(perm.begin() + static_cast<std::ptrdiff_t>(p * q),
                             perm.begin() + static_cast<std::ptrdiff_t>((p + 1) * q));
    std::sort(part.begin(), part.end());
    for (std::size_t x = 0; x < part.size(); ++x) {
      scheme.part_of[part[x]] = static_cast<std::uint32_t>(p);
      scheme.slot_of[part[x]] = static_cast<std::uint32_t>(x);
    }
    scheme.parts.push_back(std::move(part));
  }
  scheme.discarded.assign(perm.begin() + static_cast<std::ptrdiff_t>(count * q), perm.end());
  std::sort(scheme.discarded.begin(), scheme.discarded.end());
  return scheme;
}

KeptTuples filter_cross(TupleStream& ts, const PartitionScheme& scheme, std::size_t max_kept,
                        std::size_t max_examined) {
  if (ts.n() != scheme.n || ts.s() != scheme.s) {
    throw std::invalid_argument("scheme does not match the stream's n and s");
  }
  KeptTuples out;
  out.hypergraph.parts = 2 * scheme.s;
  out.hypergraph.part_size = scheme.part_size();
  const std::size_t limit = static_cast<std::size_t>(std::min<std::uint64_t>(ts.total(), max_examined));
  std::vector<std::uint32_t> slots(2 * scheme.s);
  for (std::size_t i = 0; i < limit && out.indices.size() < max_kept; ++i) {
    ++out.examined;
    bool keep = true;
    for (std::size_t j = 0; j < scheme.s && keep; ++j) {
      const Edge& e = ts.edge(j, i);
      const auto [a, b] = scheme.sides(j);
      const std::uint32_t pu = scheme.part_of[e.u];
      const std::uint32_t pv = scheme.part_of[e.v];
      if (pu == a && pv == b) {
        slots[2 * j] = scheme.slot_of[e.u];
        slots[2 * j + 1] = scheme.slot_of[e.v];
      } else if (pu == b && pv == a) {
        slots[2 * j] = scheme.slot_of[e.v];
        slots[2 * j + 1] = scheme.slot_of[e.u];
      } else {
        keep = false;
      }
    }
    if (!keep) continue;
    out.indices.push_back(i);
    out.hypergraph.slots.insert(out.hypergraph.slots.end(), slots.begin(), slots.end());
  }
  return out;
}

KeptTuples first_kept(const KeptTuples& kept, std::size_t count) {
  if (count >= kept.indices.size()) return kept;
  KeptTuples out;
  out.indices.assign(kept.indices.begin(), kept.indices.begin() + static_cast<std::ptrdiff_t>(count));
  out.hypergraph.parts = kept.hypergraph.parts;
  out.hypergraph.part_size = kept.hypergraph.part_size;
  out.hypergraph.slots.assign(kept.hypergraph.slots.begin(),
                              kept.hypergraph.slots.begin() + static_cast<std::ptrdiff_t>(count * kept.hypergraph.parts));
  out.examined = count == 0 ? 0 : out.indices.back() + 1;
  return out;
}

double keep_probability(const PartitionScheme& scheme) {
  const double q = static_cast<double>(scheme.part_size());
  const double per_coordinate = q * q / static_cast<double>(pair_count(scheme.n));
  double p = 1.0;
  for (std::size_t j = 0; j < scheme.s; ++j) p *= per_coordinate;
  return p;
}

MultiMatching find_multi_perfect_matching(TupleStream& ts, const PartitionScheme& scheme,
                                          const KeptTuples& kept, const MatchOptions& options) {
  const PartiteHypergraph& h = kept.hypergraph;
  if (h.parts != 2 * scheme.s || h.part_size != scheme.part_size() ||
      h.edge_count() != kept.indices.size()) {
    throw std::invalid_argument("kept tuples do not match the scheme");
  }
  MultiMatching out;
  out.exact = scheme.part_size() <= options.exact_part_size;
  auto finish = [&](const std::vector<std::size_t>& chosen) {
    if (!is_partite_cover(h, chosen)) throw std::logic_error("multimatching search returned a non-cover");
    out.status = MatchStatus::kFound;
    for (std::size_t e : chosen) out.indices.push_back(kept.indices[e]);
    std::sort(out.indices.begin(), out.indices.end());
    out.coordinate_edges.assign(scheme.s, {});
    for (std::size_t i : out.indices) {
      for (std::size_t j = 0; j < scheme.s; ++j) out.coordinate_edges[j].push_back(ts.edge(j, i));
    }
    return out;
  };
  if (h.part_size == 0) return finish({});

  if (out.exact) {
    const CoverResult r = exact_partite_cover(h, 0);
    out.effort = r.nodes;
    if (r.status == CoverStatus::kFound) return finish(r.chosen);
    out.status = MatchStatus::kNotFoundProven;
    return out;
  }
  LocalSearchOptions search;
  search.steps = options.local_steps ? options.local_steps : 2000ULL * h.part_size * scheme.s;
  search.seed = options.seed;
  const CoverResult local = local_partite_cover(h, search);
  out.effort = local.nodes;
  if (local.status == CoverStatus::kFound) return finish(local.chosen);
  if (local.status == CoverStatus::kInfeasible) {
    // a vertex in no kept tuple, or no perfect matching on the first coordinate
    out.status = MatchStatus::kNotFoundProven;
    return out;
  }
  const CoverResult r = exact_partite_cover(h, options.node_budget);
  out.effort += r.nodes;
  if (r.status == CoverStatus::kFound) return finish(r.chosen);
  out.status = r.status == CoverStatus::kInfeasible ? MatchStatus::kNotFoundProven : MatchStatus::kNotFoundBudget;
  return out;
}

bool verify_multimatching(TupleStream& ts, std::span<const std::size_t> indices, std::size_t target) {
  if (indices.size() != target) return false;
  std::vector<std::size_t> sorted(indices.begin(), indices.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return false;
  if (!sorted.empty() && sorted.back() >= ts.total()) return false;
  std::vector<char> used(ts.n());
  for (std::size_t j = 0; j < ts.s(); ++j) {
    std::fill(used.begin(), used.end(), 0);
    for (std::size_t i : sorted) {
      const Edge& e = ts.edge(j, i);
      if (used[e.u] || used[e.v]) return false;
      used[e.u] = used[e.v] = 1;
    }
  }
  return true;
}

bool avoids_discarded(TupleStream& ts, const PartitionScheme& scheme, std::span<const std::size_t> indices) {
  for (std::size_t i : indices) {
    for (std::size_t j = 0; j < ts.s(); ++j) {
      const Edge& e = ts.edge(j, i);
      if (scheme.part_of[e.u] == kDiscarded || scheme.part_of[e.v] == kDiscarded) return false;
    }
  }
  return true;
}

}  // namespace mtlab
