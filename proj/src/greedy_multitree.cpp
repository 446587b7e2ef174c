#include "mtlab/greedy_multitree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <queue>

#include "mtlab/partite_cover.hpp"

namespace mtlab {

double giant_fraction(double c) {
  if (!(c > 1.0)) return 0.0;
  // Positive root of phi(g) = (1 - e^{-cg})/g - 1, which is decreasing on
  // (0, 1] with phi(0+) = c - 1 > 0 and phi(1) = -e^{-c} < 0.
  auto phi = [c](double g) { return -std::expm1(-c * g) / g - 1.0; };
  double lo = std::numeric_limits<double>::min();
  double hi = 1.0;
  for (int it = 0; it < 2000 && hi - lo > 0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (phi(mid) > 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double solve_c0() {
  double lo = 1.0;
  double hi = 16.0;
  while (hi - lo > 1e-15) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (giant_fraction(mid) < 0.5 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

MultiForestState::MultiForestState(std::size_t n_, std::size_t s) : n(n_) {
  forests.reserve(s);
  for (std::size_t j = 0; j < s; ++j) forests.emplace_back(n_);
}

std::size_t MultiForestState::min_giant() const {
  std::size_t g = n;
  for (const auto& f : forests) g = std::min(g, f.largest());
  return g;
}

bool is_addable(MultiForestState& state, TupleStream& ts, std::size_t k) {
  for (std::size_t j = 0; j < state.forests.size(); ++j) {
    const Edge& e = ts.edge(j, k);
    if (state.forests[j].same(e.u, e.v)) return false;
  }
  return true;
}

bool phase1_step(MultiForestState& state, TupleStream& ts) {
  const std::size_t total = ts.total();
  for (std::size_t k = state.next_index; k < total; ++k) {
    if (!is_addable(state, ts, k)) continue;
    for (std::size_t j = 0; j < state.forests.size(); ++j) state.forests[j].unite(ts.edge(j, k));
    state.chosen.push_back(k);
    state.next_index = k + 1;
    return true;
  }
  state.next_index = total;
  return false;
}

namespace {

bool stop_reached(const MultiForestState& state, StopRule stop) {
  switch (stop.kind) {
    case StopKind::kGiantHalf:
      return state.min_giant() >= (state.n + 1) / 2;
    case StopKind::kFixedSteps:
      return state.steps() >= stop.steps;
    case StopKind::kExhaust:
      return state.steps() + 1 >= state.n;
  }
  return false;
}

void trace_step(std::ostream& os, const MultiForestState& state) {
  os << "PHASE1 t=" << state.steps() << " k=" << state.chosen.back() << " giants=";
  for (std::size_t j = 0; j < state.forests.size(); ++j) {
    if (j) os << ',';
    os << state.giant(j);
  }
  os << '\n';
}

}  // namespace

Phase1Result phase1(TupleStream& ts, StopRule stop, std::ostream* trace) {
  return phase1(ts, stop, MultiForestState(ts.n(), ts.s()), trace);
}

Phase1Result phase1(TupleStream& ts, StopRule stop, MultiForestState start, std::ostream* trace) {
  Phase1Result out{std::move(start), Phase1Status::kStopped};
  if (out.state.forests.size() != ts.s() || out.state.n != ts.n()) {
    throw std::invalid_argument("phase 1 state does not match the stream");
  }
  while (!stop_reached(out.state, stop)) {
    if (!phase1_step(out.state, ts)) {
      if (stop.kind != StopKind::kExhaust) out.status = Phase1Status::kExhaustedBeforeStop;
      break;
    }
    if (trace) trace_step(*trace, out.state);
  }
  return out;
}

SmallTreeLabeling label_small_trees(MultiForestState& state) {
  SmallTreeLabeling out;
  const std::size_t n = state.n;
  for (std::size_t j = 0; j < state.forests.size(); ++j) {
    DisjointSets& ds = state.forests[j];
    const std::size_t largest = ds.largest();
    Vertex giant_root = 0;
    std::size_t at_max = 0;
    std::vector<Vertex> roots(n);
    for (Vertex v = 0; v < n; ++v) {
      roots[v] = ds.find(v);
      if (roots[v] == v && ds.size_of(v) == largest) {
        giant_root = v;
        ++at_max;
      }
    }
    if (at_max != 1) throw GiantTie(j);

    ForestLabels labels;
    labels.giant_size = largest;
    labels.label.assign(n, kGiantLabel);
    std::vector<std::int32_t> root_label(n, kGiantLabel);
    for (Vertex v = 0; v < n; ++v) {
      const Vertex r = roots[v];
      if (r == giant_root) continue;
      if (root_label[r] == kGiantLabel) {
        root_label[r] = static_cast<std::int32_t>(labels.tree_sizes.size());
        labels.tree_sizes.push_back(ds.size_of(r));
      }
      labels.label[v] = root_label[r];
    }
    if (j == 0) {
      out.small_count = labels.tree_sizes.size();
    } else if (labels.tree_sizes.size() != out.small_count) {
      throw std::logic_error("forests disagree on component count; not a multiforest");
    }
    out.forests.push_back(std::move(labels));
  }
  return out;
}

Phase2Batch phase2_collect(TupleStream& ts, const SmallTreeLabeling& labeling,
                           std::size_t from_index, std::size_t budget) {
  Phase2Batch out;
  out.next_index = from_index;
  const std::size_t total = ts.total();
  const std::size_t s = labeling.forests.size();
  std::size_t u = from_index;
  while (out.tuples.size() < budget && u < total) {
    AcceptableTuple tuple;
    tuple.index = u;
    bool ok = true;
    for (std::size_t j = 0; j < s && ok; ++j) {
      const Edge& e = ts.edge(j, u);
      const auto& lab = labeling.forests[j].label;
      const bool u_in = lab[e.u] == kGiantLabel;
      const bool v_in = lab[e.v] == kGiantLabel;
      if (u_in == v_in) {
        ok = false;
        break;
      }
      const Vertex x = u_in ? e.v : e.u;
      tuple.outside.push_back(x);
      tuple.inside.push_back(u_in ? e.u : e.v);
      tuple.labels.push_back(static_cast<std::uint32_t>(lab[x]));
    }
    ++u;
    if (ok) out.tuples.push_back(std::move(tuple));
  }
  out.examined = u - from_index;
  out.next_index = u;
  out.exhausted = u >= total && out.tuples.size() < budget;
  return out;
}

namespace {

// Hopcroft-Karp on side-0 labels (left) vs side-1 labels (right).
class LabelMatcher {
 public:
  LabelMatcher(std::size_t n0, std::span<const LabelTuple> tuples)
      : n0_(n0), adj_(n0), match_left_(n0, kNone), match_right_(n0, kNone), dist_(n0) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::size_t> seen;
    for (std::size_t t = 0; t < tuples.size(); ++t) {
      const auto key = std::make_pair(tuples[t][0], tuples[t][1]);
      if (seen.emplace(key, t).second) adj_[key.first].push_back({key.second, t});
    }
  }

  std::size_t run() {
    std::size_t size = 0;
    while (bfs()) {
      for (std::uint32_t u = 0; u < n0_; ++u) {
        if (match_left_[u] == kNone && dfs(u)) ++size;
      }
    }
    return size;
  }

  std::vector<std::size_t> selected() const {
    std::vector<std::size_t> out;
    for (std::uint32_t u = 0; u < n0_; ++u) out.push_back(match_tuple_.at(u));
    std::sort(out.begin(), out.end());
    return out;
  }

  std::vector<std::uint32_t> hall_set() const {
    std::uint32_t root = 0;
    while (root < n0_ && match_left_[root] != kNone) ++root;
    std::vector<char> seen_left(n0_, 0);
    std::vector<char> seen_right(n0_, 0);
    std::queue<std::uint32_t> queue;
    seen_left[root] = 1;
    queue.push(root);
    while (!queue.empty()) {
      const std::uint32_t u = queue.front();
      queue.pop();
      for (const auto& [v, t] : adj_[u]) {
        if (seen_right[v]) continue;
        seen_right[v] = 1;
        const std::uint32_t w = match_right_[v];
        if (w != kNone && !seen_left[w]) {
          seen_left[w] = 1;
          queue.push(w);
        }
      }
    }
    std::vector<std::uint32_t> out;
    for (std::uint32_t u = 0; u < n0_; ++u) {
      if (seen_left[u]) out.push_back(u);
    }
    return out;
  }

 private:
  static constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
  struct Arc {
    std::uint32_t right;
    std::size_t tuple;
  };

  bool bfs() {
    std::queue<std::uint32_t> queue;
    bool reachable_free = false;
    for (std::uint32_t u = 0; u < n0_; ++u) {
      if (match_left_[u] == kNone) {
        dist_[u] = 0;
        queue.push(u);
      } else {
        dist_[u] = kNone;
      }
    }
    while (!queue.empty()) {
      const std::uint32_t u = queue.front();
      queue.pop();
      for (const Arc& a : adj_[u]) {
        const std::uint32_t w = match_right_[a.right];
        if (w == kNone) {
          reachable_free = true;
        } else if (dist_[w] == kNone) {
          dist_[w] = dist_[u] + 1;
          queue.push(w);
        }
      }
    }
    return reachable_free;
  }

  bool dfs(std::uint32_t u) {
    for (const Arc& a : adj_[u]) {
      const std::uint32_t w = match_right_[a.right];
      if (w == kNone || (dist_[w] == dist_[u] + 1 && dfs(w))) {
        match_left_[u] = a.right;
        match_right_[a.right] = u;
        match_tuple_[u] = a.tuple;
        return true;
      }
    }
    dist_[u] = kNone;
    return false;
  }

  std::size_t n0_;
  std::vector<std::vector<Arc>> adj_;
  std::vector<std::uint32_t> match_left_;
  std::vector<std::uint32_t> match_right_;
  std::map<std::uint32_t, std::size_t> match_tuple_;
  std::vector<std::uint32_t> dist_;
};

}  // namespace

InducingResult find_inducing_matching(std::span<const LabelTuple> tuples, std::size_t n0,
                                      std::size_t s, std::uint64_t node_budget, std::uint64_t local_steps,
                                      std::uint64_t seed) {
  if (s == 0) throw std::invalid_argument("inducing matching needs s >= 1");
  for (const auto& t : tuples) {
    if (t.size() != s) throw std::invalid_argument("label tuple has wrong arity");
    for (std::uint32_t l : t) {
      if (l >= n0) throw std::invalid_argument("label out of range");
    }
  }
  InducingResult out;
  if (n0 == 0) {
    out.status = InducingStatus::kFound;
    return out;
  }
  if (s == 1) {
    std::vector<std::size_t> first(n0, tuples.size());
    for (std::size_t t = tuples.size(); t-- > 0;) first[tuples[t][0]] = t;
    for (std::uint32_t l = 0; l < n0; ++l) {
      if (first[l] == tuples.size()) {
        out.hall_set = {l};
        return out;
      }
    }
    out.status = InducingStatus::kFound;
    out.selected = first;
    std::sort(out.selected.begin(), out.selected.end());
    return out;
  }
  if (s == 2) {
    LabelMatcher matcher(n0, tuples);
    if (matcher.run() == n0) {
      out.status = InducingStatus::kFound;
      out.selected = matcher.selected();
    } else {
      out.hall_set = matcher.hall_set();
    }
    return out;
  }
  PartiteHypergraph h;
  h.parts = s;
  h.part_size = n0;
  h.slots.reserve(tuples.size() * s);
  for (const auto& t : tuples) h.slots.insert(h.slots.end(), t.begin(), t.end());
  // Dense phase-2 instances need a colder search than the near-threshold
  // multimatching ones to clear the last few collisions.
  LocalSearchOptions search;
  search.steps = local_steps ? local_steps : 1000ULL * n0 * s;
  search.seed = seed;
  search.temperature = 0.15;
  search.walk_temperature = 0.15;
  const CoverResult local = local_partite_cover(h, search);
  out.nodes = local.nodes;
  if (local.status != CoverStatus::kBudgetExhausted) {
    out.status = local.status == CoverStatus::kFound ? InducingStatus::kFound : InducingStatus::kNotFoundProven;
    out.selected = local.chosen;
    return out;
  }
  const CoverResult cover = exact_partite_cover(h, node_budget);
  out.nodes += cover.nodes;
  switch (cover.status) {
    case CoverStatus::kFound:
      out.status = InducingStatus::kFound;
      out.selected = cover.chosen;
      break;
    case CoverStatus::kInfeasible:
      out.status = InducingStatus::kNotFoundProven;
      break;
    case CoverStatus::kBudgetExhausted:
      out.status = InducingStatus::kNotFoundBudget;
      break;
  }
  return out;
}

bool verify_multitree(TupleStream& ts, std::span<const std::size_t> indices) {
  for (std::size_t j = 0; j < ts.s(); ++j) {
    std::vector<Edge> edges;
    edges.reserve(indices.size());
    for (std::size_t i : indices) {
      if (i >= ts.total()) return false;
      edges.push_back(ts.edge(j, i));
    }
    if (!is_spanning_tree(ts.n(), edges)) return false;
  }
  return true;
}

BuildResult build_multitree(TupleStream& ts, const BuildOptions& options) {
  BuildResult out;
  std::ostream* trace = options.trace;
  Phase1Result p1 = phase1(ts, StopRule::giant_half(), trace);
  MultiForestState& state = p1.state;
  if (p1.status == Phase1Status::kExhaustedBeforeStop) {
    out.diagnostics = "stream exhausted in phase 1";
    out.m_used = state.examined();
    return out;
  }
  SmallTreeLabeling labeling;
  for (;;) {
    try {
      labeling = label_small_trees(state);
      break;
    } catch (const GiantTie&) {
      if (!phase1_step(state, ts)) {
        out.diagnostics = "stream exhausted breaking a giant tie";
        out.m_used = state.examined();
        return out;
      }
      if (trace) trace_step(*trace, state);
    }
  }
  out.phase1_steps = state.steps();
  out.phase1_examined = state.examined();
  out.small_count = labeling.small_count;

  const std::size_t n0 = labeling.small_count;
  std::vector<std::size_t> extra;
  std::size_t cursor = state.next_index;
  if (n0 > 0) {
    std::size_t budget = options.initial_budget ? options.initial_budget : 4 * n0 + 16;
    std::vector<AcceptableTuple> collected;
    std::vector<LabelTuple> labels;
    for (;;) {
      Phase2Batch batch = phase2_collect(ts, labeling, cursor, budget - collected.size());
      cursor = batch.next_index;
      out.phase2_examined += batch.examined;
      for (auto& t : batch.tuples) {
        labels.push_back(t.labels);
        collected.push_back(std::move(t));
      }
      if (trace) *trace << "PHASE2 accepted=" << collected.size() << " budget=" << budget << '\n';
      const InducingResult r =
          find_inducing_matching(labels, n0, ts.s(), options.node_budget, 0, mix_seed(ts.seed(), budget));
      if (r.status == InducingStatus::kFound) {
        for (std::size_t k : r.selected) extra.push_back(collected[k].index);
        break;
      }
      if (batch.exhausted) {
        out.diagnostics = "stream exhausted in phase 2 with " + std::to_string(collected.size()) +
                          " acceptable tuples";
        out.acceptable = collected.size();
        out.m_used = cursor;
        return out;
      }
      budget *= 2;
    }
    out.acceptable = collected.size();
  }

  out.tree.indices = state.chosen;
  out.tree.indices.insert(out.tree.indices.end(), extra.begin(), extra.end());
  std::sort(out.tree.indices.begin(), out.tree.indices.end());
  for (std::size_t j = 0; j < ts.s(); ++j) {
    std::vector<Edge> edges;
    for (std::size_t i : out.tree.indices) edges.push_back(ts.edge(j, i));
    out.tree.trees.push_back(std::move(edges));
  }
  if (!verify_multitree(ts, out.tree.indices)) {
    throw std::logic_error("assembled index set is not a multitree");
  }
  out.success = true;
  out.m_used = cursor;
  if (trace) *trace << "DONE m_used=" << out.m_used << '\n';
  return out;
}

}  // namespace mtlab
