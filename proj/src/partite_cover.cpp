#include "mtlab/partite_cover.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

#include "mtlab/rng.hpp"

namespace mtlab {

namespace {

class CoverSearch {
 public:
  CoverSearch(const PartiteHypergraph& h, std::uint64_t budget) : h_(h), budget_(budget) {
    const std::size_t cells = h.parts * h.part_size;
    cell_edges_.resize(cells);
    count_.assign(cells, 0);
    covered_.assign(cells, 0);
    // Identical edges are interchangeable; keep the lowest index of each.
    std::map<std::vector<std::uint32_t>, std::size_t> seen;
    for (std::size_t e = 0; e < h.edge_count(); ++e) {
      const auto ed = h.edge(e);
      for (std::size_t p = 0; p < h.parts; ++p) {
        if (ed[p] >= h.part_size) throw std::invalid_argument("hyperedge vertex out of range");
      }
      if (!seen.emplace(std::vector<std::uint32_t>(ed.begin(), ed.end()), e).second) continue;
      edges_.push_back(e);
    }
    blocked_.assign(h.edge_count(), 0);
    for (std::size_t e : edges_) {
      for (std::size_t p = 0; p < h.parts; ++p) {
        const std::size_t c = cell(p, h.edge(e)[p]);
        cell_edges_[c].push_back(e);
        ++count_[c];
      }
    }
  }

  CoverResult run() {
    CoverResult out;
    const bool found = search(h_.part_size);
    out.nodes = nodes_;
    if (found) {
      out.status = CoverStatus::kFound;
      out.chosen = stack_;
      std::sort(out.chosen.begin(), out.chosen.end());
    } else {
      out.status = aborted_ ? CoverStatus::kBudgetExhausted : CoverStatus::kInfeasible;
    }
    return out;
  }

 private:
  std::size_t cell(std::size_t p, std::uint32_t v) const { return p * h_.part_size + v; }

  void select(std::size_t e) {
    const auto ed = h_.edge(e);
    for (std::size_t p = 0; p < h_.parts; ++p) {
      const std::size_t c = cell(p, ed[p]);
      covered_[c] = 1;
      for (std::size_t f : cell_edges_[c]) {
        if (blocked_[f]++ == 0) {
          const auto fd = h_.edge(f);
          for (std::size_t q = 0; q < h_.parts; ++q) --count_[cell(q, fd[q])];
        }
      }
    }
    stack_.push_back(e);
  }

  void unselect(std::size_t e) {
    stack_.pop_back();
    const auto ed = h_.edge(e);
    for (std::size_t p = h_.parts; p-- > 0;) {
      const std::size_t c = cell(p, ed[p]);
      covered_[c] = 0;
      for (std::size_t f : cell_edges_[c]) {
        if (--blocked_[f] == 0) {
          const auto fd = h_.edge(f);
          for (std::size_t q = 0; q < h_.parts; ++q) ++count_[cell(q, fd[q])];
        }
      }
    }
  }

  bool search(std::size_t remaining) {
    if (remaining == 0) return true;
    std::size_t best = cell_edges_.size();
    std::size_t best_count = 0;
    for (std::size_t c = 0; c < cell_edges_.size(); ++c) {
      if (covered_[c]) continue;
      if (best == cell_edges_.size() || count_[c] < best_count) {
        best = c;
        best_count = count_[c];
        if (best_count == 0) return false;
      }
    }
    std::vector<std::size_t> options;
    options.reserve(best_count);
    for (std::size_t e : cell_edges_[best]) {
      if (blocked_[e] == 0) options.push_back(e);
    }
    for (std::size_t e : options) {
      if (budget_ != 0 && nodes_ >= budget_) {
        aborted_ = true;
        return false;
      }
      ++nodes_;
      select(e);
      if (search(remaining - 1)) return true;
      unselect(e);
      if (aborted_) return false;
    }
    return false;
  }

  const PartiteHypergraph& h_;
  std::uint64_t budget_;
  std::vector<std::size_t> edges_;
  std::vector<std::vector<std::size_t>> cell_edges_;
  std::vector<std::uint32_t> count_;
  std::vector<char> covered_;
  std::vector<std::uint32_t> blocked_;
  std::vector<std::size_t> stack_;
  std::uint64_t nodes_ = 0;
  bool aborted_ = false;
};

constexpr std::size_t kFree = std::numeric_limits<std::size_t>::max();

// Keeps the chosen tuples a perfect matching between parts 0 and 1 and
// anneals away collisions in the remaining parts. A move removes one tuple and
// walks an alternating path in the part-0/part-1 graph until it can close
// the hole, so every state stays perfect on the first coordinate.
class SwapMatcher {
 public:
  SwapMatcher(const PartiteHypergraph& h, std::uint64_t seed, double temperature, double walk_temperature)
      : h_(h), q_(h.part_size), temperature_(temperature), walk_temperature_(walk_temperature), rng_(seed), by_left_(q_), match_left_(q_, kFree), match_right_(q_, kFree),
        cover_(h.parts * q_, 0) {
    by_cell_.resize(h.parts > 2 ? (h.parts - 2) * q_ : 0);
    for (std::size_t e = 0; e < h.edge_count(); ++e) {
      by_left_[h.edge(e)[0]].push_back(e);
      for (std::size_t p = 2; p < h.parts; ++p) by_cell_[(p - 2) * q_ + h.edge(e)[p]].push_back(e);
    }
    for (auto& list : by_left_) {
      std::sort(list.begin(), list.end(), [&](std::size_t x, std::size_t y) { return right(x) < right(y); });
    }
  }

  bool has_isolated_cell() const {
    std::vector<char> hit(h_.parts * q_, 0);
    for (std::size_t e = 0; e < h_.edge_count(); ++e) {
      for (std::size_t p = 0; p < h_.parts; ++p) hit[p * q_ + h_.edge(e)[p]] = 1;
    }
    return std::find(hit.begin(), hit.end(), 0) != hit.end();
  }

  /// Perfect matching of the first coordinate by augmenting paths; false if none exists.
  bool seed_matching() {
    std::vector<std::uint32_t> order(q_);
    std::iota(order.begin(), order.end(), 0u);
    shuffle(std::span<std::uint32_t>(order), rng_);
    std::vector<std::size_t> visited(q_, kFree);
    for (std::uint32_t a : order) {
      if (!augment(a, a, visited)) return false;
    }
    for (std::size_t a = 0; a < q_; ++a) add(match_left_[a]);
    return true;
  }

  bool anneal(std::uint64_t steps, std::uint64_t& effort) {
    for (std::uint64_t t = 0; t < steps && energy_ > 0; ++t) {
      ++effort;
      move();
    }
    return energy_ == 0;
  }

  std::vector<std::size_t> chosen() const {
    std::vector<std::size_t> out(match_left_.begin(), match_left_.end());
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  static constexpr std::size_t kMaxWalk = 8;
  static constexpr double kTargeted = 0.5;

  std::uint32_t right(std::size_t e) const { return h_.edge(e)[1]; }

  bool augment(std::uint32_t a, std::size_t stamp, std::vector<std::size_t>& visited) {
    for (std::size_t e : by_left_[a]) {
      const std::uint32_t b = right(e);
      if (visited[b] == stamp) continue;
      visited[b] = stamp;
      if (match_right_[b] == kFree || augment(h_.edge(match_right_[b])[0], stamp, visited)) {
        match_left_[a] = e;
        match_right_[b] = e;
        return true;
      }
    }
    return false;
  }

  // Collision energy: sum over cells outside the first coordinate of (cover - 1)+.
  void add(std::size_t e) {
    const auto ed = h_.edge(e);
    for (std::size_t p = 2; p < h_.parts; ++p) {
      if (cover_[p * q_ + ed[p]]++ >= 1) ++energy_;
    }
  }
  void remove(std::size_t e) {
    const auto ed = h_.edge(e);
    for (std::size_t p = 2; p < h_.parts; ++p) {
      if (--cover_[p * q_ + ed[p]] >= 1) --energy_;
    }
  }

  std::size_t edge_between(std::uint32_t a, std::uint32_t b) const {
    const auto& list = by_left_[a];
    const auto it = std::lower_bound(list.begin(), list.end(), b,
                                     [&](std::size_t e, std::uint32_t key) { return right(e) < key; });
    return it != list.end() && right(*it) == b ? *it : kFree;
  }

  void move() {
    const std::size_t before = energy_;
    log_.clear();
    std::uint32_t a = 0;
    std::uint32_t hole = 0;
    const std::size_t target = uniform01(rng_) < kTargeted ? uncovered_tuple() : kFree;
    if (target != kFree) {
      // Insert a tuple covering an empty cell; its first-coordinate neighbours leave.
      const std::size_t left_owner = match_left_[h_.edge(target)[0]];
      const std::size_t right_owner = match_right_[right(target)];
      if (left_owner == right_owner) {
        // parallel tuple on the same first-coordinate pair: a plain swap
        take_out(left_owner);
        put_in(target);
        return settle(before);
      }
      a = h_.edge(right_owner)[0];
      hole = right(left_owner);
      take_out(left_owner);
      take_out(right_owner);
      put_in(target);
    } else {
      a = static_cast<std::uint32_t>(uniform_below(rng_, q_));
      hole = right(match_left_[a]);
      take_out(match_left_[a]);
    }
    for (std::size_t len = 0; len < kMaxWalk; ++len) {
      if (len + 1 == kMaxWalk) {
        const std::size_t closing = edge_between(a, hole);
        if (closing == kFree) break;
        put_in(closing);
        return settle(before);
      }
      const std::size_t e = pick_step(a, hole);
      const std::uint32_t b = right(e);
      if (b == hole) {
        put_in(e);
        return settle(before);
      }
      const std::size_t displaced = match_right_[b];
      const auto next = h_.edge(displaced)[0];
      take_out(displaced);
      put_in(e);
      a = next;
    }
    undo();
  }

  // Heat-bath choice among the tuples at left vertex a, weighted by the
  // exact energy change of inserting it (and evicting its right neighbour).
  std::size_t pick_step(std::uint32_t a, std::uint32_t hole) {
    const auto& options = by_left_[a];
    weights_.resize(options.size());
    double total = 0;
    for (std::size_t k = 0; k < options.size(); ++k) {
      const std::size_t e = options[k];
      int delta = collisions_if_added(e);
      if (right(e) != hole) delta -= collisions_if_removed(match_right_[right(e)]);
      weights_[k] = std::exp(-static_cast<double>(delta) / walk_temperature_);
      total += weights_[k];
    }
    double x = uniform01(rng_) * total;
    for (std::size_t k = 0; k < options.size(); ++k) {
      x -= weights_[k];
      if (x < 0) return options[k];
    }
    return options.back();
  }

  int collisions_if_added(std::size_t e) const {
    int c = 0;
    const auto ed = h_.edge(e);
    for (std::size_t p = 2; p < h_.parts; ++p) c += cover_[p * q_ + ed[p]] >= 1 ? 1 : 0;
    return c;
  }
  int collisions_if_removed(std::size_t e) const {
    int c = 0;
    const auto ed = h_.edge(e);
    for (std::size_t p = 2; p < h_.parts; ++p) c += cover_[p * q_ + ed[p]] >= 2 ? 1 : 0;
    return c;
  }

  // A random tuple through a random empty cell outside the first coordinate,
  // or kFree when the probes find none.
  std::size_t uncovered_tuple() {
    if (h_.parts <= 2) return kFree;
    for (int probe = 0; probe < 32; ++probe) {
      const std::size_t c = 2 * q_ + uniform_below(rng_, (h_.parts - 2) * q_);
      if (cover_[c] != 0) continue;
      const auto& options = by_cell_[c - 2 * q_];
      const std::size_t e = options[uniform_below(rng_, options.size())];
      return match_left_[h_.edge(e)[0]] == e ? kFree : e;
    }
    return kFree;
  }

  void take_out(std::size_t e) {
    remove(e);
    match_left_[h_.edge(e)[0]] = kFree;
    match_right_[right(e)] = kFree;
    log_.push_back({e, false});
  }
  void put_in(std::size_t e) {
    add(e);
    match_left_[h_.edge(e)[0]] = e;
    match_right_[right(e)] = e;
    log_.push_back({e, true});
  }

  void settle(std::size_t before) {
    if (energy_ <= before) return;
    const double delta = static_cast<double>(energy_ - before);
    if (uniform01(rng_) < std::exp(-delta / temperature_)) return;
    undo();
  }

  void undo() {
    for (auto it = log_.rbegin(); it != log_.rend(); ++it) {
      const auto [e, added] = *it;
      if (added) {
        remove(e);
        match_left_[h_.edge(e)[0]] = kFree;
        match_right_[right(e)] = kFree;
      } else {
        add(e);
        match_left_[h_.edge(e)[0]] = e;
        match_right_[right(e)] = e;
      }
    }
    log_.clear();
  }

  const PartiteHypergraph& h_;
  std::size_t q_;
  double temperature_;
  double walk_temperature_;
  Rng rng_;
  std::vector<std::vector<std::size_t>> by_left_;
  std::vector<std::size_t> match_left_;
  std::vector<std::size_t> match_right_;
  std::vector<std::uint32_t> cover_;
  std::vector<std::vector<std::size_t>> by_cell_;  // tuples through each cell of parts 2..
  std::size_t energy_ = 0;
  std::vector<std::pair<std::size_t, bool>> log_;  // (tuple, inserted) in move order
  std::vector<double> weights_;
};

}  // namespace

CoverResult exact_partite_cover(const PartiteHypergraph& h, std::uint64_t node_budget) {
  if (h.parts == 0) throw std::invalid_argument("hypergraph needs at least one part");
  return CoverSearch(h, node_budget).run();
}

bool is_partite_cover(const PartiteHypergraph& h, std::span<const std::size_t> chosen) {
  if (chosen.size() != h.part_size) return false;
  std::vector<char> used(h.parts * h.part_size, 0);
  for (std::size_t e : chosen) {
    if (e >= h.edge_count()) return false;
    const auto ed = h.edge(e);
    for (std::size_t p = 0; p < h.parts; ++p) {
      char& u = used[p * h.part_size + ed[p]];
      if (u) return false;
      u = 1;
    }
  }
  return true;
}

CoverResult local_partite_cover(const PartiteHypergraph& h, const LocalSearchOptions& options) {
  if (h.parts < 2) throw std::invalid_argument("local search needs at least two parts");
  for (std::uint32_t v : h.slots) {
    if (v >= h.part_size) throw std::invalid_argument("hyperedge vertex out of range");
  }
  CoverResult out;
  if (h.part_size == 0) {
    out.status = CoverStatus::kFound;
    return out;
  }
  if (!(options.temperature > 0) || !(options.walk_temperature > 0)) {
    throw std::invalid_argument("local search temperatures must be positive");
  }
  SwapMatcher local(h, options.seed, options.temperature, options.walk_temperature);
  if (local.has_isolated_cell() || !local.seed_matching()) {
    out.status = CoverStatus::kInfeasible;
    return out;
  }
  if (local.anneal(options.steps, out.nodes)) {
    out.status = CoverStatus::kFound;
    out.chosen = local.chosen();
  } else {
    out.status = CoverStatus::kBudgetExhausted;
  }
  return out;
}

}  // namespace mtlab
