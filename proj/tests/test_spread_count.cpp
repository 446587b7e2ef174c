#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "mtlab/rng.hpp"
#include "mtlab/spread_count.hpp"

using namespace mtlab;

namespace {

std::vector<XTuple> ground_set(const MatchingUniverse& u) {
  std::vector<XTuple> out{{}};
  for (std::size_t j = 0; j < u.coordinates(); ++j) {
    std::vector<XTuple> next;
    for (const XTuple& prefix : out) {
      for (std::uint32_t v = 0; v < u.side_size(j); ++v) {
        XTuple t = prefix;
        t.push_back(v);
        next.push_back(t);
      }
    }
    out = std::move(next);
  }
  return out;
}

// Inducing matching: n0 tuples hitting every tree exactly once in every coordinate.
bool is_inducing(const MatchingUniverse& u, const std::vector<XTuple>& set) {
  if (set.size() != u.small_count()) return false;
  for (std::size_t j = 0; j < u.coordinates(); ++j) {
    std::set<std::uint32_t> trees;
    for (const XTuple& t : set) trees.insert(u.tree_of(j, t[j]));
    if (trees.size() != set.size()) return false;
  }
  return true;
}

// All n0-subsets of X that are inducing, as sorted tuple sets.
std::set<std::vector<XTuple>> brute_matchings(const MatchingUniverse& u) {
  const auto x = ground_set(u);
  const std::size_t k = u.small_count();
  std::set<std::vector<XTuple>> out;
  std::vector<std::size_t> pick(k);
  auto rec = [&](auto&& self, std::size_t depth, std::size_t from) -> void {
    if (depth == k) {
      std::vector<XTuple> set;
      for (std::size_t i : pick) set.push_back(x[i]);
      if (is_inducing(u, set)) out.insert(set);
      return;
    }
    for (std::size_t i = from; i < x.size(); ++i) {
      pick[depth] = i;
      self(self, depth + 1, i + 1);
    }
  };
  rec(rec, 0, 0);
  return out;
}

std::vector<std::vector<std::uint32_t>> random_sizes(std::size_t n0, std::size_t s, std::uint32_t max_size,
                                                     Rng& rng) {
  std::vector<std::vector<std::uint32_t>> sizes(s, std::vector<std::uint32_t>(n0));
  for (auto& row : sizes)
    for (auto& t : row) t = 1 + static_cast<std::uint32_t>(uniform_below(rng, max_size));
  return sizes;
}

}  // namespace

TEST_CASE("universe layout") {
  const MatchingUniverse u({{1, 2}, {3, 1}});
  CHECK(u.small_count() == 2);
  CHECK(u.coordinates() == 2);
  CHECK(u.side_size(0) == 3);
  CHECK(u.side_size(1) == 4);
  CHECK(u.tree_of(0, 0) == 0);
  CHECK(u.tree_of(0, 2) == 1);
  CHECK(u.tree_of(1, 2) == 0);
  CHECK(u.tree_of(1, 3) == 1);
  CHECK(u.ground_size() == 12);
  CHECK_THROWS_AS(MatchingUniverse({{1, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(MatchingUniverse({{1, 2}, {1}}), std::invalid_argument);
}

TEST_CASE("closed-form counts on small examples") {
  CHECK(count_inducing_matchings(MatchingUniverse::uniform(2, 2)) == 2);
  CHECK(count_inducing_matchings(MatchingUniverse::uniform(3, 3)) == 36);
  CHECK(count_inducing_matchings(MatchingUniverse::uniform(1, 4, 2)) == 16);
  CHECK(count_inducing_matchings(MatchingUniverse({{1, 2}, {2, 1}})) == 2 * 4);
  // 20! exceeds 64 bits well before the product does.
  const BigInt big = count_inducing_matchings(MatchingUniverse::uniform(25, 2));
  BigInt factorial = 1;
  for (int i = 2; i <= 25; ++i) factorial *= i;
  CHECK(big == factorial);
}

TEST_CASE("enumeration matches subset brute force") {
  Rng rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n0 = 1 + uniform_below(rng, 3);
    const std::size_t s = 1 + uniform_below(rng, 3);
    const MatchingUniverse u(random_sizes(n0, s, 2, rng));
    if (u.ground_size() > 30) continue;
    const auto oracle = brute_matchings(u);
    std::set<std::vector<XTuple>> seen;
    const std::uint64_t visited = for_each_inducing_matching(u, [&](const InducingMatching& h) {
      CHECK(is_inducing(u, h));
      std::vector<XTuple> sorted = h;
      std::sort(sorted.begin(), sorted.end());
      seen.insert(sorted);
    });
    CHECK(visited == oracle.size());
    CHECK(seen == oracle);
    CHECK(count_inducing_matchings(u) == oracle.size());
  }
}

TEST_CASE("enumeration guard") {
  const MatchingUniverse u = MatchingUniverse::uniform(6, 3);
  try {
    enumerate_inducing_matchings(u, 1000);
    FAIL("guard did not fire");
  } catch (const EnumerationGuard& g) {
    CHECK(g.count() == 518400);
  }
  CHECK(enumerate_inducing_matchings(MatchingUniverse::uniform(3, 2), 6).size() == 6);
}

TEST_CASE("upset counts agree with enumeration") {
  Rng rng(47);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n0 = 2 + uniform_below(rng, 3);
    const std::size_t s = 2 + uniform_below(rng, 2);
    const MatchingUniverse u(random_sizes(n0, s, 2, rng));
    if (count_inducing_matchings(u) > 20000) continue;
    const auto all = enumerate_inducing_matchings(u);
    const auto x = ground_set(u);
    for (int q = 0; q < 20; ++q) {
      const std::size_t k = 1 + uniform_below(rng, 3);
      std::vector<XTuple> subset;
      for (std::size_t i = 0; i < k; ++i) subset.push_back(x[uniform_below(rng, x.size())]);
      std::sort(subset.begin(), subset.end());
      subset.erase(std::unique(subset.begin(), subset.end()), subset.end());
      std::uint64_t contained = 0;
      for (const auto& h : all) {
        contained += std::all_of(subset.begin(), subset.end(), [&](const XTuple& t) {
          return std::find(h.begin(), h.end(), t) != h.end();
        });
      }
      CHECK(upset_count(u, subset) == contained);
    }
  }
}

TEST_CASE("spread check") {
  // n0 = 2, s = 2, unit trees: |H| = 2 and every compatible set lies in one matching.
  const MatchingUniverse tiny = MatchingUniverse::uniform(2, 2);
  const SpreadReport r1 = spread_check(tiny, Rational{2, 1}, 1);
  CHECK(r1.pass);
  CHECK(r1.max_ratio == doctest::Approx(1.0));
  CHECK(r1.sets_checked == 4);
  const SpreadReport r2 = spread_check(tiny, Rational{2, 1}, 2);
  CHECK_FALSE(r2.pass);
  CHECK(r2.max_ratio == doctest::Approx(2.0));
  CHECK(r2.worst.size() == 2);
  CHECK_FALSE(spread_check(tiny, Rational{3, 1}, 1).pass);

  for (std::size_t n0 = 3; n0 <= 6; ++n0) {
    for (std::size_t s : {2u, 3u}) {
      const MatchingUniverse u = MatchingUniverse::uniform(n0, s);
      const SpreadReport r = spread_check(u, default_spread_kappa(n0, s), 3);
      CHECK(r.pass);
      CHECK(r.max_ratio <= 1.0);
      CHECK(r.sets_checked > 0);
    }
  }
  // Ten times the default kappa breaks it at |S| = 1.
  const Rational base = default_spread_kappa(5, 2);
  const SpreadReport bad = spread_check(MatchingUniverse::uniform(5, 2), Rational{base.num * 10, base.den}, 3);
  CHECK_FALSE(bad.pass);
  CHECK(!bad.worst.empty());
}

TEST_CASE("kappa and FKNP bound") {
  const Rational k = default_spread_kappa(6, 3);
  CHECK(k.num == 4 * k.den);
  const Rational k2 = default_spread_kappa(4, 2);
  CHECK(k2.num * 3 == k2.den * 4);
  CHECK(fknp_bound(std::exp(1.0), 10, 3, 1) == 4);
  CHECK(fknp_bound(100, 50, 7, 3) == 99);
}
