#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "mtlab/matroid_intersect.hpp"

using namespace mtlab;

namespace {

bool independent_both(const IntersectionInstance& inst, std::uint32_t mask) {
  DisjointSets a(inst.n), b(inst.n);
  for (std::size_t i = 0; i < inst.size(); ++i) {
    if (!(mask >> i & 1)) continue;
    if (!a.unite(inst.first[i]) || !b.unite(inst.second[i])) return false;
  }
  return true;
}

std::size_t brute_max_common(const IntersectionInstance& inst) {
  std::size_t best = 0;
  for (std::uint32_t mask = 0; mask < (1u << inst.size()); ++mask) {
    const auto size = static_cast<std::size_t>(__builtin_popcount(mask));
    if (size > best && independent_both(inst, mask)) best = size;
  }
  return best;
}

std::size_t brute_max_kappa(const IntersectionInstance& inst) {
  std::size_t best = 0;
  for (std::uint32_t mask = 0; mask < (1u << inst.size()); ++mask) {
    DisjointSets a(inst.n), b(inst.n);
    for (std::size_t i = 0; i < inst.size(); ++i) {
      if (mask >> i & 1) a.unite(inst.first[i]);
      else b.unite(inst.second[i]);
    }
    best = std::max(best, a.component_count() + b.component_count());
  }
  return best;
}

void check_result(const IntersectionInstance& inst, const CommonForestResult& r) {
  std::vector<Edge> e, f;
  for (std::size_t i : r.independent) {
    e.push_back(inst.first[i]);
    f.push_back(inst.second[i]);
  }
  CHECK(is_forest(inst.n, e));
  CHECK(is_forest(inst.n, f));
  const KappaValues k = kappa(inst, r.certificate);
  CHECK(k.first == r.kappa_first);
  CHECK(k.second == r.kappa_second);
  CHECK(r.rank() == 2 * inst.n - k.sum());
}

}  // namespace

TEST_CASE("empty instance") {
  IntersectionInstance inst;
  inst.n = 4;
  const auto r = max_common_forest(inst);
  CHECK(r.rank() == 0);
  CHECK(r.certificate.empty());
  CHECK(r.kappa_first == 4);
  CHECK(r.kappa_second == 4);
}

TEST_CASE("triangle pairs give rank two") {
  IntersectionInstance inst{3, {{0, 1}, {0, 2}, {1, 2}}, {{0, 1}, {0, 2}, {1, 2}}};
  const auto r = max_common_forest(inst);
  CHECK(r.rank() == 2);
  check_result(inst, r);
}

TEST_CASE("kappa of trivial subsets") {
  TupleStream ts = TupleStream::generate(6, 2, 3);
  const auto inst = IntersectionInstance::from_stream(ts, 7);
  const KappaValues none = kappa(inst, {});
  CHECK(none.first == 6);
  CHECK(none.second == component_count(6, inst.second));
  std::vector<std::size_t> all(7);
  std::iota(all.begin(), all.end(), 0);
  CHECK(kappa(inst, all).second == 6);
  const std::vector<std::size_t> bad{7};
  CHECK_THROWS_AS(kappa(inst, bad), std::invalid_argument);
}

TEST_CASE("exhaustive oracle and duality on small instances") {
  std::uint64_t seed = 0;
  for (int trial = 0; trial < 300; ++trial, ++seed) {
    const std::size_t n = 2 + seed % 5;  // 2..6
    TupleStream ts = TupleStream::generate(n, 2, seed);
    const std::size_t m = std::min<std::size_t>(ts.total(), 1 + seed % 14);
    const auto inst = IntersectionInstance::from_stream(ts, m);
    const auto r = max_common_forest(inst);
    CHECK(r.rank() == brute_max_common(inst));
    if (m <= 12) CHECK(r.rank() == 2 * n - brute_max_kappa(inst));
    check_result(inst, r);
  }
}

TEST_CASE("warm start reaches the same rank") {
  TupleStream ts = TupleStream::generate(30, 2, 17);
  const auto small = IntersectionInstance::from_stream(ts, 60);
  const auto large = IntersectionInstance::from_stream(ts, 120);
  const auto r0 = max_common_forest(small);
  const auto cold = max_common_forest(large);
  const auto warm = max_common_forest(large, r0.independent);
  CHECK(warm.rank() == cold.rank());
  CHECK(r0.rank() <= cold.rank());
  check_result(large, warm);
}

TEST_CASE("rank is nondecreasing in m") {
  TupleStream ts = TupleStream::generate(25, 2, 9);
  std::size_t last = 0;
  for (std::size_t m = 0; m <= 150; m += 5) {
    const auto r = max_common_forest(IntersectionInstance::from_stream(ts, m));
    CHECK(r.rank() >= last);
    last = r.rank();
  }
}

TEST_CASE("exact m* against linear scan and hitting times") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const std::size_t n = 5 + seed % 46;  // 5..50
    TupleStream ts = TupleStream::generate(n, 2, seed);
    const auto fast = exact_mstar(ts);
    TupleStream again = TupleStream::generate(n, 2, seed);
    const auto slow = exact_mstar_linear(again);
    CHECK(fast.m_star == slow.m_star);
    CHECK(fast.m_star >= fast.lower_bound);
    CHECK(fast.lower_bound == connectivity_hitting_times(ts).max_connect());
    const auto inst = IntersectionInstance::from_stream(ts, fast.m_star);
    CHECK(max_common_forest(inst).rank() == n - 1);
    const auto before = IntersectionInstance::from_stream(ts, fast.m_star - 1);
    CHECK(max_common_forest(before).rank() < n - 1);
  }
}

TEST_CASE("m* for n = 3 over all permutation pairs") {
  // The 36 pairs of row orders are equally likely; m* = 2 unless the first
  // two rows' prefixes disagree on spanning, which forces 3.
  const std::vector<Edge> edges{{0, 1}, {0, 2}, {1, 2}};
  std::vector<int> order{0, 1, 2};
  std::vector<std::vector<Edge>> perms;
  do {
    perms.push_back({edges[order[0]], edges[order[1]], edges[order[2]]});
  } while (std::next_permutation(order.begin(), order.end()));
  std::map<std::size_t, int> histogram;
  for (const auto& a : perms) {
    for (const auto& b : perms) {
      TupleStream ts = TupleStream::from_rows(3, {a, b});
      const std::size_t m = exact_mstar(ts).m_star;
      // oracle: smallest m whose first m pairs contain two indices spanning both
      std::size_t oracle = 0;
      for (std::size_t mm = 2; mm <= 3 && !oracle; ++mm) {
        for (std::size_t x = 0; x < mm && !oracle; ++x)
          for (std::size_t y = x + 1; y < mm && !oracle; ++y)
            if (a[x] != a[y] && b[x] != b[y]) oracle = mm;
      }
      CHECK(m == oracle);
      histogram[m]++;
    }
  }
  CHECK(histogram[2] == 36);
}

TEST_CASE("instance dump round trip") {
  TupleStream ts = TupleStream::generate(9, 2, 1);
  const auto inst = IntersectionInstance::from_stream(ts, 12);
  std::stringstream buffer;
  write_instance(buffer, inst);
  std::string header;
  std::getline(buffer, header);
  CHECK(header == "9 12");
  buffer.seekg(0);
  const auto back = read_instance(buffer);
  CHECK(back.n == 9);
  CHECK(back.first == inst.first);
  CHECK(back.second == inst.second);
}

TEST_CASE("exact m* refuses s < 2") {
  TupleStream ts = TupleStream::generate(10, 1, 0);
  CHECK_THROWS_AS(exact_mstar(ts), std::invalid_argument);
}
