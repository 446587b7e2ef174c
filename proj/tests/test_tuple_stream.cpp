#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "mtlab/graph.hpp"
#include "mtlab/tuple_stream.hpp"

using namespace mtlab;

TEST_CASE("sub-seed mixing is bit-exact") {
  CHECK(fmix64(0) == 0);
  CHECK(mix_seed(0, 0) == fmix64(0x9e3779b97f4a7c15ULL));
  CHECK(mix_seed(1, 1) == fmix64(1 + 2 * 0x9e3779b97f4a7c15ULL));
  Rng a(5), b(5);
  for (int i = 0; i < 100; ++i) CHECK(uniform_below(a, 7) == uniform_below(b, 7));
}

TEST_CASE("edge ranks are lexicographic") {
  const EdgeIndexer ix(5);
  CHECK(ix.rank({0, 1}) == 0);
  CHECK(ix.rank({0, 2}) == 1);
  CHECK(ix.rank({3, 4}) == pair_count(5) - 1);
  for (EdgeId id = 0; id < pair_count(5); ++id) CHECK(ix.rank(ix.unrank(id)) == id);
}

TEST_CASE("rows are permutations of E(K_n)") {
  TupleStream ts = TupleStream::generate(3, 2, 11);
  for (std::size_t j = 0; j < 2; ++j) {
    const auto row = ts.prefix(j, 3);
    std::set<Edge> seen(row.begin(), row.end());
    CHECK(seen == std::set<Edge>{{0, 1}, {0, 2}, {1, 2}});
  }
  TupleStream big = TupleStream::generate(40, 3, 99);
  for (std::size_t j = 0; j < 3; ++j) {
    const auto row = big.prefix(j, big.total());
    std::set<Edge> seen(row.begin(), row.end());
    CHECK(seen.size() == pair_count(40));
  }
}

TEST_CASE("generation is deterministic and rows differ") {
  TupleStream a = TupleStream::generate(50, 2, 123);
  TupleStream b = TupleStream::generate(50, 2, 123);
  const auto ra = a.prefix(0, 200);
  const auto rb = b.prefix(0, 200);
  CHECK(std::equal(ra.begin(), ra.end(), rb.begin()));
  const auto r1 = a.prefix(1, 200);
  CHECK_FALSE(std::equal(ra.begin(), ra.end(), r1.begin()));
}

TEST_CASE("dense and sparse backings produce the same rows") {
  TupleStream dense = TupleStream::generate(60, 2, 8);
  TupleStream sparse = TupleStream::generate(60, 2, 8);
  dense.set_sparse_backing(false);
  sparse.set_sparse_backing(true);
  for (std::size_t j = 0; j < 2; ++j) {
    const auto a = dense.prefix(j, 1000);
    const auto b = sparse.prefix(j, 1000);
    CHECK(std::equal(a.begin(), a.end(), b.begin()));
  }
}

TEST_CASE("invalid generation arguments") {
  CHECK_THROWS_AS(TupleStream::generate(1, 2, 0), std::invalid_argument);
  CHECK_THROWS_AS(TupleStream::generate(5, 0, 0), std::invalid_argument);
}

TEST_CASE("prefix graphs") {
  TupleStream ts = TupleStream::generate(8, 2, 3);
  CHECK(prefix_graph(ts, 0, 0).edge_count() == 0);
  const Graph full = prefix_graph(ts, 1, ts.total());
  CHECK(full.edge_count() == pair_count(8));
  CHECK(is_connected(full));
  CHECK_FALSE(is_connected(prefix_graph(ts, 0, 8 - 2)));
  CHECK_THROWS_AS(prefix_graph(ts, 0, ts.total() + 1), std::invalid_argument);
}

TEST_CASE("first position of row 0 is uniform over edges") {
  // 10^4 seeds at n = 100: count of edge 01 in front is Binomial(10^4, 1/4950).
  const double p = 1.0 / 4950.0;
  const double trials = 1e4;
  std::size_t hits = 0;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    TupleStream ts = TupleStream::generate(100, 2, seed);
    ts.set_sparse_backing(true);
    hits += ts.edge(0, 0) == Edge{0, 1};
  }
  const double mean = trials * p;
  const double sd = std::sqrt(trials * p * (1 - p));
  CHECK(static_cast<double>(hits) <= mean + 3 * sd);
  CHECK(static_cast<double>(hits) >= std::max(0.0, mean - 3 * sd));
}

TEST_CASE("hitting times") {
  TupleStream two = TupleStream::generate(2, 3, 1);
  const HittingTimes h2 = connectivity_hitting_times(two);
  for (std::size_t j = 0; j < 3; ++j) CHECK(h2.connect[j] == 1);

  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    TupleStream ts = TupleStream::generate(60, 2, seed);
    const HittingTimes h = connectivity_hitting_times(ts);
    for (std::size_t j = 0; j < 2; ++j) {
      CHECK(h.min_degree[j] <= h.connect[j]);
      CHECK(is_connected(prefix_graph(ts, j, h.connect[j])));
      CHECK_FALSE(is_connected(prefix_graph(ts, j, h.connect[j] - 1)));
    }
    CHECK(h.max_connect() == std::max(h.connect[0], h.connect[1]));
  }
}

TEST_CASE("connectivity hitting time concentrates at n ln n / 2") {
  const double n = 1000;
  double sum = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    TupleStream ts = TupleStream::generate(1000, 1, seed);
    sum += static_cast<double>(connectivity_hitting_times(ts).connect[0]);
  }
  const double ratio = sum / 200 / (0.5 * n * std::log(n));
  CHECK(ratio >= 0.9);
  CHECK(ratio <= 1.1);
}

TEST_CASE("connectivity window") {
  const double n = std::exp(std::exp(1.0));
  const auto [lo, hi] = conn_window(n);
  CHECK(lo == static_cast<std::uint64_t>(std::floor(0.5 * n * (std::log(n) - 1))));
  CHECK(hi == static_cast<std::uint64_t>(std::ceil(0.5 * n * (std::log(n) + 1))));
  // Direct evaluation: 5000 * (ln 1e4 - ln ln 1e4) = 34950.1...
  CHECK(conn_window(1e4).first == 34950);
  CHECK(conn_window(1e4).second == 57154);
  for (double m = 3; m < 2000; m *= 1.7) CHECK(conn_window(m).first < conn_window(m).second);
  CHECK_THROWS_AS(conn_window(2), std::invalid_argument);
}

TEST_CASE("stream dump round trip") {
  TupleStream ts = TupleStream::generate(7, 2, 42);
  std::stringstream buffer;
  write_stream(buffer, ts);
  std::string header;
  std::getline(buffer, header);
  CHECK(header == "7 2 42");
  buffer.seekg(0);
  TupleStream back = read_stream(buffer);
  for (std::size_t j = 0; j < 2; ++j) {
    const auto a = ts.prefix(j, ts.total());
    const auto b = back.prefix(j, back.total());
    CHECK(std::equal(a.begin(), a.end(), b.begin()));
  }
}
