#include "mtlab/tuple_stream.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace mtlab {

namespace {
// Rows with at most this many edges shuffle a dense array.
constexpr std::uint64_t kDenseLimit = std::uint64_t{1} << 22;
}  // namespace

EdgeIndexer::EdgeIndexer(std::size_t n) : n_(n), offsets_(n + 1, 0) {
  for (std::size_t u = 0; u < n; ++u) offsets_[u + 1] = offsets_[u] + (n - 1 - u);
}

EdgeId EdgeIndexer::rank(Edge e) const {
  if (e.v >= n_ || e.u >= e.v) throw std::invalid_argument("edge not canonical for this n");
  return offsets_[e.u] + (e.v - e.u - 1);
}

Edge EdgeIndexer::unrank(EdgeId id) const {
  if (id >= offsets_[n_]) throw std::invalid_argument("edge id out of range");
  const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), id);
  const auto u = static_cast<Vertex>(it - offsets_.begin() - 1);
  return Edge{u, static_cast<Vertex>(u + 1 + (id - offsets_[u]))};
}

TupleStream TupleStream::generate(std::size_t n, std::size_t s, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("tuple stream needs n >= 2");
  if (s < 1) throw std::invalid_argument("tuple stream needs s >= 1");
  TupleStream ts(n, seed);
  ts.rows_.resize(s);
  for (std::size_t j = 0; j < s; ++j) {
    ts.rows_[j].rng.seed(mix_seed(seed, j));
    ts.rows_[j].use_sparse = ts.total_ > kDenseLimit;
  }
  return ts;
}

TupleStream TupleStream::from_rows(std::size_t n, std::vector<std::vector<Edge>> rows,
                                   std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("tuple stream needs n >= 2");
  if (rows.empty()) throw std::invalid_argument("tuple stream needs s >= 1");
  TupleStream ts(n, seed);
  for (auto& edges : rows) {
    if (edges.size() != ts.total_) throw std::invalid_argument("row is not a permutation of E(K_n)");
    std::vector<char> seen(ts.total_, 0);
    for (Edge& e : edges) {
      e = Edge::make(e.u, e.v);
      const EdgeId id = ts.indexer_.rank(e);
      if (seen[id]) throw std::invalid_argument("row repeats an edge");
      seen[id] = 1;
    }
    Row row;
    row.out = std::move(edges);
    row.explicit_row = true;
    ts.rows_.push_back(std::move(row));
  }
  return ts;
}

void TupleStream::set_sparse_backing(bool sparse) {
  for (Row& row : rows_) {
    if (!row.explicit_row && row.out.empty()) row.use_sparse = sparse;
  }
}

void TupleStream::extend(Row& row, std::size_t m) {
  if (row.out.size() >= m) return;
  if (m > total_) throw std::invalid_argument("prefix longer than N");
  if (!row.use_sparse && row.dense.empty()) {
    row.dense.resize(total_);
    for (EdgeId i = 0; i < total_; ++i) row.dense[i] = i;
  }
  // Grow geometrically so repeated small extensions stay amortized.
  const std::size_t target = std::min<std::uint64_t>(total_, std::max<std::size_t>(m, 2 * row.out.size()));
  row.out.reserve(target);
  for (std::size_t i = row.out.size(); i < target; ++i) {
    const EdgeId r = i + uniform_below(row.rng, total_ - i);
    EdgeId chosen;
    if (row.use_sparse) {
      auto at = [&](EdgeId p) {
        auto it = row.sparse.find(p);
        return it == row.sparse.end() ? p : it->second;
      };
      chosen = at(r);
      const EdgeId displaced = at(i);
      row.sparse[r] = displaced;
      row.sparse.erase(i);
    } else {
      std::swap(row.dense[i], row.dense[r]);
      chosen = row.dense[i];
    }
    row.out.push_back(indexer_.unrank(chosen));
  }
  if (row.out.size() == total_) {
    row.dense = {};
    row.sparse = {};
  }
}

const Edge& TupleStream::edge(std::size_t j, std::size_t i) {
  if (j >= rows_.size()) throw std::invalid_argument("row index out of range");
  extend(rows_[j], i + 1);
  return rows_[j].out[i];
}

std::span<const Edge> TupleStream::prefix(std::size_t j, std::size_t m) {
  if (j >= rows_.size()) throw std::invalid_argument("row index out of range");
  extend(rows_[j], m);
  return {rows_[j].out.data(), m};
}

void TupleStream::ensure(std::size_t m) {
  for (Row& row : rows_) extend(row, m);
}

std::size_t TupleStream::available() const {
  std::size_t m = total_;
  for (const Row& row : rows_) m = std::min(m, row.out.size());
  return m;
}

Graph prefix_graph(TupleStream& ts, std::size_t j, std::size_t m) {
  if (m > ts.total()) throw std::invalid_argument("prefix longer than N");
  const auto edges = ts.prefix(j, m);
  return Graph(ts.n(), std::vector<Edge>(edges.begin(), edges.end()));
}

std::size_t HittingTimes::max_connect() const {
  return connect.empty() ? 0 : *std::max_element(connect.begin(), connect.end());
}

HittingTimes connectivity_hitting_times(TupleStream& ts) {
  const std::size_t n = ts.n();
  HittingTimes out;
  for (std::size_t j = 0; j < ts.s(); ++j) {
    DisjointSets ds(n);
    std::vector<std::uint32_t> degree(n, 0);
    std::size_t isolated = n;
    std::size_t d_time = 0;
    std::size_t m = 0;
    while (ds.component_count() > 1) {
      const Edge e = ts.edge(j, m++);
      ds.unite(e);
      for (Vertex v : {e.u, e.v}) {
        if (degree[v]++ == 0) --isolated;
      }
      if (isolated == 0 && d_time == 0) d_time = m;
    }
    out.connect.push_back(m);
    out.min_degree.push_back(d_time);
  }
  return out;
}

std::pair<std::uint64_t, std::uint64_t> conn_window(double n) {
  if (!(n >= 3)) throw std::invalid_argument("connectivity window needs n >= 3");
  const double ln = std::log(n);
  const double lnln = std::log(ln);
  const double lo = std::floor(0.5 * n * (ln - lnln));
  const double hi = std::ceil(0.5 * n * (ln + lnln));
  return {static_cast<std::uint64_t>(lo), static_cast<std::uint64_t>(hi)};
}

void write_stream(std::ostream& os, TupleStream& ts) {
  ts.ensure(ts.total());
  os << ts.n() << ' ' << ts.s() << ' ' << ts.seed() << '\n';
  for (std::size_t j = 0; j < ts.s(); ++j) {
    const auto row = ts.prefix(j, ts.total());
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << ' ';
      os << ts.indexer().rank(row[i]);
    }
    os << '\n';
  }
}

TupleStream read_stream(std::istream& is) {
  std::size_t n = 0;
  std::size_t s = 0;
  std::uint64_t seed = 0;
  if (!(is >> n >> s >> seed)) throw std::invalid_argument("bad stream header");
  if (n < 2 || s < 1) throw std::invalid_argument("bad stream header values");
  EdgeIndexer indexer(n);
  const std::uint64_t total = pair_count(n);
  std::vector<std::vector<Edge>> rows(s);
  for (auto& row : rows) {
    row.reserve(total);
    for (std::uint64_t i = 0; i < total; ++i) {
      EdgeId id = 0;
      if (!(is >> id)) throw std::invalid_argument("truncated stream row");
      row.push_back(indexer.unrank(id));
    }
  }
  return TupleStream::from_rows(n, std::move(rows), seed);
}

}  // namespace mtlab
