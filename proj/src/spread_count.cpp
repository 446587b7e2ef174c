#include "mtlab/spread_count.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <set>

namespace mtlab {

namespace {

BigInt factorial(std::size_t k) {
  BigInt f = 1;
  for (std::size_t i = 2; i <= k; ++i) f *= i;
  return f;
}

BigInt power(BigInt base, std::size_t e) {
  BigInt r = 1;
  for (std::size_t i = 0; i < e; ++i) r *= base;
  return r;
}

}  // namespace

MatchingUniverse::MatchingUniverse(std::vector<std::vector<std::uint32_t>> sizes)
    : n0_(sizes.empty() ? 0 : sizes.front().size()), sizes_(std::move(sizes)) {
  if (sizes_.empty()) throw std::invalid_argument("matching universe needs s >= 1");
  for (const auto& row : sizes_) {
    if (row.size() != n0_) throw std::invalid_argument("every coordinate needs n0 tree sizes");
    for (std::uint32_t t : row) {
      if (t == 0) throw std::invalid_argument("small trees are nonempty");
    }
  }
  tree_of_.resize(sizes_.size());
  for (std::size_t j = 0; j < sizes_.size(); ++j) {
    for (std::uint32_t i = 0; i < n0_; ++i) tree_of_[j].insert(tree_of_[j].end(), sizes_[j][i], i);
  }
}

MatchingUniverse MatchingUniverse::uniform(std::size_t n0, std::size_t s, std::uint32_t size) {
  return MatchingUniverse(std::vector<std::vector<std::uint32_t>>(s, std::vector<std::uint32_t>(n0, size)));
}

BigInt MatchingUniverse::ground_size() const {
  BigInt x = 1;
  for (std::size_t j = 0; j < coordinates(); ++j) x *= side_size(j);
  return x;
}

BigInt count_inducing_matchings(const MatchingUniverse& u) {
  const std::size_t s = u.coordinates();
  BigInt count = power(factorial(u.small_count()), s - 1);
  for (std::size_t j = 0; j < s; ++j) {
    for (std::size_t i = 0; i < u.small_count(); ++i) count *= u.tree_size(i, j);
  }
  return count;
}

namespace {

// Matchings are built tree by tree in coordinate 0; for tree i the tuple's
// other coordinates range over every vertex of a tree not yet used.
class MatchingWalker {
 public:
  MatchingWalker(const MatchingUniverse& u, const std::function<void(const InducingMatching&)>& visit)
      : u_(u), visit_(visit), used_(u.coordinates(), std::vector<char>(u.small_count(), 0)),
        current_(u.small_count(), XTuple(u.coordinates(), 0)) {}

  std::uint64_t run() {
    tree(0);
    return visited_;
  }

 private:
  void tree(std::size_t i) {
    if (i == u_.small_count()) {
      ++visited_;
      if (visit_) visit_(current_);
      return;
    }
    for (std::uint32_t v = 0; v < u_.side_size(0); ++v) {
      if (u_.tree_of(0, v) != i) continue;
      current_[i][0] = v;
      coordinate(i, 1);
    }
  }

  void coordinate(std::size_t i, std::size_t j) {
    if (j == u_.coordinates()) {
      tree(i + 1);
      return;
    }
    for (std::uint32_t v = 0; v < u_.side_size(j); ++v) {
      const std::uint32_t t = u_.tree_of(j, v);
      if (used_[j][t]) continue;
      used_[j][t] = 1;
      current_[i][j] = v;
      coordinate(i, j + 1);
      used_[j][t] = 0;
    }
  }

  const MatchingUniverse& u_;
  const std::function<void(const InducingMatching&)>& visit_;
  std::vector<std::vector<char>> used_;
  InducingMatching current_;
  std::uint64_t visited_ = 0;
};

}  // namespace

std::uint64_t for_each_inducing_matching(const MatchingUniverse& u,
                                         const std::function<void(const InducingMatching&)>& visit) {
  return MatchingWalker(u, visit).run();
}

std::vector<InducingMatching> enumerate_inducing_matchings(const MatchingUniverse& u,
                                                           std::uint64_t guard) {
  const BigInt count = count_inducing_matchings(u);
  if (count > guard) throw EnumerationGuard(count);
  std::vector<InducingMatching> out;
  for_each_inducing_matching(u, [&](const InducingMatching& m) { out.push_back(m); });
  return out;
}

BigInt upset_count(const MatchingUniverse& u, std::span<const XTuple> subset) {
  const std::size_t s = u.coordinates();
  std::set<XTuple> distinct;
  for (const XTuple& t : subset) {
    if (t.size() != s) throw std::invalid_argument("tuple arity differs from s");
    for (std::size_t j = 0; j < s; ++j) {
      if (t[j] >= u.side_size(j)) throw std::invalid_argument("tuple vertex out of range");
    }
    distinct.insert(t);
  }
  const std::size_t k = distinct.size();
  if (k > u.small_count()) return 0;
  std::vector<std::vector<char>> used(s, std::vector<char>(u.small_count(), 0));
  for (const XTuple& t : distinct) {
    for (std::size_t j = 0; j < s; ++j) {
      char& flag = used[j][u.tree_of(j, t[j])];
      if (flag) return 0;
      flag = 1;
    }
  }
  BigInt count = power(factorial(u.small_count() - k), s - 1);
  for (std::size_t j = 0; j < s; ++j) {
    for (std::size_t i = 0; i < u.small_count(); ++i) {
      if (!used[j][i]) count *= u.tree_size(i, j);
    }
  }
  return count;
}

namespace {

class SpreadWalker {
 public:
  SpreadWalker(const MatchingUniverse& u, const Rational& kappa, std::size_t max_k, SpreadReport& report)
      : u_(u), kappa_(kappa), max_k_(max_k), report_(report), total_(count_inducing_matchings(u)),
        used_(u.coordinates(), std::vector<char>(u.small_count(), 0)) {
    const std::size_t s = u.coordinates();
    if (u.small_count() == 0) return;
    std::vector<std::uint32_t> idx(s, 0);
    // Enumerate X lexicographically.
    for (;;) {
      ground_.push_back(idx);
      std::size_t j = s;
      while (j-- > 0) {
        if (++idx[j] < u.side_size(j)) break;
        idx[j] = 0;
        if (j == 0) return;
      }
    }
  }

  void run() {
    if (u_.small_count() == 0) return;
    extend(0);
  }

 private:
  void extend(std::size_t from) {
    for (std::size_t x = from; x < ground_.size(); ++x) {
      const XTuple& t = ground_[x];
      bool free = true;
      for (std::size_t j = 0; j < t.size() && free; ++j) free = !used_[j][u_.tree_of(j, t[j])];
      if (!free) continue;
      for (std::size_t j = 0; j < t.size(); ++j) used_[j][u_.tree_of(j, t[j])] = 1;
      chosen_.push_back(t);
      evaluate();
      if (chosen_.size() < max_k_) extend(x + 1);
      chosen_.pop_back();
      for (std::size_t j = 0; j < t.size(); ++j) used_[j][u_.tree_of(j, t[j])] = 0;
    }
  }

  void evaluate() {
    const std::size_t k = chosen_.size();
    const BigInt upset = upset_count(u_, chosen_);
    const BigInt lhs = upset * power(kappa_.num, k);
    const BigInt rhs = total_ * power(kappa_.den, k);
    ++report_.sets_checked;
    if (lhs > rhs) report_.pass = false;
    const double ratio =
        boost::multiprecision::cpp_rational(lhs, rhs).convert_to<double>();
    if (ratio > report_.max_ratio) {
      report_.max_ratio = ratio;
      report_.worst = chosen_;
    }
  }

  const MatchingUniverse& u_;
  const Rational& kappa_;
  std::size_t max_k_;
  SpreadReport& report_;
  BigInt total_;
  std::vector<std::vector<char>> used_;
  std::vector<XTuple> ground_;
  std::vector<XTuple> chosen_;
};

}  // namespace

SpreadReport spread_check(const MatchingUniverse& u, const Rational& kappa, std::size_t max_k) {
  if (kappa.num <= 0 || kappa.den <= 0) throw std::invalid_argument("kappa must be positive");
  SpreadReport report;
  SpreadWalker(u, kappa, max_k, report).run();
  return report;
}

Rational default_spread_kappa(std::size_t n0, std::size_t s) {
  return {power(BigInt(n0), s - 1), power(BigInt(3), s - 1)};
}

double fknp_bound(double r, double x_size, double kappa, double c) {
  if (!(r >= 2) || !(kappa > 0) || !(c > 0)) throw std::invalid_argument("fknp bound needs r >= 2, kappa > 0, C > 0");
  // Snap values within rounding noise of an integer before taking the ceiling.
  const double v = c * std::log(r) * x_size / kappa;
  const double nearest = std::round(v);
  if (std::abs(v - nearest) <= 1e-12 * std::max(1.0, std::abs(v))) return nearest;
  return std::ceil(v);
}

}  // namespace mtlab
