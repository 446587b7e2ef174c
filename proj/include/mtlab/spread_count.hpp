#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace mtlab {

using BigInt = boost::multiprecision::cpp_int;

/// Small trees T_{i,j} of sizes t_{i,j}, i in [n0], j in [s]. The vertices of
/// coordinate j are numbered 0 .. sum_i t_{i,j} - 1, tree by tree.
/// An element of X picks one such vertex per coordinate.
class MatchingUniverse {
 public:
  /// sizes[j][i] = t_{i,j}; every row has n0 entries, all positive.
  explicit MatchingUniverse(std::vector<std::vector<std::uint32_t>> sizes);
  /// All trees of size 1.
  static MatchingUniverse uniform(std::size_t n0, std::size_t s, std::uint32_t size = 1);

  std::size_t small_count() const { return n0_; }
  std::size_t coordinates() const { return sizes_.size(); }
  std::uint32_t tree_size(std::size_t i, std::size_t j) const { return sizes_[j][i]; }
  std::size_t side_size(std::size_t j) const { return tree_of_[j].size(); }
  std::uint32_t tree_of(std::size_t j, std::uint32_t vertex) const { return tree_of_[j][vertex]; }
  /// |X| = prod_j sum_i t_{i,j}.
  BigInt ground_size() const;

 private:
  std::size_t n0_;
  std::vector<std::vector<std::uint32_t>> sizes_;
  std::vector<std::vector<std::uint32_t>> tree_of_;
};

using XTuple = std::vector<std::uint32_t>;  // one vertex per coordinate
using InducingMatching = std::vector<XTuple>;

/// |H| = n0!^{s-1} prod_{i,j} t_{i,j}.
BigInt count_inducing_matchings(const MatchingUniverse& u);

/// Visits every MultiTree inducing matching once, tuples ordered by their
/// coordinate-0 tree. Returns the number visited.
std::uint64_t for_each_inducing_matching(const MatchingUniverse& u,
                                         const std::function<void(const InducingMatching&)>& visit);

class EnumerationGuard : public std::runtime_error {
 public:
  explicit EnumerationGuard(BigInt count)
      : std::runtime_error("enumeration refused: " + count.str() + " matchings"),
        count_(std::move(count)) {}
  const BigInt& count() const { return count_; }

 private:
  BigInt count_;
};

/// Full list; throws EnumerationGuard when |H| exceeds `guard`.
std::vector<InducingMatching> enumerate_inducing_matchings(const MatchingUniverse& u,
                                                           std::uint64_t guard = 1'000'000);

/// |H ∩ <S>| = (n0-k)!^{s-1} prod_j prod_{i not in S_j} t_{i,j} for S whose
/// tuples use distinct trees in every coordinate; 0 otherwise.
BigInt upset_count(const MatchingUniverse& u, std::span<const XTuple> subset);

struct Rational {
  BigInt num = 1;
  BigInt den = 1;
};

struct SpreadReport {
  bool pass = true;
  double max_ratio = 0.0;  // max |H ∩ <S>| kappa^{|S|} / |H| over 1 <= |S| <= max_k
  std::vector<XTuple> worst;
  std::uint64_t sets_checked = 0;
};

/// Checks |H ∩ <S>| kappa^{|S|} <= |H| for every S ⊆ X with 1 <= |S| <= max_k
/// exactly. Sets with a tree collision contribute 0 and are skipped.
SpreadReport spread_check(const MatchingUniverse& u, const Rational& kappa, std::size_t max_k = 3);

/// kappa = (n0/3)^{s-1} as an exact rational.
Rational default_spread_kappa(std::size_t n0, std::size_t s);

/// ceil(C ln r |X| / kappa).
double fknp_bound(double r, double x_size, double kappa, double c);

}  // namespace mtlab
