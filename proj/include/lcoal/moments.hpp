#pragma once

#include <iosfwd>
#include <span>
#include <unordered_map>
#include <vector>

#include "lcoal/exact.hpp"
#include "lcoal/rates.hpp"

namespace lcoal {

// Canonical identity of a joint moment mu_n(k_1,...,k_j): zero exponents
// dropped, remainder sorted non-increasing. The external branch lengths are
// exchangeable, so the moment depends only on this multiset.
struct MomentKey {
  int n = 0;
  std::vector<int> exponents;  // positive, non-increasing

  int j() const { return static_cast<int>(exponents.size()); }
  int order() const;
  bool operator==(const MomentKey&) const = default;
};

MomentKey canonical_key(int n, std::span<const int> raw_exponents);

struct ExponentsHash {
  std::size_t operator()(const std::vector<int>& v) const;
};

// Joint moments of the external branch lengths via the order-by-order
// recursion
//   mu_n(k) = 1/g_n sum_i k_i mu_n(k - e_i)
//           + sum_{m=j+1}^{n-1} p_{nm} (m-1)_j/(n)_j mu_m(k),
// evaluated bottom-up (order ascending, n ascending) against one immutable
// RateTable. Every value is cached; recomputation is reproducible. An engine
// is one evaluation session and is not thread-safe; any number of engines
// may share the same table.
class MomentEngine {
 public:
  explicit MomentEngine(const RateTable& table) : table_(&table) {}

  double moment(const MomentKey& key);
  double moment(int n, std::span<const int> raw_exponents);

  // Cov(tau_{n,1}, tau_{n,2}) = mu_n(1,1) - mu_n(1)^2
  double covariance_pair(int n);

  // E((L_n^ext)^k) = sum_{j<=k} C(n,j) sum_{compositions of k into j parts}
  // k!/(k_1!...k_j!) mu_n(k), enumerated by integer partitions with
  // multiplicity counting (compositions of the same partition share mu_n).
  double total_external_moment(int n, int k);

  const RateTable& table() const { return *table_; }

  // CSV row "n,k,value" with k joined by '+': e.g. 10,2+1,0.0123
  void write_csv_row(std::ostream& os, const MomentKey& key);

 private:
  // values_[k][n] = mu_n(k); rows grow as larger n are requested.
  const RateTable* table_;
  std::unordered_map<std::vector<int>, std::vector<double>, ExponentsHash> values_;

  void ensure(const std::vector<int>& exponents, int n);
  const std::vector<double>& computed_row(const std::vector<int>& exponents) const;
};

// Same recursion over exact rational rates (presets only). Used to pin the
// float engine and the star factorial law without any rounding.
class ExactMomentEngine {
 public:
  explicit ExactMomentEngine(const ExactRateTable& table) : table_(&table) {}

  Rational moment(const MomentKey& key);
  Rational moment(int n, std::span<const int> raw_exponents);

 private:
  const ExactRateTable* table_;
  std::unordered_map<std::vector<int>, std::vector<Rational>, ExponentsHash> values_;

  void ensure(const std::vector<int>& exponents, int n);
};

// All partitions of k (non-increasing parts), used by the total-length
// moment and by tests that enumerate compositions independently.
std::vector<std::vector<int>> integer_partitions(int k);

}  // namespace lcoal
