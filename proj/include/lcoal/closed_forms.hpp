#pragma once

#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "lcoal/numeric.hpp"

namespace lcoal {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

Rational harmonic_exact(int n);

// Normalized unsigned Stirling numbers of the first kind: r[i][k] = s(i,k)/i!
// built by the unit-scale recurrence
//   r[i+1][k] = i/(i+1) r[i][k] + 1/(i+1) r[i][k-1].
// Raw s(i,k) overflow doubles near i = 170; the ratios live in [0,1] and are
// what every downstream formula actually consumes. The optional exact table
// stores the integers themselves (capped; they grow like i!).
class StirlingRatioTable {
 public:
  explicit StirlingRatioTable(int n_max, bool exact = false, int exact_cap = 200);

  int n_max() const { return n_max_; }
  bool exact() const { return exact_; }
  double r(int i, int k) const;           // 0 <= k <= i <= n_max
  const BigInt& s_exact(int i, int k) const;

 private:
  std::size_t index(int i, int k) const { return static_cast<std::size_t>(i) * (i + 1) / 2 + k; }
  int n_max_;
  bool exact_;
  std::vector<double> r_;
  std::vector<BigInt> s_;
};

// Bolthausen-Sznitman exact first and second joint moments of the external
// branch lengths,
//   E(tau_{n,1})          = sum_{k=1}^{n-1} r[n-1][k]/k,
//   E(tau_{n,1} tau_{n,2}) = 2/(n-1) sum_{k=1}^{n-1} (2^k - 1)/k^2 r[n-2][k-1].
// The 2^k growth is absorbed by carrying q[i][k] = 2^{k+1} r[i][k] through
// the same recurrence (sum_k q[i][k] = 2(i+1)), so nothing overflows for any
// practical n. Evaluation uses rolling rows: O(n^2) time, O(n) memory.
double bs_mean_exact(int n);
double bs_pair_exact(int n);

struct BsExactMoments {
  double mean;
  double pair;
};
// One O(n_max^2) sweep producing values for every n in [2, n_max];
// index [n] is valid for n >= 2.
std::vector<BsExactMoments> bs_exact_sweep(int n_max);

// Same quantities as exact rationals (needs the exact Stirling table; n is
// capped accordingly).
Rational bs_mean_exact_rational(int n, const StirlingRatioTable& table);
Rational bs_pair_exact_rational(int n, const StirlingRatioTable& table);

// Kingman marginal moment E(tau_{n,1}^k) by the one-dimensional recursion
//   mu_n(k) = 2k/(n(n-1)) sum_{m=2}^n mu_m(k-1).
double kingman_marginal(int n, int k);

// E(tau_{n,1} tau_{n,2}) for Kingman: 4(n^2-5n+4h_n)/(n(n-1)^2(n-2)) for
// n >= 3, and 2 at n = 2.
double kingman_pair(int n);

// Star-shaped coalescent: every joint moment is (k_1+...+k_j)!.
double star_moment(std::span<const int> exponents);
BigInt star_moment_exact(std::span<const int> exponents);

// Bolthausen-Sznitman large-n laws: mu_n(k) ~ prod k_i! / (log n)^d and
// E((L_n^ext)^k) ~ (n/log n)^k.
double bs_joint_asymptotic(std::span<const int> exponents, double n);
double bs_total_asymptotic(int k, double n);

// Two-term Kingman second-moment expansion 8 log(n)/n^2 + 8(gamma-1)/n^2.
double kingman_second_moment_expansion(int n);

}  // namespace lcoal
