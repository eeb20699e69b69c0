#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <vector>

#include "lcoal/closed_forms.hpp"
#include "lcoal/errors.hpp"

using namespace lcoal;

namespace {

// Oracle: s(i,k) counts permutations of i elements with k cycles. Enumerate
// them outright for small i.
long stirling_brute(int i, int k) {
  std::vector<int> perm(i);
  std::iota(perm.begin(), perm.end(), 0);
  long count = 0;
  do {
    std::vector<bool> seen(i, false);
    int cycles = 0;
    for (int start = 0; start < i; ++start) {
      if (seen[start]) continue;
      ++cycles;
      for (int p = start; !seen[p]; p = perm[p]) seen[p] = true;
    }
    if (cycles == k) ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return count;
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

TEST_CASE("harmonic numbers") {
  CHECK(harmonic(1) == 1.0);
  CHECK(harmonic(3) == doctest::Approx(11.0 / 6.0).epsilon(1e-15));
  // direct summation oracle
  double h100 = 0.0;
  for (int i = 100; i >= 1; --i) h100 += 1.0 / i;
  CHECK(harmonic(100) == doctest::Approx(h100).epsilon(1e-14));
  CHECK(harmonic(100) == doctest::Approx(5.187377517639621).epsilon(1e-14));
  CHECK(harmonic_exact(3) == Rational(11, 6));
  CHECK(harmonic_exact(1) == 1);
}

TEST_CASE("stirling ratios match brute-force cycle counts") {
  StirlingRatioTable table(7, /*exact=*/true);
  for (int i = 0; i <= 7; ++i) {
    for (int k = 0; k <= i; ++k) {
      long brute = (i == 0 && k == 0) ? 1 : stirling_brute(i, k);
      CHECK(table.s_exact(i, k) == brute);
      CHECK(table.r(i, k) == doctest::Approx(brute / factorial(i)).epsilon(1e-14));
    }
  }
  CHECK(table.s_exact(3, 2) == 3);
  CHECK(table.r(3, 2) == doctest::Approx(0.5).epsilon(1e-15));
  // s(4,2) from the recurrence applied to the i=3 row by hand
  CHECK(table.s_exact(4, 2) == 3 * 3 + 2);
}

TEST_CASE("stirling ratio table invariants") {
  StirlingRatioTable table(60);
  CHECK(table.r(0, 0) == 1.0);
  for (int i = 1; i <= 60; ++i) {
    CHECK(table.r(i, 0) == 0.0);
    CHECK(table.r(i, i) == doctest::Approx(1.0 / factorial(i)).epsilon(1e-12));
    KahanSum row;
    for (int k = 0; k <= i; ++k) {
      CHECK(table.r(i, k) >= 0.0);
      CHECK(table.r(i, k) <= 1.0);
      row.add(table.r(i, k));
    }
    CHECK(row.value() == doctest::Approx(1.0).epsilon(1e-12));
  }
  // the normalized recurrence itself
  for (int i : {4, 17, 41}) {
    for (int k = 1; k <= i; ++k) {
      double expect = i / (i + 1.0) * table.r(i, k) + 1.0 / (i + 1.0) * table.r(i, k - 1);
      CHECK(table.r(i + 1, k) == doctest::Approx(expect).epsilon(1e-14));
    }
  }
}

TEST_CASE("exact stirling rows sum to i!") {
  StirlingRatioTable table(30, /*exact=*/true);
  BigInt fact = 1;
  for (int i = 1; i <= 30; ++i) {
    fact *= i;
    BigInt row = 0;
    for (int k = 0; k <= i; ++k) row += table.s_exact(i, k);
    CHECK(row == fact);
  }
}

TEST_CASE("exact stirling table respects its cap") {
  CHECK_THROWS_AS(StirlingRatioTable(300, /*exact=*/true), ResourceError);
  CHECK_NOTHROW(StirlingRatioTable(300, /*exact=*/true, /*exact_cap=*/400));
}

TEST_CASE("bolthausen-sznitman exact mean") {
  CHECK(bs_mean_exact(2) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(bs_mean_exact(3) == doctest::Approx(0.75).epsilon(1e-15));
  // n=5: (1/4!)(s(4,1)/1 + s(4,2)/2 + s(4,3)/3 + s(4,4)/4) = (6+5.5+2+0.25)/24
  CHECK(bs_mean_exact(5) == doctest::Approx((6.0 + 5.5 + 2.0 + 0.25) / 24.0).epsilon(1e-14));
  CHECK(std::fabs(bs_mean_exact(4) - 0.638889) <= 5e-7);
  CHECK(std::fabs(bs_mean_exact(10) - 0.431647) <= 5e-7);
  CHECK(std::fabs(bs_mean_exact(100) - 0.228368) <= 5e-7);
  CHECK_THROWS_AS(bs_mean_exact(1), ValidationError);
}

TEST_CASE("bolthausen-sznitman exact pair moment") {
  CHECK(bs_pair_exact(2) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(bs_pair_exact(3) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(std::fabs(bs_pair_exact(10) - 0.215119) <= 5e-7);
  CHECK(std::fabs(bs_pair_exact(100) - 0.057067) <= 5e-7);
}

TEST_CASE("float and rational stirling routes agree") {
  StirlingRatioTable table(110, /*exact=*/true);
  for (int n = 2; n <= 100; n += (n < 12 ? 1 : 7)) {
    double mean_r = static_cast<double>(bs_mean_exact_rational(n, table));
    double pair_r = static_cast<double>(bs_pair_exact_rational(n, table));
    CHECK(bs_mean_exact(n) == doctest::Approx(mean_r).epsilon(1e-12));
    CHECK(bs_pair_exact(n) == doctest::Approx(pair_r).epsilon(1e-12));
  }
}

TEST_CASE("bs sweep matches pointwise evaluation") {
  auto sweep = bs_exact_sweep(150);
  for (int n : {2, 3, 17, 64, 149, 150}) {
    CHECK(sweep[n].mean == doctest::Approx(bs_mean_exact(n)).epsilon(1e-14));
    CHECK(sweep[n].pair == doctest::Approx(bs_pair_exact(n)).epsilon(1e-14));
  }
}

TEST_CASE("bs pair stays in range at n = 10^4 (normalized mode)") {
  double v = bs_pair_exact(10000);
  CHECK(std::isfinite(v));
  CHECK(v > 0.0);
  CHECK(v < bs_pair_exact(100));
}

TEST_CASE("bs exact mean is non-increasing in n") {
  auto sweep = bs_exact_sweep(300);
  for (int n = 2; n < 300; ++n) CHECK(sweep[n].mean >= sweep[n + 1].mean);
}

TEST_CASE("kingman marginal moments") {
  for (int n = 2; n <= 200; ++n) {
    CHECK(kingman_marginal(n, 1) == doctest::Approx(2.0 / n).epsilon(1e-12));
    double hn = harmonic(n);
    CHECK(kingman_marginal(n, 2) ==
          doctest::Approx(8.0 * (hn - 1.0) / (static_cast<double>(n) * (n - 1))).epsilon(1e-12));
    CHECK(kingman_marginal(n, 3) ==
          doctest::Approx(48.0 / (static_cast<double>(n) * (n - 1)) * (1.0 - hn / n))
              .epsilon(1e-12));
  }
  // h_5 = 137/60, mu_5(2) = 8(h_5-1)/20
  CHECK(kingman_marginal(5, 2) == doctest::Approx(8.0 * (137.0 / 60.0 - 1.0) / 20.0).epsilon(1e-14));
  CHECK(std::fabs(kingman_marginal(5, 2) - 0.513333) <= 5e-7);
  // h_4 = 25/12, mu_4(3) = 4(1 - h_4/4) = 23/12
  CHECK(kingman_marginal(4, 3) == doctest::Approx(23.0 / 12.0).epsilon(1e-14));
  CHECK(kingman_marginal(10, 1) == doctest::Approx(0.2).epsilon(1e-14));
}

TEST_CASE("kingman fourth moment equals its summation form") {
  // 384/(n(n-1)) sum_{m=2}^n (1 - h_m/m)/(m(m-1)), summed independently.
  for (int n : {4, 10, 50, 100, 200}) {
    KahanSum s;
    double hm = 1.0;
    for (int m = 2; m <= n; ++m) {
      hm += 1.0 / m;
      s.add((1.0 - hm / m) / (static_cast<double>(m) * (m - 1)));
    }
    double expect = 384.0 / (static_cast<double>(n) * (n - 1)) * s.value();
    CHECK(kingman_marginal(n, 4) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("kingman pair moment") {
  CHECK(kingman_pair(2) == 2.0);
  CHECK(kingman_pair(3) == doctest::Approx(4.0 / 9.0).epsilon(1e-14));
  CHECK(std::fabs(kingman_pair(4) - 0.240741) <= 5e-7);
  CHECK(std::fabs(kingman_pair(5) - 0.152222) <= 5e-7);
  CHECK(std::fabs(kingman_pair(100) - 0.000396) <= 5e-7);
}

TEST_CASE("covariance signs from the closed forms") {
  auto sweep = bs_exact_sweep(200);
  for (int n = 2; n <= 200; ++n) {
    CHECK(sweep[n].pair - sweep[n].mean * sweep[n].mean > 0.0);
  }
  CHECK(std::fabs(kingman_pair(3) - (2.0 / 3.0) * (2.0 / 3.0)) <= 1e-12);
  for (int n = 4; n <= 200; ++n) {
    CHECK(kingman_pair(n) - (2.0 / n) * (2.0 / n) < 0.0);
  }
}

TEST_CASE("harmonic identity sum_(h_m - 1)/(m(m-1)) = 1 - h_n/n") {
  KahanSum lhs;
  double hm = 1.0;
  double worst = 0.0;
  for (int m = 2; m <= 10000; ++m) {
    hm += 1.0 / m;
    lhs.add((hm - 1.0) / (static_cast<double>(m) * (m - 1)));
    worst = std::max(worst, std::fabs(lhs.value() - (1.0 - hm / m)));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("star moments are order factorials") {
  CHECK(star_moment(std::array{1}) == 1.0);
  CHECK(star_moment(std::array{2, 1}) == 6.0);
  CHECK(star_moment(std::array{1, 1, 1, 1}) == 24.0);
  CHECK(star_moment_exact(std::array{3, 2, 1}) == 720);
  CHECK_THROWS_AS(star_moment(std::span<const int>{}), ValidationError);
}

TEST_CASE("bs joint asymptotic law") {
  double n = std::exp(10.0);
  CHECK(bs_joint_asymptotic(std::array{1}, n) == doctest::Approx(0.1).epsilon(1e-9));
  double l100 = std::log(100.0);
  CHECK(bs_joint_asymptotic(std::array{1, 1}, 100.0) ==
        doctest::Approx(1.0 / (l100 * l100)).epsilon(1e-14));
  CHECK(bs_joint_asymptotic(std::array{2}, 100.0) ==
        doctest::Approx(2.0 / (l100 * l100)).epsilon(1e-14));
  CHECK_THROWS_AS(bs_joint_asymptotic(std::array{1}, 2.0), ValidationError);
}

TEST_CASE("bs total-length asymptotic law") {
  double l100 = std::log(100.0);
  CHECK(bs_total_asymptotic(1, 100.0) == doctest::Approx(100.0 / l100).epsilon(1e-14));
  CHECK(bs_total_asymptotic(2, 100.0) ==
        doctest::Approx((100.0 / l100) * (100.0 / l100)).epsilon(1e-14));
  CHECK_THROWS_AS(bs_total_asymptotic(0, 100.0), ValidationError);
  CHECK_THROWS_AS(bs_total_asymptotic(500, 1e12), NumericalError);
}

TEST_CASE("kingman second-moment expansion") {
  double expect = 8.0 * std::log(1000.0) / 1e6 + 8.0 * (kEulerGamma - 1.0) / 1e6;
  CHECK(kingman_second_moment_expansion(1000) == doctest::Approx(expect).epsilon(1e-14));
  CHECK(std::isfinite(kingman_second_moment_expansion(2)));
  // scaled residual against the exact second moment stays bounded
  for (int n : {1000, 3163, 10000}) {
    double exact = kingman_marginal(n, 2);
    double resid = std::fabs(exact - kingman_second_moment_expansion(n));
    CHECK(resid * std::pow(n, 3) / std::log(static_cast<double>(n)) <= 50.0);
  }
}
