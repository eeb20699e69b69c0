#include <doctest.h>

#include <array>
#include <cmath>
#include <sstream>
#include <vector>

#include "lcoal/closed_forms.hpp"
#include "lcoal/errors.hpp"
#include "lcoal/moments.hpp"
#include "lcoal/numeric.hpp"

using namespace lcoal;

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Oracle for the total external length moment: enumerate every composition
// (k_1,...,k_j) of k with j <= n outright, no partition grouping.
double total_moment_brute(MomentEngine& engine, int n, int k) {
  double sum = 0.0;
  std::vector<int> parts;
  auto rec = [&](auto&& self, int rest) -> void {
    if (rest == 0) {
      int j = static_cast<int>(parts.size());
      if (j > n) return;
      double binom = 1.0;
      for (int t = 1; t <= j; ++t) binom *= static_cast<double>(n - j + t) / t;
      double multinomial = factorial(k);
      for (int p : parts) multinomial /= factorial(p);
      sum += binom * multinomial * engine.moment(n, parts);
      return;
    }
    for (int next = 1; next <= rest; ++next) {
      parts.push_back(next);
      self(self, rest - next);
      parts.pop_back();
    }
  };
  rec(rec, k);
  return sum;
}

}  // namespace

TEST_CASE("canonical key") {
  MomentKey key = canonical_key(5, std::array{0, 2, 1, 0});
  CHECK(key.n == 5);
  CHECK(key.exponents == std::vector<int>{2, 1});
  CHECK(key.order() == 3);
  CHECK(key.j() == 2);

  MomentKey id = canonical_key(3, std::array{1, 1, 1});
  CHECK(id.exponents == std::vector<int>{1, 1, 1});

  CHECK_THROWS_AS(canonical_key(2, std::array{1, 1, 1}), ValidationError);
  CHECK_THROWS_AS(canonical_key(3, std::array{-1}), ValidationError);
}

TEST_CASE("n=2 base cases for arbitrary measures") {
  const LambdaMeasure measures[] = {
      LambdaMeasure::from_atoms({{0.37, 0.8}, {0.9, 0.45}}),
      LambdaMeasure::beta(0.5, 1.5, 2.5),
      LambdaMeasure::kingman(),
  };
  for (const auto& measure : measures) {
    RateTable table(measure, 4);
    MomentEngine engine(table);
    double g2 = table.g_total(2);
    // mu_2(1) = 1/g_2 = 1/Lambda([0,1])
    CHECK(engine.moment(2, std::array{1}) == doctest::Approx(1.0 / g2).epsilon(1e-12));
    CHECK(g2 == doctest::Approx(measure.total_mass()).epsilon(1e-12));
    // mu_2(1,1) = E(T^2) = 2/g_2^2 for T ~ Exp(g_2)
    CHECK(engine.moment(2, std::array{1, 1}) == doctest::Approx(2.0 / (g2 * g2)).epsilon(1e-12));
    // and mu_2(k) = k!/g_2^k as long as both branches are the same time T
    CHECK(engine.moment(2, std::array{3}) == doctest::Approx(6.0 / (g2 * g2 * g2)).epsilon(1e-12));
  }
}

TEST_CASE("star preset joint moments are order factorials") {
  RateTable table(LambdaMeasure::star(), 40);
  MomentEngine engine(table);
  for (int n : {2, 5, 9, 40}) {
    CHECK(engine.moment(n, std::array{2, 1}) == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(engine.moment(n, std::array{1}) == doctest::Approx(1.0).epsilon(1e-12));
    if (n >= 4) {
      CHECK(engine.moment(n, std::array{1, 1, 1, 1}) == doctest::Approx(24.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("star factorial law is exact in exact mode") {
  ExactRateTable table(LambdaMeasure::star(), 50);
  ExactMomentEngine engine(table);
  for (int d = 1; d <= 6; ++d) {
    for (const auto& parts : integer_partitions(d)) {
      int n = std::max<int>(2, static_cast<int>(parts.size()));
      CHECK(engine.moment(n, parts) == Rational(star_moment_exact(parts)));
      CHECK(engine.moment(50, parts) == Rational(star_moment_exact(parts)));
    }
  }
}

TEST_CASE("kingman engine matches the closed forms") {
  RateTable table(LambdaMeasure::kingman(), 100);
  MomentEngine engine(table);
  CHECK(engine.moment(10, std::array{1}) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(engine.moment(4, std::array{1, 1}) == doctest::Approx(13.0 / 54.0).epsilon(1e-12));
  for (int n = 2; n <= 100; ++n) {
    for (int k = 1; k <= 4; ++k) {
      CHECK(engine.moment(n, std::array{k}) ==
            doctest::Approx(kingman_marginal(n, k)).epsilon(1e-9));
    }
    CHECK(engine.moment(n, std::array{1, 1}) == doctest::Approx(kingman_pair(n)).epsilon(1e-9));
  }
}

TEST_CASE("bs engine matches the stirling closed forms") {
  RateTable table(LambdaMeasure::bolthausen_sznitman(), 100);
  MomentEngine engine(table);
  auto sweep = bs_exact_sweep(100);
  for (int n = 2; n <= 100; ++n) {
    CHECK(engine.moment(n, std::array{1}) == doctest::Approx(sweep[n].mean).epsilon(1e-9));
    CHECK(engine.moment(n, std::array{1, 1}) == doctest::Approx(sweep[n].pair).epsilon(1e-9));
  }
  CHECK(engine.moment(3, std::array{1}) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(engine.moment(3, std::array{1, 1}) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(std::fabs(engine.moment(100, std::array{1}) - 0.228368) <= 5e-7);
}

TEST_CASE("beta(1,1) moments equal the bs values") {
  RateTable table(LambdaMeasure::beta(1.0, 1.0), 10);
  MomentEngine engine(table);
  CHECK(std::fabs(engine.moment(10, std::array{1}) - 0.431647) <= 5e-7);
}

TEST_CASE("pair covariance") {
  RateTable bs(LambdaMeasure::bolthausen_sznitman(), 10);
  MomentEngine bs_engine(bs);
  CHECK(bs_engine.covariance_pair(3) == doctest::Approx(0.1875).epsilon(1e-12));
  CHECK(std::fabs(bs_engine.covariance_pair(10) - 0.028800) <= 5e-7);

  RateTable kingman(LambdaMeasure::kingman(), 4);
  MomentEngine k_engine(kingman);
  CHECK(k_engine.covariance_pair(4) == doctest::Approx(-1.0 / 108.0).epsilon(1e-12));
  CHECK(std::fabs(k_engine.covariance_pair(3)) <= 1e-12);

  RateTable custom(LambdaMeasure::from_atoms({{0.4, 1.3}}), 2);
  MomentEngine c_engine(custom);
  double g2 = custom.g_total(2);
  CHECK(c_engine.covariance_pair(2) == doctest::Approx(1.0 / (g2 * g2)).epsilon(1e-12));
}

TEST_CASE("moments are permutation invariant and reproducible") {
  RateTable table(LambdaMeasure::bolthausen_sznitman(), 12);
  MomentEngine engine(table);
  double a = engine.moment(7, std::array{1, 2, 1});
  double b = engine.moment(7, std::array{2, 1, 1});
  double c = engine.moment(7, std::array{1, 1, 2});
  CHECK(a == b);
  CHECK(b == c);
  // recomputation through a fresh engine is bit-identical
  MomentEngine fresh(table);
  CHECK(fresh.moment(7, std::array{2, 1, 1}) == a);
  CHECK(engine.moment(7, std::array{2, 1, 1}) == a);
}

TEST_CASE("moments are non-increasing in n") {
  const LambdaMeasure measures[] = {
      LambdaMeasure::kingman(),
      LambdaMeasure::bolthausen_sznitman(),
      LambdaMeasure::star(),
      LambdaMeasure::beta(0.5, 1.5),
  };
  const std::vector<std::vector<int>> keys = {{1}, {2}, {1, 1}, {2, 1}};
  for (const auto& measure : measures) {
    RateTable table(measure, 150);
    MomentEngine engine(table);
    for (const auto& k : keys) {
      int j = static_cast<int>(k.size());
      for (int n = std::max(2, j); n < 150; ++n) {
        CHECK(engine.moment(n, k) >= engine.moment(n + 1, k) - 1e-14);
      }
    }
  }
}

TEST_CASE("order-1 recursion holds by direct substitution") {
  const LambdaMeasure measures[] = {
      LambdaMeasure::kingman(),
      LambdaMeasure::bolthausen_sznitman(),
      LambdaMeasure::beta(0.5, 1.5),
  };
  for (const auto& measure : measures) {
    RateTable table(measure, 100);
    MomentEngine engine(table);
    for (int n = 2; n <= 100; ++n) {
      KahanSum rhs;
      rhs.add(1.0 / table.g_total(n));
      for (int m = 2; m <= n - 1; ++m) {
        rhs.add(table.p(n, m) * ((m - 1.0) / n) * engine.moment(m, std::array{1}));
      }
      CHECK(engine.moment(n, std::array{1}) == doctest::Approx(rhs.value()).epsilon(1e-12));
    }
  }
}

TEST_CASE("pair recursion holds by direct substitution") {
  RateTable table(LambdaMeasure::bolthausen_sznitman(), 100);
  MomentEngine engine(table);
  for (int n = 2; n <= 100; ++n) {
    KahanSum rhs;
    rhs.add(2.0 / table.g_total(n) * engine.moment(n, std::array{1}));
    for (int m = 2; m <= n - 1; ++m) {
      rhs.add(table.p(n, m) * falling_factorial_ratio(m - 1, n, 2) *
              engine.moment(m, std::array{1, 1}));
    }
    CHECK(engine.moment(n, std::array{1, 1}) == doctest::Approx(rhs.value()).epsilon(1e-12));
  }
}

TEST_CASE("float engine agrees with the exact engine") {
  const LambdaMeasure measures[] = {
      LambdaMeasure::kingman(),
      LambdaMeasure::star(),
      LambdaMeasure::bolthausen_sznitman(),
  };
  for (const auto& measure : measures) {
    RateTable table(measure, 100);
    MomentEngine engine(table);
    ExactRateTable exact_table(measure, 100);
    ExactMomentEngine exact_engine(exact_table);
    for (int d = 1; d <= 4; ++d) {
      for (const auto& parts : integer_partitions(d)) {
        for (int n = std::max<int>(2, static_cast<int>(parts.size())); n <= 100; ++n) {
          double exact = static_cast<double>(exact_engine.moment(n, parts));
          CHECK(engine.moment(n, parts) == doctest::Approx(exact).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("total external moment") {
  RateTable star(LambdaMeasure::star(), 6);
  MomentEngine star_engine(star);
  CHECK(star_engine.total_external_moment(3, 2) == doctest::Approx(18.0).epsilon(1e-12));

  RateTable kingman(LambdaMeasure::kingman(), 40);
  MomentEngine k_engine(kingman);
  for (int n : {2, 7, 34}) {
    CHECK(k_engine.total_external_moment(n, 1) == doctest::Approx(2.0).epsilon(1e-12));
  }

  RateTable bs(LambdaMeasure::bolthausen_sznitman(), 10);
  MomentEngine bs_engine(bs);
  double expect = 10.0 * bs_engine.moment(10, std::array{2}) +
                  90.0 * bs_engine.moment(10, std::array{1, 1});
  CHECK(bs_engine.total_external_moment(10, 2) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("total external moment matches brute-force composition sum") {
  RateTable table(LambdaMeasure::bolthausen_sznitman(), 10);
  MomentEngine engine(table);
  for (int n = 2; n <= 6; ++n) {
    for (int k = 1; k <= 4; ++k) {
      CHECK(engine.total_external_moment(n, k) ==
            doctest::Approx(total_moment_brute(engine, n, k)).epsilon(1e-12));
    }
  }
  CHECK(engine.total_external_moment(10, 2) ==
        doctest::Approx(total_moment_brute(engine, 10, 2)).epsilon(1e-12));
}

TEST_CASE("exact rate tables exist for presets only, under a cap") {
  CHECK_THROWS_AS(ExactRateTable(LambdaMeasure::bolthausen_sznitman(), 300), ResourceError);
  CHECK_NOTHROW(ExactRateTable(LambdaMeasure::bolthausen_sznitman(), 300, /*cap=*/400));
  CHECK_THROWS_AS(ExactRateTable(LambdaMeasure::beta(0.5, 1.5), 50), ValidationError);
  CHECK_THROWS_AS(ExactRateTable(LambdaMeasure::from_atoms({{0.5, 1.0}}), 50), ValidationError);

  // spot values: bs rational rates and row totals
  ExactRateTable bs(LambdaMeasure::bolthausen_sznitman(), 10);
  CHECK(bs.g(5, 2) == Rational(5, 12));
  CHECK(bs.g_total(10) == 9);
  Rational row = 0;
  for (int m = 1; m < 10; ++m) row += bs.g(10, m);
  CHECK(row == bs.g_total(10));
  ExactRateTable kingman(LambdaMeasure::kingman(), 10);
  CHECK(kingman.g(4, 3) == 6);
  CHECK(kingman.g(4, 2) == 0);
}

TEST_CASE("moment domain errors") {
  RateTable table(LambdaMeasure::kingman(), 10);
  MomentEngine engine(table);
  CHECK_THROWS_AS(engine.moment(11, std::array{1}), ValidationError);
  CHECK_THROWS_AS(engine.covariance_pair(1), ValidationError);
  CHECK_THROWS_AS(engine.total_external_moment(10, 0), ValidationError);
  MomentKey bad;
  bad.n = 5;
  bad.exponents = {1, 2};  // not non-increasing
  CHECK_THROWS_AS(engine.moment(bad), ValidationError);
}

TEST_CASE("empty exponent vector has moment 1, n=1 has moment 0") {
  RateTable table(LambdaMeasure::kingman(), 5);
  MomentEngine engine(table);
  CHECK(engine.moment(3, std::span<const int>{}) == 1.0);
  CHECK(engine.moment(canonical_key(1, std::array{1})) == 0.0);
}

TEST_CASE("moment csv row") {
  RateTable table(LambdaMeasure::star(), 5);
  MomentEngine engine(table);
  std::ostringstream os;
  engine.write_csv_row(os, canonical_key(5, std::array{2, 1, 1}));
  CHECK(os.str() == "5,2+1+1,24\n");
}
