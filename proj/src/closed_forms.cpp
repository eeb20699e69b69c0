#include "lcoal/closed_forms.hpp"

#include <cmath>
#include <string>

#include "lcoal/errors.hpp"

namespace lcoal {

Rational harmonic_exact(int n) {
  if (n < 1) throw ValidationError("harmonic number needs n >= 1");
  Rational h = 0;
  for (int i = 1; i <= n; ++i) h += Rational(1, i);
  return h;
}

StirlingRatioTable::StirlingRatioTable(int n_max, bool exact, int exact_cap)
    : n_max_(n_max), exact_(exact) {
  if (n_max < 0) throw ValidationError("stirling table needs n_max >= 0");
  if (exact && n_max > exact_cap) {
    throw ResourceError("exact stirling table capped at n_max=" + std::to_string(exact_cap) +
                        ", got " + std::to_string(n_max));
  }
  r_.assign(index(n_max, n_max) + 1, 0.0);
  r_[index(0, 0)] = 1.0;
  for (int i = 0; i < n_max; ++i) {
    const double w_old = static_cast<double>(i) / (i + 1);
    const double w_new = 1.0 / (i + 1);
    for (int k = 1; k <= i + 1; ++k) {
      double carry = (k <= i) ? w_old * r_[index(i, k)] : 0.0;
      r_[index(i + 1, k)] = carry + w_new * r_[index(i, k - 1)];
    }
  }
  if (exact) {
    s_.assign(index(n_max, n_max) + 1, BigInt(0));
    s_[index(0, 0)] = 1;
    for (int i = 0; i < n_max; ++i) {
      for (int k = 1; k <= i + 1; ++k) {
        BigInt carry = (k <= i) ? BigInt(i) * s_[index(i, k)] : BigInt(0);
        s_[index(i + 1, k)] = carry + s_[index(i, k - 1)];
      }
    }
  }
}

double StirlingRatioTable::r(int i, int k) const {
  if (i < 0 || i > n_max_ || k < 0 || k > i) {
    throw ValidationError("stirling ratio index out of range: i=" + std::to_string(i) +
                          ", k=" + std::to_string(k));
  }
  return r_[index(i, k)];
}

const BigInt& StirlingRatioTable::s_exact(int i, int k) const {
  if (!exact_) throw ValidationError("stirling table was not built in exact mode");
  if (i < 0 || i > n_max_ || k < 0 || k > i) {
    throw ValidationError("stirling index out of range: i=" + std::to_string(i) +
                          ", k=" + std::to_string(k));
  }
  return s_[index(i, k)];
}

namespace {

void check_bs_n(int n) {
  if (n < 2) throw ValidationError("Bolthausen-Sznitman moments need n >= 2");
}

// Advance the rolling rows r[i][.] -> r[i+1][.] and q[i][.] -> q[i+1][.]
// where q[i][k] = 2^{k+1} r[i][k]. q obeys the same recurrence with the new
// term doubled; all q entries stay within [0, 2(i+1)].
void advance_rows(std::vector<double>& r, std::vector<double>& q, int i) {
  const double w_old = static_cast<double>(i) / (i + 1);
  const double w_new = 1.0 / (i + 1);
  for (int k = i + 1; k >= 1; --k) {
    double r_carry = (k <= i) ? w_old * r[k] : 0.0;
    double q_carry = (k <= i) ? w_old * q[k] : 0.0;
    r[k] = r_carry + w_new * r[k - 1];
    q[k] = q_carry + 2.0 * w_new * q[k - 1];
  }
  r[0] = 0.0;
  q[0] = 0.0;
}

double mean_from_row(const std::vector<double>& r, int i) {
  // E(tau_{n,1}) with i = n-1
  KahanSum s;
  for (int k = 1; k <= i; ++k) s.add(r[k] / k);
  return s.value();
}

double pair_from_rows(const std::vector<double>& r, const std::vector<double>& q, int i) {
  // E(tau_{n,1} tau_{n,2}) with i = n-2:
  // 2/(n-1) sum_{kap=0}^{i} (q[kap] - r[kap]) / (kap+1)^2, since
  // (2^{kap+1} - 1) r[kap] = q[kap] - r[kap].
  KahanSum s;
  for (int kap = 0; kap <= i; ++kap) {
    double d = static_cast<double>(kap + 1);
    s.add((q[kap] - r[kap]) / (d * d));
  }
  return 2.0 / (i + 1) * s.value();
}

}  // namespace

double bs_mean_exact(int n) {
  check_bs_n(n);
  std::vector<double> r(n, 0.0), q(n, 0.0);
  r[0] = 1.0;
  q[0] = 2.0;
  for (int i = 0; i < n - 1; ++i) advance_rows(r, q, i);
  return mean_from_row(r, n - 1);
}

double bs_pair_exact(int n) {
  check_bs_n(n);
  std::vector<double> r(n - 1, 0.0), q(n - 1, 0.0);
  r[0] = 1.0;
  q[0] = 2.0;
  for (int i = 0; i < n - 2; ++i) advance_rows(r, q, i);
  return pair_from_rows(r, q, n - 2);
}

std::vector<BsExactMoments> bs_exact_sweep(int n_max) {
  check_bs_n(n_max);
  std::vector<BsExactMoments> out(n_max + 1, BsExactMoments{0.0, 0.0});
  std::vector<double> r(n_max, 0.0), q(n_max, 0.0);
  r[0] = 1.0;
  q[0] = 2.0;
  // Row i serves the pair moment of n = i+2 and the mean of n = i+1.
  for (int i = 0; i <= n_max - 2; ++i) {
    if (i >= 1) out[i + 1].mean = mean_from_row(r, i);
    out[i + 2].pair = pair_from_rows(r, q, i);
    advance_rows(r, q, i);
  }
  out[n_max].mean = mean_from_row(r, n_max - 1);
  return out;
}

Rational bs_mean_exact_rational(int n, const StirlingRatioTable& table) {
  check_bs_n(n);
  if (n - 1 > table.n_max()) throw ValidationError("n beyond exact stirling table");
  Rational s = 0;
  BigInt fact = 1;
  for (int i = 2; i <= n - 1; ++i) fact *= i;
  for (int k = 1; k <= n - 1; ++k) s += Rational(table.s_exact(n - 1, k), BigInt(k) * fact);
  return s;
}

Rational bs_pair_exact_rational(int n, const StirlingRatioTable& table) {
  check_bs_n(n);
  if (n - 2 > table.n_max()) throw ValidationError("n beyond exact stirling table");
  BigInt fact = 1;
  for (int i = 2; i <= n - 1; ++i) fact *= i;
  Rational s = 0;
  BigInt pow2 = 2;
  for (int k = 1; k <= n - 1; ++k) {
    s += Rational((pow2 - 1) * table.s_exact(n - 2, k - 1), BigInt(k) * k);
    pow2 *= 2;
  }
  return 2 * s / fact;
}

double kingman_marginal(int n, int k) {
  if (n < 2) throw ValidationError("Kingman marginal moment needs n >= 2");
  if (k < 1) throw ValidationError("Kingman marginal moment needs k >= 1");
  // mu_m(0) = 1; climb orders, keeping one row of values for m = 2..n.
  std::vector<double> prev(n + 1, 1.0), cur(n + 1, 0.0);
  for (int ord = 1; ord <= k; ++ord) {
    KahanSum prefix;  // sum_{t=2}^{m} prev[t]
    for (int m = 2; m <= n; ++m) {
      prefix.add(prev[m]);
      cur[m] = 2.0 * ord / (static_cast<double>(m) * (m - 1)) * prefix.value();
    }
    std::swap(prev, cur);
  }
  return prev[n];
}

double kingman_pair(int n) {
  if (n < 2) throw ValidationError("Kingman pair moment needs n >= 2");
  if (n == 2) return 2.0;
  double hn = harmonic(n);
  return 4.0 * (static_cast<double>(n) * n - 5.0 * n + 4.0 * hn) /
         (static_cast<double>(n) * (n - 1.0) * (n - 1.0) * (n - 2.0));
}

double star_moment(std::span<const int> exponents) {
  if (exponents.empty()) throw ValidationError("star moment needs at least one exponent");
  long d = 0;
  for (int k : exponents) {
    if (k < 1) throw ValidationError("star moment exponents must be positive");
    d += k;
  }
  double f = 1.0;
  for (long i = 2; i <= d; ++i) f *= static_cast<double>(i);
  return f;
}

BigInt star_moment_exact(std::span<const int> exponents) {
  if (exponents.empty()) throw ValidationError("star moment needs at least one exponent");
  long d = 0;
  for (int k : exponents) {
    if (k < 1) throw ValidationError("star moment exponents must be positive");
    d += k;
  }
  BigInt f = 1;
  for (long i = 2; i <= d; ++i) f *= i;
  return f;
}

double bs_joint_asymptotic(std::span<const int> exponents, double n) {
  if (!(n >= 3.0)) throw ValidationError("asymptotic law needs n >= 3");
  int d = 0;
  double num = 1.0;
  for (int k : exponents) {
    if (k < 1) throw ValidationError("asymptotic exponents must be positive");
    d += k;
    for (int i = 2; i <= k; ++i) num *= i;
  }
  return num / std::pow(std::log(n), d);
}

double bs_total_asymptotic(int k, double n) {
  if (k < 1) throw ValidationError("total-length asymptotic needs k >= 1");
  if (!(n >= 3.0)) throw ValidationError("asymptotic law needs n >= 3");
  double v = std::pow(n / std::log(n), k);
  if (!std::isfinite(v)) throw NumericalError("total-length asymptotic overflowed");
  return v;
}

double kingman_second_moment_expansion(int n) {
  if (n < 2) throw ValidationError("expansion needs n >= 2");
  double n2 = static_cast<double>(n) * n;
  return 8.0 * std::log(static_cast<double>(n)) / n2 + 8.0 * (kEulerGamma - 1.0) / n2;
}

}  // namespace lcoal
