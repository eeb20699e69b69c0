#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace lcoal {

inline constexpr double kEulerGamma = 0.5772156649015329;

// Kahan compensated accumulator. Long rate-table rows and harmonic-type sums
// are accumulated through this so that 1e-12 level identities survive n ~ 1e4.
class KahanSum {
 public:
  void add(double x) {
    double y = x - c_;
    double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

// (m-1)_j / (n)_j as a product of ratios; never forms the factorials.
inline double falling_factorial_ratio(int m_minus_1, int n, int j) {
  double r = 1.0;
  for (int t = 0; t < j; ++t) {
    r *= static_cast<double>(m_minus_1 - t) / static_cast<double>(n - t);
  }
  return r;
}

// log C(n, k) via log-Gamma; exact-integer binomials overflow well below the
// n we support.
inline double log_binomial(int n, int k) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

inline double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// n-th harmonic number, compensated.
inline double harmonic(int n) {
  KahanSum s;
  for (int i = 1; i <= n; ++i) s.add(1.0 / i);
  return s.value();
}

}  // namespace lcoal
