#include "lcoal/rates.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include "lcoal/errors.hpp"
#include "lcoal/format.hpp"
#include "lcoal/numeric.hpp"

namespace lcoal {

namespace {

void check_nm(int n, int m) {
  if (n < 2) throw ValidationError("collision rate needs n >= 2, got n=" + std::to_string(n));
  if (m < 1 || m >= n) {
    throw ValidationError("collision rate needs 1 <= m < n, got n=" + std::to_string(n) +
                          ", m=" + std::to_string(m));
  }
}

// Integrand of the rate integral with the binomial factor folded in:
// C(n,m-1) x^(n-m-1) (1-x)^(m-1) * density(x).
double density_part_quadrature(const LambdaMeasure& measure, int n, int m,
                               const QuadratureOptions& quad) {
  const double log_c = log_binomial(n, m - 1);
  const double xa = n - m - 1;  // exponent of x
  const double xb = m - 1;      // exponent of 1-x
  auto f = [&](double x) {
    return std::exp(log_c + xa * std::log(x) + xb * std::log1p(-x)) * measure.density_value(x);
  };
  return integrate(f, 0.0, 1.0, quad).value;
}

// Beta(a,b) with mass M: C(n,m-1) * M * B(a+n-m-1, b+m-1) / B(a,b).
double density_part_beta(const LambdaMeasure& measure, int n, int m) {
  const BetaParams& p = *measure.beta_params();
  double lg = log_binomial(n, m - 1) + log_beta(p.a + (n - m - 1), p.b + (m - 1)) -
              log_beta(p.a, p.b);
  return measure.density_mass() * std::exp(lg);
}

}  // namespace

double collision_rate(const LambdaMeasure& measure, int n, int m, const QuadratureOptions& quad) {
  check_nm(n, m);
  KahanSum rate;

  for (const Atom& atom : measure.atoms()) {
    if (atom.x == 0.0) {
      // x->0 limit of the integrand: only the m = n-1 entry survives and the
      // removable singularity evaluates to n(n-1)/2.
      if (m == n - 1) rate.add(atom.w * 0.5 * n * (n - 1));
    } else if (atom.x == 1.0) {
      if (m == 1) rate.add(atom.w);
    } else {
      double lg = log_binomial(n, m - 1) + (n - m - 1) * std::log(atom.x) +
                  (m - 1) * std::log1p(-atom.x);
      rate.add(atom.w * std::exp(lg));
    }
  }

  if (measure.has_density()) {
    if (measure.beta_params() && measure.beta_closed_form()) {
      rate.add(density_part_beta(measure, n, m));
    } else {
      rate.add(density_part_quadrature(measure, n, m, quad));
    }
  }

  double value = rate.value();
  if (!std::isfinite(value)) {
    throw NumericalError("collision rate overflowed at n=" + std::to_string(n) +
                         ", m=" + std::to_string(m));
  }
  return value;
}

double total_rate(const LambdaMeasure& measure, int n, const QuadratureOptions& quad) {
  if (n < 2) throw ValidationError("total rate needs n >= 2, got n=" + std::to_string(n));
  KahanSum s;
  for (int m = 1; m < n; ++m) s.add(collision_rate(measure, n, m, quad));
  return s.value();
}

std::vector<double> jump_probabilities(const LambdaMeasure& measure, int n,
                                       const QuadratureOptions& quad) {
  if (n < 2) throw ValidationError("jump probabilities need n >= 2, got n=" + std::to_string(n));
  std::vector<double> g(n - 1);
  KahanSum s;
  for (int m = 1; m < n; ++m) {
    g[m - 1] = collision_rate(measure, n, m, quad);
    s.add(g[m - 1]);
  }
  const double gn = s.value();
  for (double& v : g) v /= gn;
  return g;
}

std::size_t RateTable::index(int n, int m) const {
  // row n (n >= 2) starts at (n-1)(n-2)/2 and holds entries for m = 1..n-1
  return static_cast<std::size_t>(n - 1) * (n - 2) / 2 + (m - 1);
}

RateTable::RateTable(const LambdaMeasure& measure, int n_max, const RateTableOptions& opts)
    : measure_(measure), n_max_(n_max) {
  if (n_max < 2) throw ValidationError("rate table needs n_max >= 2");
  if (n_max > opts.max_n) {
    throw ResourceError("rate table n_max=" + std::to_string(n_max) + " exceeds cap " +
                        std::to_string(opts.max_n));
  }
  g_.resize(static_cast<std::size_t>(n_max - 1) * n_max / 2);
  g_total_.assign(n_max + 1, 0.0);
  for (int n = 2; n <= n_max; ++n) {
    KahanSum row_sum;
    for (int m = 1; m < n; ++m) {
      double v = collision_rate(measure_, n, m, opts.quad);
      g_[index(n, m)] = v;
      row_sum.add(v);
    }
    g_total_[n] = row_sum.value();
  }
}

void RateTable::write_csv(std::ostream& os) const {
  os << "n,m,g_nm,p_nm\n";
  for (int n = 2; n <= n_max_; ++n) {
    for (int m = 1; m < n; ++m) {
      os << n << ',' << m << ',' << format_full(g(n, m)) << ',' << format_full(p(n, m)) << '\n';
    }
  }
}

}  // namespace lcoal
