#pragma once

#include <functional>

namespace lcoal {

struct QuadratureOptions {
  double abs_tol = 1e-10;
  // Hard cap on integrand evaluations for one integral; exceeding it is a
  // NumericalError, not a silently degraded answer.
  long max_evals = 200000;
};

struct QuadratureResult {
  double value;
  double error_estimate;
  long evals;
};

// Adaptive Gauss-Kronrod (G7,K15) on (a,b). Nodes are strictly interior, so
// integrable endpoint behavior is tolerated. Subdivision is a fixed
// depth-first bisection; results are deterministic for a given integrand.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& opts = {});

}  // namespace lcoal
