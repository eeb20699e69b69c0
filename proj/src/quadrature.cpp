#include "lcoal/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "lcoal/errors.hpp"
#include "lcoal/numeric.hpp"

namespace lcoal {

namespace {

// QUADPACK dqk15 abscissae/weights. xgk[1], xgk[3], xgk[5] and the midpoint
// are the Gauss points.
constexpr std::array<double, 8> kXgk = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691, 0.7415311855993945,
    0.5860872354676911, 0.4058451513773972, 0.2077849550078985, 0.0};
constexpr std::array<double, 8> kWgk = {
    0.0229353220105292, 0.0630920926299785, 0.1047900103222502, 0.1406532597155259,
    0.1690047266392679, 0.1903505780647854, 0.2044329400752989, 0.2094821410847278};
constexpr std::array<double, 4> kWg = {
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189, 0.4179591836734694};

struct Panel {
  double a, b;
  double value;  // K15 result
  double error;  // |K15 - G7|
};

Panel gk15(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  const double fc = f(center);
  double result_gauss = kWg[3] * fc;
  double result_kronrod = kWgk[7] * fc;

  for (int i = 0; i < 7; ++i) {
    const double x = half * kXgk[i];
    const double f1 = f(center - x);
    const double f2 = f(center + x);
    result_kronrod += kWgk[i] * (f1 + f2);
    if (i % 2 == 1) result_gauss += kWg[i / 2] * (f1 + f2);
  }
  result_gauss *= half;
  result_kronrod *= half;
  return {a, b, result_kronrod, std::fabs(result_kronrod - result_gauss)};
}

// Worst-error-first refinement order, with bounds breaking ties so the
// sequence of subdivisions is deterministic.
bool refine_before(const Panel& x, const Panel& y) {
  if (x.error != y.error) return x.error < y.error;  // max-heap on error
  if (x.a != y.a) return x.a > y.a;
  return x.b > y.b;
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& opts) {
  std::vector<Panel> panels{gk15(f, a, b)};
  long evals = 15;
  KahanSum err_sum;
  err_sum.add(panels[0].error);

  // Global control: split the worst panel until the summed error estimate
  // meets the budget (or a panel degenerates to machine width).
  while (err_sum.value() > opts.abs_tol) {
    std::pop_heap(panels.begin(), panels.end(), refine_before);
    Panel worst = panels.back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) break;  // cannot refine further
    if (evals + 30 > opts.max_evals) {
      throw NumericalError("quadrature did not converge within " +
                           std::to_string(opts.max_evals) + " evaluations on [" +
                           std::to_string(a) + "," + std::to_string(b) +
                           "] (error estimate " + std::to_string(err_sum.value()) + ")");
    }
    panels.pop_back();
    Panel left = gk15(f, worst.a, mid);
    Panel right = gk15(f, mid, worst.b);
    evals += 30;
    panels.push_back(left);
    std::push_heap(panels.begin(), panels.end(), refine_before);
    panels.push_back(right);
    std::push_heap(panels.begin(), panels.end(), refine_before);

    KahanSum fresh;
    for (const Panel& p : panels) fresh.add(p.error);
    err_sum = fresh;
  }

  // Sum panel values left to right so the result does not depend on the
  // refinement bookkeeping.
  std::sort(panels.begin(), panels.end(),
            [](const Panel& x, const Panel& y) { return x.a < y.a; });
  KahanSum total;
  for (const Panel& p : panels) total.add(p.value);
  return {total.value(), err_sum.value(), evals};
}

}  // namespace lcoal
