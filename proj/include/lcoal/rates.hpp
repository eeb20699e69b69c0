#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "lcoal/measure.hpp"
#include "lcoal/quadrature.hpp"

namespace lcoal {

// g_{nm}: rate at which the block counting process restricted to n blocks
// jumps to m blocks, 1 <= m < n. Atoms are handled analytically, the Beta
// density part in closed form via log-Gamma, any other density by adaptive
// quadrature.
double collision_rate(const LambdaMeasure& measure, int n, int m,
                      const QuadratureOptions& quad = {});

// g_n = sum_m g_{nm}; always the row sum, never the singular direct integral.
double total_rate(const LambdaMeasure& measure, int n, const QuadratureOptions& quad = {});

// p_{nm} = g_{nm}/g_n for m = 1..n-1 (index 0 holds m=1).
std::vector<double> jump_probabilities(const LambdaMeasure& measure, int n,
                                       const QuadratureOptions& quad = {});

struct RateTableOptions {
  int max_n = 8192;  // dense triangle cap; ~256 MiB of doubles at the cap
  QuadratureOptions quad;
};

// Precomputed dense lower-triangular table of g_{nm} for 2 <= n <= n_max,
// plus row totals. Immutable after construction; shareable across threads.
// Jump probabilities are exposed as g(n,m)/g_total(n) rather than stored, so
// the row-stochasticity invariant is a genuine consistency check.
class RateTable {
 public:
  RateTable(const LambdaMeasure& measure, int n_max, const RateTableOptions& opts = {});

  int n_max() const { return n_max_; }
  const LambdaMeasure& measure() const { return measure_; }

  double g(int n, int m) const { return g_[index(n, m)]; }
  double g_total(int n) const { return g_total_[n]; }
  double p(int n, int m) const { return g_[index(n, m)] / g_total_[n]; }
  // Rates g_{n,1..n-1} of one row.
  std::span<const double> row(int n) const {
    return {g_.data() + index(n, 1), static_cast<std::size_t>(n - 1)};
  }

  // CSV: header n,m,g_nm,p_nm; n ascending, m ascending.
  void write_csv(std::ostream& os) const;

 private:
  std::size_t index(int n, int m) const;
  LambdaMeasure measure_;
  int n_max_;
  std::vector<double> g_;        // packed rows n = 2..n_max, each n-1 wide
  std::vector<double> g_total_;  // indexed by n
};

}  // namespace lcoal
