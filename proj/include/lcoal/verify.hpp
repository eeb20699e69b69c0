#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "lcoal/measure.hpp"

namespace lcoal {

// Tolerances and grids for a verification campaign. The built-in values
// mirror configs/verify_defaults.json (version 1); flags and --config
// override them.
struct VerifyOptions {
  LambdaMeasure measure = LambdaMeasure::bolthausen_sznitman();
  int n_max = 100;
  int max_order = 2;
  long replicates = 0;  // 0 = closed-form cells only
  std::uint64_t seed = 20130815;
  int threads = 0;
  double closed_form_rtol = 1e-9;
  double sim_sigmas = 4.0;
  std::vector<int> sim_n_grid = {10, 50};
};

struct VerifyCell {
  std::string quantity;  // "moment" | "covariance"
  std::string route;     // "closed_form" | "simulation"
  int n = 0;
  std::string k;  // exponents joined by '+'
  double engine = 0.0;
  double reference = 0.0;
  double tolerance = 0.0;  // absolute tolerance applied to |engine - reference|
  bool pass = false;
};

struct VerifyReport {
  bool pass = false;
  std::string measure;
  int n_max = 0;
  int max_order = 0;
  long replicates = 0;
  std::uint64_t seed = 0;
  double closed_form_rtol = 0.0;
  double sim_sigmas = 0.0;
  std::vector<VerifyCell> cells;

  std::string json() const;  // stable key order, byte-reproducible
  void write_pretty(std::ostream& os) const;
};

// Compares the recursion engine against every closed form available for the
// measure and, when replicates > 0, against seeded Monte Carlo estimates.
VerifyReport run_verify(const VerifyOptions& options);

}  // namespace lcoal
