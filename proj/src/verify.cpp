#include "lcoal/verify.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <json.hpp>

#include "lcoal/closed_forms.hpp"
#include "lcoal/errors.hpp"
#include "lcoal/format.hpp"
#include "lcoal/moments.hpp"
#include "lcoal/simulate.hpp"

namespace lcoal {

namespace {

std::string k_string(std::span<const int> exponents) {
  std::string s;
  for (std::size_t i = 0; i < exponents.size(); ++i) {
    if (i) s += '+';
    s += std::to_string(exponents[i]);
  }
  return s;
}

VerifyCell make_cell(std::string quantity, std::string route, int n, std::string k,
                     double engine, double reference, double tolerance) {
  VerifyCell cell;
  cell.quantity = std::move(quantity);
  cell.route = std::move(route);
  cell.n = n;
  cell.k = std::move(k);
  cell.engine = engine;
  cell.reference = reference;
  cell.tolerance = tolerance;
  cell.pass = std::isfinite(engine) && std::fabs(engine - reference) <= tolerance;
  return cell;
}

void add_closed_form_cells(const VerifyOptions& opt, MomentEngine& engine,
                           std::vector<VerifyCell>& cells) {
  const double rtol = opt.closed_form_rtol;
  auto rel_cell = [&](int n, std::span<const int> k, double reference) {
    double value = engine.moment(n, k);
    cells.push_back(make_cell("moment", "closed_form", n, k_string(k), value, reference,
                              rtol * std::fabs(reference)));
  };

  if (opt.measure.is_kingman_preset()) {
    for (int n = 2; n <= opt.n_max; ++n) {
      for (int k = 1; k <= std::min(opt.max_order, 4); ++k) {
        rel_cell(n, std::array{k}, kingman_marginal(n, k));
      }
      if (opt.max_order >= 2) rel_cell(n, std::array{1, 1}, kingman_pair(n));
    }
  } else if (opt.measure.is_bs_preset()) {
    const auto sweep = bs_exact_sweep(opt.n_max);
    for (int n = 2; n <= opt.n_max; ++n) {
      rel_cell(n, std::array{1}, sweep[n].mean);
      if (opt.max_order >= 2) rel_cell(n, std::array{1, 1}, sweep[n].pair);
    }
  } else if (opt.measure.is_star_preset()) {
    for (int n = 2; n <= opt.n_max; n = n < 10 ? n + 1 : n * 2) {
      for (const auto& parts : integer_partitions(std::min(opt.max_order, 6))) {
        if (static_cast<int>(parts.size()) > n) continue;
        rel_cell(n, parts, star_moment(parts));
      }
    }
  }
}

void add_simulation_cells(const VerifyOptions& opt, const RateTable& table, MomentEngine& engine,
                          std::vector<VerifyCell>& cells) {
  std::vector<int> grid;
  for (int n : opt.sim_n_grid) {
    n = std::min(n, opt.n_max);
    if (n >= 2 && std::find(grid.begin(), grid.end(), n) == grid.end()) grid.push_back(n);
  }
  const std::vector<std::vector<int>> ks = {{1}, {2}, {1, 1}};
  std::uint64_t seed = opt.seed;
  for (int n : grid) {
    for (const auto& k : ks) {
      int order = 0;
      for (int v : k) order += v;
      if (order > opt.max_order || static_cast<int>(k.size()) > n) continue;
      Estimate est =
          estimate_joint_moment(table, n, k, opt.replicates, seed++, opt.threads);
      double value = engine.moment(n, k);
      cells.push_back(make_cell("moment", "simulation", n, k_string(k), value, est.mean,
                                opt.sim_sigmas * est.stderr_));
    }
  }
}

}  // namespace

VerifyReport run_verify(const VerifyOptions& opt) {
  if (opt.n_max < 2) throw ValidationError("verify needs n_max >= 2");
  if (opt.max_order < 1) throw ValidationError("verify needs max_order >= 1");

  RateTable table(opt.measure, opt.n_max);
  MomentEngine engine(table);

  VerifyReport report;
  report.measure = opt.measure.to_string();
  report.n_max = opt.n_max;
  report.max_order = opt.max_order;
  report.replicates = opt.replicates;
  report.seed = opt.seed;
  report.closed_form_rtol = opt.closed_form_rtol;
  report.sim_sigmas = opt.sim_sigmas;

  add_closed_form_cells(opt, engine, report.cells);
  if (opt.replicates > 0) add_simulation_cells(opt, table, engine, report.cells);

  report.pass = std::all_of(report.cells.begin(), report.cells.end(),
                            [](const VerifyCell& c) { return c.pass; });
  return report;
}

std::string VerifyReport::json() const {
  nlohmann::json cells_json = nlohmann::json::array();
  for (const VerifyCell& c : cells) {
    cells_json.push_back({{"quantity", c.quantity},
                          {"route", c.route},
                          {"n", c.n},
                          {"k", c.k},
                          {"engine", c.engine},
                          {"reference", c.reference},
                          {"tolerance", c.tolerance},
                          {"pass", c.pass}});
  }
  nlohmann::json j{{"version", 1},
                   {"measure", measure},
                   {"n_max", n_max},
                   {"max_order", max_order},
                   {"replicates", replicates},
                   {"seed", seed},
                   {"closed_form_rtol", closed_form_rtol},
                   {"sim_sigmas", sim_sigmas},
                   {"pass", pass},
                   {"cells", cells_json}};
  return j.dump(2);
}

void VerifyReport::write_pretty(std::ostream& os) const {
  os << "verify measure=" << measure << " n_max=" << n_max << " max_order=" << max_order
     << " replicates=" << replicates << " seed=" << seed << "\n";
  long failed = 0;
  for (const VerifyCell& c : cells) {
    if (!c.pass) ++failed;
    os << (c.pass ? "  ok   " : "  FAIL ") << c.quantity << " n=" << c.n << " k=" << c.k << " ["
       << c.route << "] engine=" << format_full(c.engine)
       << " reference=" << format_full(c.reference) << " tol=" << format_full(c.tolerance)
       << "\n";
  }
  os << (pass ? "PASS" : "FAIL") << " (" << cells.size() - failed << "/" << cells.size()
     << " cells)\n";
}

}  // namespace lcoal
