// lcoal: moments of external branch lengths of Lambda-coalescents.
//
// Subcommands: table, moment, rates, simulate, verify, asymptotics.
// Exit codes: 0 success, 1 validation error, 2 verification failure,
// 3 numerical/resource error.

#include <algorithm>
#include <array>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lcoal/closed_forms.hpp"
#include "lcoal/errors.hpp"
#include "lcoal/exact.hpp"
#include "lcoal/format.hpp"
#include "lcoal/measure.hpp"
#include "lcoal/moments.hpp"
#include "lcoal/rates.hpp"
#include "lcoal/simulate.hpp"
#include "lcoal/verify.hpp"

namespace {

using namespace lcoal;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitVerifyFailed = 2;
constexpr int kExitNumerical = 3;

// --out paths are relative to $LCOAL_OUT_DIR when that is set.
std::filesystem::path resolve_out(const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_relative()) {
    if (const char* dir = std::getenv("LCOAL_OUT_DIR")) p = std::filesystem::path(dir) / p;
  }
  return p;
}

// Every command writes to a string first; --out redirects the whole payload.
void emit(const std::string& payload, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << payload;
    return;
  }
  auto p = resolve_out(out_path);
  std::ofstream os(p);
  if (!os) throw ValidationError("cannot open output file " + p.string());
  os << payload;
}

std::vector<int> parse_int_list(const std::string& text, const std::string& what) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      int v = std::stoi(item, &pos);
      if (pos != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ValidationError("bad " + what + " list entry '" + item + "'");
    }
  }
  if (out.empty()) throw ValidationError(what + " list is empty");
  return out;
}

struct VerifyDefaults {
  int version = 1;
  int n_max = 100;
  int max_order = 2;
  double closed_form_rtol = 1e-9;
  double sim_sigmas = 4.0;
  std::vector<int> sim_n_grid = {10, 50};
  std::vector<int> asymptotics_n_grid = {10, 100, 1000, 5000};
};

VerifyDefaults load_defaults(const std::string& config_path) {
  VerifyDefaults d;
  std::string path = config_path;
  if (path.empty()) {
    if (const char* env = std::getenv("LCOAL_CONFIG")) path = env;
  }
  if (path.empty()) return d;
  std::ifstream is(path);
  if (!is) throw ValidationError("cannot open config file " + path);
  nlohmann::json j;
  try {
    is >> j;
  } catch (const std::exception& e) {
    throw ValidationError("bad config file " + path + ": " + e.what());
  }
  d.version = j.value("version", d.version);
  if (d.version != 1) throw ValidationError("unsupported config version in " + path);
  d.n_max = j.value("n_max", d.n_max);
  d.max_order = j.value("max_order", d.max_order);
  d.closed_form_rtol = j.value("closed_form_rtol", d.closed_form_rtol);
  d.sim_sigmas = j.value("sim_sigmas", d.sim_sigmas);
  if (j.contains("sim_n_grid")) d.sim_n_grid = j["sim_n_grid"].get<std::vector<int>>();
  if (j.contains("asymptotics_n_grid")) {
    d.asymptotics_n_grid = j["asymptotics_n_grid"].get<std::vector<int>>();
  }
  return d;
}

// ---- table ---------------------------------------------------------------

int cmd_table(const std::string& measure_str, const std::string& format,
              const std::string& out_path) {
  if (measure_str != "kingman" && measure_str != "bs") {
    throw ValidationError("table supports the presets 'kingman' and 'bs', got '" + measure_str +
                          "'");
  }
  const std::vector<int> grid = {2, 3, 4, 5, 10, 100};
  LambdaMeasure measure = LambdaMeasure::parse(measure_str);
  RateTable table(measure, 100);
  MomentEngine engine(table);

  struct Row {
    int n;
    std::string mean, pair, cov;
  };
  std::vector<Row> rows;
  for (int n : grid) {
    double mean = engine.moment(n, std::array{1});
    double pair = engine.moment(n, std::array{1, 1});
    rows.push_back({n, format_table6(mean), format_table6(pair), format_table6(pair - mean * mean)});
  }

  std::ostringstream os;
  if (format == "csv") {
    os << "n,mean,pair_moment,covariance\n";
    for (const Row& r : rows) os << r.n << ',' << r.mean << ',' << r.pair << ',' << r.cov << '\n';
  } else if (format == "json") {
    nlohmann::json j = nlohmann::json::array();
    for (const Row& r : rows) {
      j.push_back({{"n", r.n}, {"mean", r.mean}, {"pair_moment", r.pair}, {"covariance", r.cov}});
    }
    os << j.dump(2) << '\n';
  } else if (format == "pretty") {
    os << "measure: " << measure_str << "\n";
    os << "     n        mean        pair         cov\n";
    for (const Row& r : rows) {
      os << std::setw(6) << r.n << std::setw(12) << r.mean << std::setw(12) << r.pair
         << std::setw(12) << r.cov << '\n';
    }
  } else {
    throw ValidationError("unknown format '" + format + "' (pretty|csv|json)");
  }
  emit(os.str(), out_path);
  return kExitOk;
}

// ---- moment ---------------------------------------------------------------

// Closed-form value when one exists for this measure and exponent vector.
std::optional<double> closed_form_moment(const LambdaMeasure& measure, const MomentKey& key) {
  if (measure.is_star_preset()) return star_moment(key.exponents);
  if (measure.is_kingman_preset()) {
    if (key.j() == 1 && key.exponents[0] <= 4) return kingman_marginal(key.n, key.exponents[0]);
    if (key.exponents == std::vector<int>{1, 1}) return kingman_pair(key.n);
  }
  if (measure.is_bs_preset()) {
    if (key.exponents == std::vector<int>{1}) return bs_mean_exact(key.n);
    if (key.exponents == std::vector<int>{1, 1}) return bs_pair_exact(key.n);
  }
  return std::nullopt;
}

int cmd_moment(const std::string& measure_str, const std::string& n_list,
               const std::string& k_list, bool exact, const std::string& source,
               int n_max_cap, const std::string& format, const std::string& out_path) {
  LambdaMeasure measure = LambdaMeasure::parse(measure_str);
  std::vector<int> ns = parse_int_list(n_list, "n");
  std::vector<int> ks = parse_int_list(k_list, "k");
  int n_top = *std::max_element(ns.begin(), ns.end());
  if (n_max_cap > 0 && n_top > n_max_cap) {
    throw ValidationError("requested n exceeds --nmax cap");
  }

  struct Entry {
    MomentKey key;
    double engine = 0.0;
    std::optional<double> closed;
    std::optional<Rational> exact_value;
    std::string source;
  };
  std::vector<Entry> entries;

  std::optional<RateTable> table;
  std::optional<MomentEngine> engine;
  std::optional<ExactRateTable> exact_table;
  std::optional<ExactMomentEngine> exact_engine;

  const bool want_engine = source == "engine" || source == "both";
  const bool want_closed = source == "closed" || source == "both";
  if (!want_engine && !want_closed) {
    throw ValidationError("unknown source '" + source + "' (engine|closed|both)");
  }

  for (int n : ns) {
    Entry e;
    e.key = canonical_key(n, ks);
    if (want_engine) {
      if (!engine) {
        table.emplace(measure, n_top);
        engine.emplace(*table);
      }
      e.engine = engine->moment(e.key);
      e.source = "engine";
    }
    if (want_closed) {
      e.closed = closed_form_moment(measure, e.key);
      if (!e.closed && !want_engine) {
        throw ValidationError("no closed form for measure '" + measure_str + "' and k=" +
                              k_list + "; use --source engine");
      }
      if (!want_engine && e.closed) {
        e.engine = *e.closed;
        e.source = "closed_form";
      } else if (e.closed) {
        e.source = "engine+closed_form";
      }
    }
    if (exact) {
      if (!exact_engine) {
        exact_table.emplace(measure, n_top);
        exact_engine.emplace(*exact_table);
      }
      e.exact_value = exact_engine->moment(e.key);
    }
    entries.push_back(std::move(e));
  }

  std::ostringstream os;
  if (format == "csv") {
    os << "n,k,value\n";
    for (const Entry& e : entries) {
      std::string kstr;
      for (std::size_t i = 0; i < e.key.exponents.size(); ++i) {
        if (i) kstr += '+';
        kstr += std::to_string(e.key.exponents[i]);
      }
      os << e.key.n << ',' << kstr << ',' << format_full(e.engine) << '\n';
    }
  } else if (format == "json") {
    nlohmann::json j = nlohmann::json::array();
    for (const Entry& e : entries) {
      nlohmann::json item{{"n", e.key.n},
                          {"k", e.key.exponents},
                          {"value", e.engine},
                          {"source", e.source}};
      if (e.closed) item["closed_form"] = *e.closed;
      if (e.exact_value) {
        item["exact"] = static_cast<double>(*e.exact_value);
        item["exact_rational"] =
            e.exact_value->str();
      }
      j.push_back(item);
    }
    os << j.dump(2) << '\n';
  } else if (format == "pretty") {
    for (const Entry& e : entries) {
      os << "mu_" << e.key.n << "(";
      for (std::size_t i = 0; i < e.key.exponents.size(); ++i) {
        if (i) os << ',';
        os << e.key.exponents[i];
      }
      os << ") = " << format_full(e.engine) << "  [" << e.source << "]";
      if (e.closed && e.source == "engine+closed_form") {
        os << "  closed_form=" << format_full(*e.closed);
      }
      if (e.exact_value) {
        os << "  exact=" << e.exact_value->str();
      }
      os << '\n';
    }
  } else {
    throw ValidationError("unknown format '" + format + "' (pretty|csv|json)");
  }
  emit(os.str(), out_path);
  return kExitOk;
}

// ---- rates ------------------------------------------------------------------

int cmd_rates(const std::string& measure_str, int n_max, const std::string& out_path) {
  LambdaMeasure measure = LambdaMeasure::parse(measure_str);
  RateTable table(measure, n_max);
  std::ostringstream os;
  table.write_csv(os);
  emit(os.str(), out_path);
  return kExitOk;
}

// ---- simulate ---------------------------------------------------------------

int cmd_simulate(const std::string& measure_str, int n, const std::string& k_list, bool total,
                 int order, long replicates, std::uint64_t seed, int threads,
                 const std::string& samples_file, const std::string& out_path) {
  LambdaMeasure measure = LambdaMeasure::parse(measure_str);
  RateTable table(measure, n);
  SimConfig config;
  config.n = n;
  config.replicates = replicates;
  config.base_seed = seed;
  config.threads = threads;
  if (total) {
    if (order < 1) throw ValidationError("--total needs --order >= 1");
    config.total_order = order;
  } else {
    config.exponents = parse_int_list(k_list, "k");
  }
  std::vector<double> samples;
  Estimate est = estimate_moment(table, config, samples_file.empty() ? nullptr : &samples);
  if (!samples_file.empty()) {
    auto p = resolve_out(samples_file);
    std::ofstream os(p);
    if (!os) throw ValidationError("cannot open samples file " + p.string());
    for (double v : samples) os << format_full(v) << '\n';
  }
  emit(est.json() + "\n", out_path);
  return kExitOk;
}

// ---- verify -----------------------------------------------------------------

int cmd_verify(const std::string& measure_str, const VerifyDefaults& defaults, int n_max,
               int max_order, long replicates, std::uint64_t seed, int threads,
               double rtol, double sigmas, const std::string& format,
               const std::string& out_path) {
  VerifyOptions opt;
  opt.measure = LambdaMeasure::parse(measure_str);
  opt.n_max = n_max > 0 ? n_max : defaults.n_max;
  opt.max_order = max_order > 0 ? max_order : defaults.max_order;
  opt.replicates = replicates;
  opt.seed = seed;
  opt.threads = threads;
  opt.closed_form_rtol = rtol > 0 ? rtol : defaults.closed_form_rtol;
  opt.sim_sigmas = sigmas > 0 ? sigmas : defaults.sim_sigmas;
  opt.sim_n_grid = defaults.sim_n_grid;

  VerifyReport report = run_verify(opt);
  std::ostringstream os;
  if (format == "json") {
    os << report.json() << '\n';
  } else if (format == "pretty") {
    report.write_pretty(os);
  } else {
    throw ValidationError("unknown format '" + format + "' (pretty|json)");
  }
  emit(os.str(), out_path);
  return report.pass ? kExitOk : kExitVerifyFailed;
}

// ---- asymptotics --------------------------------------------------------------

int cmd_asymptotics(const std::string& measure_str, const std::string& k_list, bool total,
                    int order, const std::string& ngrid, const VerifyDefaults& defaults,
                    const std::string& format, const std::string& out_path) {
  std::vector<int> grid =
      ngrid.empty() ? defaults.asymptotics_n_grid : parse_int_list(ngrid, "n");
  std::sort(grid.begin(), grid.end());
  if (grid.front() < 3) throw ValidationError("asymptotics grid needs n >= 3");

  struct Row {
    int n;
    double engine, reference, ratio;
  };
  std::vector<Row> rows;
  std::string reference_name;

  if (measure_str == "bs") {
    LambdaMeasure measure = LambdaMeasure::bolthausen_sznitman();
    RateTable table(measure, grid.back());
    MomentEngine engine(table);
    if (total) {
      reference_name = "(n/log n)^k";
      for (int n : grid) {
        double e = engine.total_external_moment(n, order);
        double a = bs_total_asymptotic(order, n);
        rows.push_back({n, e, a, e / a});
      }
    } else {
      std::vector<int> ks = parse_int_list(k_list, "k");
      MomentKey key = canonical_key(grid.back(), ks);
      reference_name = "prod k_i!/(log n)^d";
      for (int n : grid) {
        double e = engine.moment(n, ks);
        double a = bs_joint_asymptotic(key.exponents, n);
        rows.push_back({n, e, a, e / a});
      }
    }
  } else if (measure_str == "kingman") {
    // Second-moment expansion diagnostics: residual scaled by n^3/log n.
    std::vector<int> ks = k_list.empty() ? std::vector<int>{2} : parse_int_list(k_list, "k");
    if (total || ks != std::vector<int>{2}) {
      throw ValidationError("kingman asymptotics supports --k 2 (second-moment expansion)");
    }
    reference_name = "8log(n)/n^2 + 8(gamma-1)/n^2; ratio = residual*n^3/log n";
    for (int n : grid) {
      double e = kingman_marginal(n, 2);
      double a = kingman_second_moment_expansion(n);
      double scaled = std::fabs(e - a) * std::pow(n, 3) / std::log(static_cast<double>(n));
      rows.push_back({n, e, a, scaled});
    }
  } else {
    throw ValidationError("asymptotics supports the presets 'bs' and 'kingman'");
  }

  std::ostringstream os;
  if (format == "csv") {
    os << "n,engine,asymptotic,ratio\n";
    for (const Row& r : rows) {
      os << r.n << ',' << format_full(r.engine) << ',' << format_full(r.reference) << ','
         << format_full(r.ratio) << '\n';
    }
  } else if (format == "pretty") {
    os << "measure: " << measure_str << "   reference: " << reference_name << '\n';
    os << std::setw(8) << "n" << std::setw(24) << "engine" << std::setw(24) << "asymptotic"
       << std::setw(24) << "ratio" << '\n';
    for (const Row& r : rows) {
      os << std::setw(8) << r.n << std::setw(24) << format_full(r.engine) << std::setw(24)
         << format_full(r.reference) << std::setw(24) << format_full(r.ratio) << '\n';
    }
  } else {
    throw ValidationError("unknown format '" + format + "' (pretty|csv)");
  }
  emit(os.str(), out_path);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact and Monte Carlo moments of Lambda-coalescent external branch lengths"};
  app.require_subcommand(1);

  std::string measure = "bs";
  std::string format;
  std::string out_path;
  std::string config_path;
  std::string n_list = "10";
  std::string k_list = "1";
  std::string ngrid;
  std::string samples_file;
  bool exact = false;
  bool total = false;
  std::string source = "engine";
  int n_max = 0;
  int order = 1;
  long replicates = 0;
  std::uint64_t seed = 20130815;
  int threads = 0;
  double rtol = 0.0;
  double sigmas = 0.0;

  auto* table_cmd = app.add_subcommand("table", "reference covariance table for a preset");
  table_cmd->add_option("--measure", measure, "kingman|bs")->required();
  std::string table_format = "pretty";
  table_cmd->add_option("--format", table_format, "pretty|csv|json");
  table_cmd->add_option("--out", out_path, "output file (default stdout)");

  auto* moment_cmd = app.add_subcommand("moment", "joint moment mu_n(k)");
  moment_cmd->add_option("--measure", measure)->required();
  moment_cmd->add_option("--n", n_list, "sample size(s), comma separated")->required();
  moment_cmd->add_option("--k", k_list, "exponents, comma separated")->required();
  moment_cmd->add_flag("--exact", exact, "also evaluate with exact rationals (presets)");
  moment_cmd->add_option("--source", source, "engine|closed|both");
  moment_cmd->add_option("--nmax", n_max, "cap on table size");
  std::string moment_format = "pretty";
  moment_cmd->add_option("--format", moment_format, "pretty|csv|json");
  moment_cmd->add_option("--out", out_path);

  auto* rates_cmd = app.add_subcommand("rates", "collision-rate table as CSV");
  rates_cmd->add_option("--measure", measure)->required();
  rates_cmd->add_option("--nmax", n_max, "table size")->required();
  rates_cmd->add_option("--out", out_path);

  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo estimate of a moment");
  sim_cmd->add_option("--measure", measure)->required();
  int sim_n = 10;
  sim_cmd->add_option("--n", sim_n, "sample size")->required();
  sim_cmd->add_option("--k", k_list, "exponents for a joint moment");
  sim_cmd->add_flag("--total", total, "estimate a moment of the total external length");
  sim_cmd->add_option("--order", order, "power for --total");
  sim_cmd->add_option("--replicates", replicates)->required();
  sim_cmd->add_option("--seed", seed);
  sim_cmd->add_option("--threads", threads);
  sim_cmd->add_option("--samples-file", samples_file, "stream raw samples, one per line");
  sim_cmd->add_option("--out", out_path);

  auto* verify_cmd = app.add_subcommand("verify", "engine vs closed forms vs simulation");
  verify_cmd->add_option("--measure", measure)->required();
  verify_cmd->add_option("--nmax", n_max);
  int verify_order = 0;
  verify_cmd->add_option("--order", verify_order, "max moment order");
  verify_cmd->add_option("--replicates", replicates, "simulation replicates (0 = skip)");
  verify_cmd->add_option("--seed", seed);
  verify_cmd->add_option("--threads", threads);
  verify_cmd->add_option("--rtol", rtol, "closed-form relative tolerance");
  verify_cmd->add_option("--sigmas", sigmas, "simulation agreement width");
  verify_cmd->add_option("--config", config_path, "defaults file (JSON)");
  std::string verify_format = "json";
  verify_cmd->add_option("--format", verify_format, "pretty|json");
  verify_cmd->add_option("--out", out_path);

  auto* asym_cmd = app.add_subcommand("asymptotics", "large-n law diagnostics");
  asym_cmd->add_option("--measure", measure, "bs|kingman")->required();
  asym_cmd->add_option("--k", k_list, "exponents");
  asym_cmd->add_flag("--total", total, "total external length law");
  asym_cmd->add_option("--order", order, "power for --total");
  asym_cmd->add_option("--ngrid", ngrid, "comma separated n grid");
  asym_cmd->add_option("--config", config_path);
  std::string asym_format = "pretty";
  asym_cmd->add_option("--format", asym_format, "pretty|csv");
  asym_cmd->add_option("--out", out_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (table_cmd->parsed()) return cmd_table(measure, table_format, out_path);
    if (moment_cmd->parsed()) {
      return cmd_moment(measure, n_list, k_list, exact, source, n_max, moment_format, out_path);
    }
    if (rates_cmd->parsed()) return cmd_rates(measure, n_max, out_path);
    if (sim_cmd->parsed()) {
      return cmd_simulate(measure, sim_n, k_list, total, order, replicates, seed, threads,
                          samples_file, out_path);
    }
    if (verify_cmd->parsed()) {
      VerifyDefaults defaults = load_defaults(config_path);
      return cmd_verify(measure, defaults, n_max, verify_order, replicates, seed, threads, rtol,
                        sigmas, verify_format, out_path);
    }
    if (asym_cmd->parsed()) {
      VerifyDefaults defaults = load_defaults(config_path);
      return cmd_asymptotics(measure, k_list, total, order, ngrid, defaults, asym_format,
                             out_path);
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ResourceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}
