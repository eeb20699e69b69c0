#include "lcoal/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include <json.hpp>

#include "lcoal/errors.hpp"
#include "lcoal/moments.hpp"

namespace lcoal {

namespace {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng Rng::seeded(std::uint64_t seed) {
  Rng rng;
  std::uint64_t state = seed;
  for (auto& word : rng.s_) word = splitmix64(state);
  return rng;
}

Rng Rng::for_replicate(std::uint64_t base_seed, std::uint64_t replicate) {
  // Stream key mixes the replicate index into the seed before state
  // expansion; distinct replicates land at unrelated points of the 2^256
  // state space.
  std::uint64_t state = base_seed;
  std::uint64_t a = splitmix64(state);
  state = a ^ (replicate * 0xda942042e4dd58b5ull + 0x632be59bd9b4e019ull);
  Rng rng;
  for (auto& word : rng.s_) word = splitmix64(state);
  return rng;
}

std::uint64_t Rng::next() {
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Rng::exponential(double rate) { return -std::log1p(-uniform01()) / rate; }

namespace {

void check_sim_domain(const RateTable& table, int n) {
  if (n < 2) throw ValidationError("simulation needs n >= 2");
  if (n > table.n_max()) {
    throw ValidationError("simulation n=" + std::to_string(n) + " exceeds rate table n_max=" +
                          std::to_string(table.n_max()));
  }
}

// Landing state of one jump from b blocks, by descending scan of the rate
// row. Small jumps dominate every measure we care about, so scanning from
// m = b-1 down is O(expected jump size).
int draw_jump_target(const RateTable& table, int b, Rng& rng) {
  double u = rng.uniform01() * table.g_total(b);
  double acc = 0.0;
  for (int m = b - 1; m >= 2; --m) {
    acc += table.g(b, m);
    if (u < acc) return m;
  }
  return 1;
}

}  // namespace

void sample_tagged_lengths(const RateTable& table, int n, int j, Rng& rng,
                           std::span<double> out) {
  check_sim_domain(table, n);
  if (j < 1 || j > n) throw ValidationError("need 1 <= j <= n tagged branches");

  // alive[0..alive_count) holds indices of tagged singletons still alive.
  std::vector<int> alive(j);
  for (int i = 0; i < j; ++i) alive[i] = i;
  int alive_count = j;
  int b = n;
  double elapsed = 0.0;

  while (b > 1 && alive_count > 0) {
    elapsed += rng.exponential(table.g_total(b));
    const int m = draw_jump_target(table, b, rng);
    const int merge_size = b - m + 1;

    // Each alive tagged singleton occupies one distinct block; walk them,
    // conditioning the uniform merge-set membership sequentially.
    int slots = merge_size;
    int pool = b;
    for (int i = 0; i < alive_count;) {
      if (rng.uniform01() * pool < slots) {
        out[alive[i]] = elapsed;
        --slots;
        alive[i] = alive[--alive_count];  // dead; order of the rest is irrelevant
      } else {
        ++i;
      }
      --pool;
    }
    b = m;
  }
  // A jump to m = 1 merges every block, so no tagged singleton survives to
  // b = 1; nothing left to assign.
}

std::vector<double> sample_tagged_lengths(const RateTable& table, int n, int j, Rng& rng) {
  std::vector<double> out(j, 0.0);
  sample_tagged_lengths(table, n, j, rng, out);
  return out;
}

double sample_total_external(const RateTable& table, int n, Rng& rng) {
  check_sim_domain(table, n);
  int b = n;
  int singletons = n;
  double length = 0.0;
  while (b > 1 && singletons > 0) {
    length += singletons * rng.exponential(table.g_total(b));
    const int m = draw_jump_target(table, b, rng);
    const int merge_size = b - m + 1;
    // Hypergeometric(b, singletons, merge_size): draw the merge slots one at
    // a time. Total slots over a whole run is n-1, so a replicate is O(n).
    int pool = b;
    int white = singletons;
    for (int slot = 0; slot < merge_size; ++slot) {
      if (rng.uniform01() * pool < white) {
        --white;
        --singletons;
      }
      --pool;
    }
    b = m;
  }
  return length;
}

namespace {

struct BlockStats {
  long count = 0;
  double mean = 0.0;
  double m2 = 0.0;
};

// Chan's pairwise combination, applied strictly in block-index order.
BlockStats combine(const BlockStats& a, const BlockStats& b) {
  if (a.count == 0) return b;
  if (b.count == 0) return a;
  BlockStats out;
  out.count = a.count + b.count;
  const double delta = b.mean - a.mean;
  out.mean = a.mean + delta * static_cast<double>(b.count) / out.count;
  out.m2 = a.m2 + b.m2 +
           delta * delta * static_cast<double>(a.count) * static_cast<double>(b.count) / out.count;
  return out;
}

constexpr long kBlockSize = 8192;  // fixed, so grouping is schedule-independent

template <class SampleFn>
Estimate run_estimate(const SimConfig& config, std::string config_echo, SampleFn sample_one,
                      std::vector<double>* samples_out) {
  if (config.replicates < 1) throw ValidationError("need at least one replicate");

  const long blocks = (config.replicates + kBlockSize - 1) / kBlockSize;
  std::vector<BlockStats> stats(blocks);
  if (samples_out) samples_out->assign(config.replicates, 0.0);

  std::atomic<long> next_block{0};
  auto worker = [&]() {
    for (;;) {
      const long blk = next_block.fetch_add(1);
      if (blk >= blocks) return;
      const long lo = blk * kBlockSize;
      const long hi = std::min(lo + kBlockSize, config.replicates);
      BlockStats bs;
      for (long r = lo; r < hi; ++r) {
        Rng rng = Rng::for_replicate(config.base_seed, static_cast<std::uint64_t>(r));
        const double x = sample_one(rng);
        if (samples_out) (*samples_out)[r] = x;
        ++bs.count;
        const double delta = x - bs.mean;
        bs.mean += delta / bs.count;
        bs.m2 += delta * (x - bs.mean);
      }
      stats[blk] = bs;
    }
  };

  long threads = config.threads > 0 ? config.threads
                                    : static_cast<long>(std::thread::hardware_concurrency());
  threads = std::clamp<long>(threads, 1, blocks);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  BlockStats total;
  for (const BlockStats& bs : stats) total = combine(total, bs);

  Estimate est;
  est.replicates = total.count;
  est.seed = config.base_seed;
  est.mean = total.mean;
  est.stderr_ = total.count > 1
                    ? std::sqrt(total.m2 / (static_cast<double>(total.count) - 1.0) /
                                static_cast<double>(total.count))
                    : 0.0;
  est.config = std::move(config_echo);
  return est;
}

std::string exponents_echo(std::span<const int> exponents) {
  std::string s;
  for (std::size_t i = 0; i < exponents.size(); ++i) {
    if (i) s += '+';
    s += std::to_string(exponents[i]);
  }
  return s;
}

}  // namespace

Estimate estimate_moment(const RateTable& table, const SimConfig& config,
                         std::vector<double>* samples_out) {
  check_sim_domain(table, config.n);
  if (config.total_order > 0) {
    return run_estimate(
        config,
        "total n=" + std::to_string(config.n) + " k=" + std::to_string(config.total_order) +
            " measure=" + table.measure().to_string(),
        [&](Rng& rng) {
          double length = sample_total_external(table, config.n, rng);
          double x = 1.0;
          for (int i = 0; i < config.total_order; ++i) x *= length;
          return x;
        },
        samples_out);
  }

  const MomentKey key = canonical_key(config.n, config.exponents);
  if (key.exponents.empty()) throw ValidationError("joint-moment estimate needs exponents");
  const int j = key.j();
  return run_estimate(
      config,
      "joint n=" + std::to_string(config.n) + " k=" + exponents_echo(key.exponents) +
          " measure=" + table.measure().to_string(),
      [&, j](Rng& rng) {
        std::vector<double> lengths(j, 0.0);
        sample_tagged_lengths(table, config.n, j, rng, lengths);
        double x = 1.0;
        for (int i = 0; i < j; ++i) {
          for (int rep = 0; rep < key.exponents[i]; ++rep) x *= lengths[i];
        }
        return x;
      },
      samples_out);
}

Estimate estimate_joint_moment(const RateTable& table, int n, std::span<const int> exponents,
                               long replicates, std::uint64_t seed, int threads,
                               std::vector<double>* samples_out) {
  SimConfig config;
  config.n = n;
  config.exponents.assign(exponents.begin(), exponents.end());
  config.replicates = replicates;
  config.base_seed = seed;
  config.threads = threads;
  return estimate_moment(table, config, samples_out);
}

Estimate estimate_total_moment(const RateTable& table, int n, int order, long replicates,
                               std::uint64_t seed, int threads,
                               std::vector<double>* samples_out) {
  SimConfig config;
  config.n = n;
  config.total_order = order;
  config.replicates = replicates;
  config.base_seed = seed;
  config.threads = threads;
  return estimate_moment(table, config, samples_out);
}

FirstCollisionCounts sample_first_collision(const RateTable& table, int n, int j,
                                            long replicates, std::uint64_t seed) {
  check_sim_domain(table, n);
  if (j < 1 || j > n) throw ValidationError("need 1 <= j <= n tagged branches");
  if (replicates < 1) throw ValidationError("need at least one replicate");
  FirstCollisionCounts counts;
  counts.total.assign(n, 0);
  counts.none_involved.assign(n, 0);
  for (long r = 0; r < replicates; ++r) {
    Rng rng = Rng::for_replicate(seed, static_cast<std::uint64_t>(r));
    const int m = draw_jump_target(table, n, rng);
    const int merge_size = n - m + 1;
    int slots = merge_size;
    int pool = n;
    bool any = false;
    for (int i = 0; i < j; ++i) {
      if (rng.uniform01() * pool < slots) {
        any = true;
        --slots;
      }
      --pool;
    }
    ++counts.total[m];
    if (!any) ++counts.none_involved[m];
  }
  return counts;
}

double ks_exponential(std::span<const double> samples) {
  if (samples.empty()) throw ValidationError("KS statistic needs at least one sample");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double inv_n = 1.0 / static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double cdf = -std::expm1(-sorted[i]);
    d = std::max(d, std::max(cdf - static_cast<double>(i) * inv_n,
                             static_cast<double>(i + 1) * inv_n - cdf));
  }
  return d;
}

std::string Estimate::json() const {
  nlohmann::json j{
      {"mean", mean}, {"stderr", stderr_}, {"replicates", replicates}, {"seed", seed}};
  return j.dump();
}

}  // namespace lcoal
