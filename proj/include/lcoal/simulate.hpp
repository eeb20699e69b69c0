#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lcoal/rates.hpp"

namespace lcoal {

// xoshiro256++ with a splitmix64-filled state. Each Monte Carlo replicate
// gets its own stream derived from (base_seed, replicate), so results do not
// depend on how replicates are scheduled across threads.
class Rng {
 public:
  static Rng seeded(std::uint64_t seed);
  static Rng for_replicate(std::uint64_t base_seed, std::uint64_t replicate);

  std::uint64_t next();
  double uniform01();  // [0, 1)
  double exponential(double rate);

 private:
  std::uint64_t s_[4] = {};
};

struct SimConfig {
  int n = 0;
  std::vector<int> exponents;  // joint-moment target; ignored in total mode
  int total_order = 0;         // > 0: estimate E((L_n^ext)^total_order)
  long replicates = 0;
  std::uint64_t base_seed = 0;
  int threads = 0;  // 0 = hardware concurrency
};

struct Estimate {
  double mean = 0.0;
  double stderr_ = 0.0;  // sample standard deviation / sqrt(replicates)
  long replicates = 0;
  std::uint64_t seed = 0;
  std::string config;  // echo of what was estimated

  std::string json() const;  // {"mean":...,"stderr":...,"replicates":...,"seed":...}
};

// One joint sample of (tau_{n,1},...,tau_{n,j}). The chain only tracks the
// block count and which tagged singletons are still alive; merge membership
// of the tagged blocks is drawn sequentially from the uniform-subset law.
void sample_tagged_lengths(const RateTable& table, int n, int j, Rng& rng,
                           std::span<double> out);
std::vector<double> sample_tagged_lengths(const RateTable& table, int n, int j, Rng& rng);

// One sample of the total external branch length L_n^ext. Tracks the count
// of blocks that are still original singletons; each merge consumes a
// hypergeometric number of them.
double sample_total_external(const RateTable& table, int n, Rng& rng);

// Monte Carlo estimate of E(prod tau_i^{k_i}) (or of E((L_n^ext)^k) in total
// mode). Replicates run in fixed-size blocks that may be scheduled on any
// number of threads; block statistics are merged in index order, so the
// result is bit-identical for a given (config, base_seed) regardless of the
// schedule. If samples_out is non-null it receives one value per replicate,
// in replicate order.
Estimate estimate_moment(const RateTable& table, const SimConfig& config,
                         std::vector<double>* samples_out = nullptr);

Estimate estimate_joint_moment(const RateTable& table, int n, std::span<const int> exponents,
                               long replicates, std::uint64_t seed, int threads = 0,
                               std::vector<double>* samples_out = nullptr);
Estimate estimate_total_moment(const RateTable& table, int n, int order, long replicates,
                               std::uint64_t seed, int threads = 0,
                               std::vector<double>* samples_out = nullptr);

// Empirical law of the first collision: for each landing state m, how often
// none of the j tagged singletons was involved. Used to check the survival
// factor (m-1)_j / (n)_j directly.
struct FirstCollisionCounts {
  std::vector<long> total;          // index m = 1..n-1
  std::vector<long> none_involved;  // same indexing
};
FirstCollisionCounts sample_first_collision(const RateTable& table, int n, int j,
                                            long replicates, std::uint64_t seed);

// Kolmogorov-Smirnov distance between the empirical law of `samples` and the
// unit exponential.
double ks_exponential(std::span<const double> samples);

}  // namespace lcoal
