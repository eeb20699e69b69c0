#include "lcoal/moments.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <ostream>
#include <set>
#include <string>

#include "lcoal/errors.hpp"
#include "lcoal/format.hpp"
#include "lcoal/numeric.hpp"

namespace lcoal {

namespace {

// Decrement the last instance of `value` in a non-increasing vector; the
// result stays non-increasing, zeros are dropped.
std::vector<int> decremented(const std::vector<int>& exps, int value) {
  std::vector<int> out = exps;
  for (auto it = out.rbegin(); it != out.rend(); ++it) {
    if (*it == value) {
      --*it;
      if (*it == 0) out.erase(std::next(it).base());
      break;
    }
  }
  return out;
}

void check_canonical(const MomentKey& key) {
  if (key.n < 1) throw ValidationError("moment key needs n >= 1");
  for (std::size_t i = 0; i < key.exponents.size(); ++i) {
    if (key.exponents[i] < 1) throw ValidationError("moment key exponents must be positive");
    if (i > 0 && key.exponents[i] > key.exponents[i - 1]) {
      throw ValidationError("moment key exponents must be non-increasing");
    }
  }
  if (key.j() > key.n) {
    throw ValidationError("moment key has more tagged branches (" + std::to_string(key.j()) +
                          ") than sample size n=" + std::to_string(key.n));
  }
}

// Multisets reachable from `exponents` by repeated decrements, sorted by
// order ascending so the evaluation can proceed level by level.
std::vector<std::vector<int>> dependency_closure(const std::vector<int>& exponents) {
  std::set<std::vector<int>> seen;
  std::vector<std::vector<int>> queue{exponents};
  seen.insert(exponents);
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    std::vector<int> cur = queue[qi];
    std::set<int> distinct(cur.begin(), cur.end());
    for (int v : distinct) {
      std::vector<int> next = decremented(cur, v);
      if (seen.insert(next).second) queue.push_back(next);
    }
  }
  std::vector<std::vector<int>> out(seen.begin(), seen.end());
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    long da = 0, db = 0;
    for (int v : a) da += v;
    for (int v : b) db += v;
    return da < db;
  });
  return out;
}

}  // namespace

int MomentKey::order() const {
  int d = 0;
  for (int v : exponents) d += v;
  return d;
}

MomentKey canonical_key(int n, std::span<const int> raw_exponents) {
  if (n < 1) throw ValidationError("moment key needs n >= 1");
  MomentKey key;
  key.n = n;
  for (int v : raw_exponents) {
    if (v < 0) throw ValidationError("moment exponents must be nonnegative");
    if (v > 0) key.exponents.push_back(v);
  }
  std::sort(key.exponents.begin(), key.exponents.end(), std::greater<int>());
  if (key.j() > n) {
    throw ValidationError("more positive exponents (" + std::to_string(key.j()) +
                          ") than sample size n=" + std::to_string(n));
  }
  return key;
}

std::size_t ExponentsHash::operator()(const std::vector<int>& v) const {
  std::size_t h = 1469598103934665603ull;
  for (int x : v) {
    h ^= static_cast<std::size_t>(x) + 0x9e3779b9;
    h *= 1099511628211ull;
  }
  return h;
}

void MomentEngine::ensure(const std::vector<int>& exponents, int n_target) {
  for (const std::vector<int>& k : dependency_closure(exponents)) {
    std::vector<double>& row = values_[k];
    if (static_cast<int>(row.size()) >= n_target + 1) continue;
    const int start = static_cast<int>(row.size());
    row.resize(n_target + 1, 0.0);

    if (k.empty()) {
      for (int n = start; n <= n_target; ++n) row[n] = 1.0;
      continue;
    }

    const int j = static_cast<int>(k.size());
    // Distinct exponent values with multiplicities, each with its
    // order-(d-1) sub-row (already computed by the closure ordering).
    struct FirstTerm {
      double weight;  // multiplicity * value
      const std::vector<double>* sub;
    };
    std::vector<FirstTerm> first_terms;
    for (std::size_t i = 0; i < k.size();) {
      std::size_t run = i;
      while (run < k.size() && k[run] == k[i]) ++run;
      first_terms.push_back({static_cast<double>(run - i) * k[i], &values_.at(decremented(k, k[i]))});
      i = run;
    }

    for (int n = std::max(start, 1); n <= n_target; ++n) {
      if (n < std::max(2, j)) {
        row[n] = 0.0;  // tau_{1,1} = 0; entries below n = j are placeholders
        continue;
      }
      double first = 0.0;
      for (const FirstTerm& t : first_terms) first += t.weight * (*t.sub)[n];
      first /= table_->g_total(n);

      KahanSum second;
      for (int m = j + 1; m <= n - 1; ++m) {
        second.add(table_->p(n, m) * falling_factorial_ratio(m - 1, n, j) * row[m]);
      }
      row[n] = first + second.value();
    }
  }
}

double MomentEngine::moment(const MomentKey& key) {
  check_canonical(key);
  if (key.exponents.empty()) return 1.0;
  if (key.n == 1) return 0.0;
  if (key.n > table_->n_max()) {
    throw ValidationError("moment at n=" + std::to_string(key.n) +
                          " exceeds rate table n_max=" + std::to_string(table_->n_max()));
  }
  ensure(key.exponents, key.n);
  return values_.at(key.exponents)[key.n];
}

double MomentEngine::moment(int n, std::span<const int> raw_exponents) {
  return moment(canonical_key(n, raw_exponents));
}

double MomentEngine::covariance_pair(int n) {
  if (n < 2) throw ValidationError("pair covariance needs n >= 2");
  double m1 = moment(canonical_key(n, std::array{1}));
  double m11 = moment(canonical_key(n, std::array{1, 1}));
  return m11 - m1 * m1;
}

std::vector<std::vector<int>> integer_partitions(int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int rest, int max_part) -> void {
    if (rest == 0) {
      out.push_back(cur);
      return;
    }
    for (int part = std::min(rest, max_part); part >= 1; --part) {
      cur.push_back(part);
      self(self, rest - part, part);
      cur.pop_back();
    }
  };
  rec(rec, k, k);
  return out;
}

double MomentEngine::total_external_moment(int n, int k) {
  if (n < 2) throw ValidationError("total external length needs n >= 2");
  if (k < 1) throw ValidationError("total external moment needs k >= 1");

  double k_fact = 1.0;
  for (int i = 2; i <= k; ++i) k_fact *= i;

  KahanSum sum;
  for (const std::vector<int>& parts : integer_partitions(k)) {
    const int j = static_cast<int>(parts.size());
    if (j > n) continue;  // needs more tagged branches than exist

    double binom = 1.0;  // C(n, j)
    for (int t = 1; t <= j; ++t) binom *= static_cast<double>(n - j + t) / t;

    // distinct orderings of the partition and the shared multinomial weight
    double orderings = 1.0;
    for (int t = 2; t <= j; ++t) orderings *= t;
    double multinomial = k_fact;
    int run_len = 1;
    for (int t = 0; t < j; ++t) {
      double part_fact = 1.0;
      for (int i = 2; i <= parts[t]; ++i) part_fact *= i;
      multinomial /= part_fact;
      if (t > 0 && parts[t] == parts[t - 1]) {
        ++run_len;
        orderings /= run_len;
      } else {
        run_len = 1;
      }
    }

    sum.add(binom * orderings * multinomial * moment(canonical_key(n, parts)));
  }
  return sum.value();
}

void MomentEngine::write_csv_row(std::ostream& os, const MomentKey& key) {
  std::string kstr;
  for (std::size_t i = 0; i < key.exponents.size(); ++i) {
    if (i) kstr += '+';
    kstr += std::to_string(key.exponents[i]);
  }
  os << key.n << ',' << kstr << ',' << format_full(moment(key)) << '\n';
}

void ExactMomentEngine::ensure(const std::vector<int>& exponents, int n_target) {
  for (const std::vector<int>& k : dependency_closure(exponents)) {
    std::vector<Rational>& row = values_[k];
    if (static_cast<int>(row.size()) >= n_target + 1) continue;
    const int start = static_cast<int>(row.size());
    row.resize(n_target + 1, Rational(0));

    if (k.empty()) {
      for (int n = start; n <= n_target; ++n) row[n] = 1;
      continue;
    }

    const int j = static_cast<int>(k.size());
    for (int n = std::max(start, 1); n <= n_target; ++n) {
      if (n < std::max(2, j)) continue;
      Rational first = 0;
      for (std::size_t i = 0; i < k.size();) {
        std::size_t run = i;
        while (run < k.size() && k[run] == k[i]) ++run;
        const std::vector<Rational>& sub = values_.at(decremented(k, k[i]));
        first += Rational(static_cast<long>(run - i) * k[i]) * sub[n];
        i = run;
      }
      first /= table_->g_total(n);

      Rational second = 0;
      for (int m = j + 1; m <= n - 1; ++m) {
        Rational ratio = 1;
        for (int t = 0; t < j; ++t) ratio *= Rational(m - 1 - t, n - t);
        second += table_->p(n, m) * ratio * row[m];
      }
      row[n] = first + second;
    }
  }
}

Rational ExactMomentEngine::moment(const MomentKey& key) {
  check_canonical(key);
  if (key.exponents.empty()) return 1;
  if (key.n == 1) return 0;
  if (key.n > table_->n_max()) {
    throw ValidationError("moment at n=" + std::to_string(key.n) +
                          " exceeds exact table n_max=" + std::to_string(table_->n_max()));
  }
  ensure(key.exponents, key.n);
  return values_.at(key.exponents)[key.n];
}

Rational ExactMomentEngine::moment(int n, std::span<const int> raw_exponents) {
  return moment(canonical_key(n, raw_exponents));
}

}  // namespace lcoal
