#pragma once

#include "lcoal/closed_forms.hpp"
#include "lcoal/measure.hpp"

namespace lcoal {

// Exact-rational collision rates. Only the presets with rational rates are
// supported: Kingman (g_{n,n-1} = n(n-1)/2), star (g_{n,1} = 1) and
// Bolthausen-Sznitman (g_{nm} = n/((n-m)(n-m+1)), g_n = n-1). Values are
// computed on demand; the object just validates and carries the cap.
class ExactRateTable {
 public:
  enum class Preset { kKingman, kStar, kBolthausenSznitman };

  ExactRateTable(const LambdaMeasure& measure, int n_max, int cap = 200);

  int n_max() const { return n_max_; }
  Preset preset() const { return preset_; }

  Rational g(int n, int m) const;
  Rational g_total(int n) const;
  Rational p(int n, int m) const { return g(n, m) / g_total(n); }

 private:
  Preset preset_;
  int n_max_;
};

}  // namespace lcoal
