#include "lcoal/exact.hpp"

#include <string>

#include "lcoal/errors.hpp"

namespace lcoal {

ExactRateTable::ExactRateTable(const LambdaMeasure& measure, int n_max, int cap)
    : n_max_(n_max) {
  if (n_max < 2) throw ValidationError("exact rate table needs n_max >= 2");
  if (n_max > cap) {
    throw ResourceError("exact rate table n_max=" + std::to_string(n_max) +
                        " exceeds cap " + std::to_string(cap));
  }
  if (measure.is_kingman_preset()) {
    preset_ = Preset::kKingman;
  } else if (measure.is_star_preset()) {
    preset_ = Preset::kStar;
  } else if (measure.is_bs_preset()) {
    preset_ = Preset::kBolthausenSznitman;
  } else {
    throw ValidationError("exact rates exist only for the kingman/star/bs presets, got '" +
                          measure.to_string() + "'");
  }
}

Rational ExactRateTable::g(int n, int m) const {
  if (n < 2 || n > n_max_ || m < 1 || m >= n) {
    throw ValidationError("exact rate index out of range: n=" + std::to_string(n) +
                          ", m=" + std::to_string(m));
  }
  switch (preset_) {
    case Preset::kKingman:
      return m == n - 1 ? Rational(static_cast<long>(n) * (n - 1), 2) : Rational(0);
    case Preset::kStar:
      return m == 1 ? Rational(1) : Rational(0);
    case Preset::kBolthausenSznitman:
      return Rational(n, static_cast<long>(n - m) * (n - m + 1));
  }
  return Rational(0);
}

Rational ExactRateTable::g_total(int n) const {
  if (n < 2 || n > n_max_) throw ValidationError("exact rate index out of range");
  switch (preset_) {
    case Preset::kKingman:
      return Rational(static_cast<long>(n) * (n - 1), 2);
    case Preset::kStar:
      return Rational(1);
    case Preset::kBolthausenSznitman:
      return Rational(n - 1);
  }
  return Rational(0);
}

}  // namespace lcoal
