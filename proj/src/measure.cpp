#include "lcoal/measure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "lcoal/errors.hpp"
#include "lcoal/numeric.hpp"

namespace lcoal {

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

[[noreturn]] void parse_fail(std::string_view text, std::size_t pos, const std::string& why) {
  throw ValidationError("bad measure string '" + std::string(text) + "' at offset " +
                        std::to_string(pos) + ": " + why);
}

}  // namespace

LambdaMeasure LambdaMeasure::kingman() {
  LambdaMeasure m;
  m.atoms_ = {{0.0, 1.0}};
  m.preset_name_ = "kingman";
  m.validate();
  return m;
}

LambdaMeasure LambdaMeasure::star() {
  LambdaMeasure m;
  m.atoms_ = {{1.0, 1.0}};
  m.preset_name_ = "star";
  m.validate();
  return m;
}

LambdaMeasure LambdaMeasure::bolthausen_sznitman() {
  LambdaMeasure m = beta(1.0, 1.0, 1.0);
  m.preset_name_ = "bs";
  return m;
}

LambdaMeasure LambdaMeasure::beta(double a, double b, double mass) {
  if (!(a > 0.0) || !(b > 0.0)) throw ValidationError("beta parameters must be positive");
  if (!(mass > 0.0) || !std::isfinite(mass)) throw ValidationError("density mass must be positive and finite");
  LambdaMeasure m;
  m.density_kind_ = DensityKind::kBeta;
  m.density_mass_ = mass;
  m.beta_ = BetaParams{a, b};
  m.beta_closed_form_ = true;
  m.validate();
  return m;
}

LambdaMeasure LambdaMeasure::beta_via_quadrature(double a, double b, double mass) {
  LambdaMeasure m = beta(a, b, mass);
  m.beta_closed_form_ = false;
  m.preset_name_.clear();
  return m;
}

LambdaMeasure LambdaMeasure::uniform_density(double mass) {
  if (!(mass > 0.0) || !std::isfinite(mass)) throw ValidationError("density mass must be positive and finite");
  LambdaMeasure m;
  m.density_kind_ = DensityKind::kUniform;
  m.density_mass_ = mass;
  m.validate();
  return m;
}

LambdaMeasure LambdaMeasure::from_atoms(std::vector<Atom> atoms) {
  LambdaMeasure m;
  m.atoms_ = std::move(atoms);
  m.validate();
  return m;
}

LambdaMeasure LambdaMeasure::with_atoms(std::vector<Atom> atoms) const {
  LambdaMeasure m = *this;
  m.atoms_.insert(m.atoms_.end(), atoms.begin(), atoms.end());
  m.preset_name_.clear();
  m.validate();
  return m;
}

void LambdaMeasure::validate() const {
  std::set<double> seen;
  for (const Atom& a : atoms_) {
    if (!(a.x >= 0.0 && a.x <= 1.0)) throw ValidationError("atom location outside [0,1]");
    if (!(a.w > 0.0) || !std::isfinite(a.w)) throw ValidationError("atom weight must be positive and finite");
    if (!seen.insert(a.x).second) throw ValidationError("duplicate atom location");
  }
  double mass = total_mass();
  if (!(mass > 0.0) || !std::isfinite(mass)) throw ValidationError("total mass must be positive and finite");
}

double LambdaMeasure::total_mass() const {
  KahanSum s;
  for (const Atom& a : atoms_) s.add(a.w);
  s.add(density_mass_);
  return s.value();
}

double LambdaMeasure::density_value(double x) const {
  switch (density_kind_) {
    case DensityKind::kNone:
      return 0.0;
    case DensityKind::kUniform:
      return density_mass_;
    case DensityKind::kBeta: {
      const BetaParams& p = *beta_;
      // mass * x^(a-1) (1-x)^(b-1) / B(a,b)
      double lg = (p.a - 1.0) * std::log(x) + (p.b - 1.0) * std::log1p(-x) - log_beta(p.a, p.b);
      return density_mass_ * std::exp(lg);
    }
  }
  return 0.0;
}

bool LambdaMeasure::is_kingman_preset() const {
  return !has_density() && atoms_.size() == 1 && atoms_[0].x == 0.0 && atoms_[0].w == 1.0;
}

bool LambdaMeasure::is_star_preset() const {
  return !has_density() && atoms_.size() == 1 && atoms_[0].x == 1.0 && atoms_[0].w == 1.0;
}

bool LambdaMeasure::is_bs_preset() const {
  return atoms_.empty() && density_kind_ == DensityKind::kBeta && beta_closed_form_ &&
         beta_->a == 1.0 && beta_->b == 1.0 && density_mass_ == 1.0;
}

LambdaMeasure LambdaMeasure::parse(std::string_view text) {
  if (text == "kingman") return kingman();
  if (text == "star") return star();
  if (text == "bs") return bolthausen_sznitman();
  if (text == "uniform") return uniform_density();

  auto starts_with = [&](std::string_view prefix) {
    return text.size() >= prefix.size() && text.substr(0, prefix.size()) == prefix;
  };

  if (starts_with("beta:")) {
    std::string body(text.substr(5));
    double a = 0, b = 0;
    int consumed = -1;
    if (std::sscanf(body.c_str(), "a=%lf,b=%lf%n", &a, &b, &consumed) != 2 ||
        consumed != static_cast<int>(body.size())) {
      parse_fail(text, 5, "expected a=<float>,b=<float>");
    }
    return beta(a, b);
  }

  if (starts_with("atoms:")) {
    std::vector<Atom> atoms;
    std::size_t pos = 6;
    while (pos < text.size()) {
      if (text[pos] != '(') parse_fail(text, pos, "expected '('");
      std::size_t close = text.find(')', pos);
      if (close == std::string_view::npos) parse_fail(text, pos, "unterminated atom");
      std::string body(text.substr(pos + 1, close - pos - 1));
      double x = 0, w = 0;
      int consumed = -1;
      if (std::sscanf(body.c_str(), "%lf,%lf%n", &x, &w, &consumed) != 2 ||
          consumed != static_cast<int>(body.size())) {
        parse_fail(text, pos + 1, "expected (x,w)");
      }
      atoms.push_back({x, w});
      pos = close + 1;
      if (pos < text.size()) {
        if (text[pos] != ';') parse_fail(text, pos, "expected ';' between atoms");
        ++pos;
        if (pos == text.size()) parse_fail(text, pos, "trailing ';'");
      }
    }
    if (atoms.empty()) parse_fail(text, 6, "no atoms given");
    return from_atoms(std::move(atoms));
  }

  parse_fail(text, 0, "expected kingman | star | bs | beta:a=..,b=.. | atoms:(x,w);...");
}

std::string LambdaMeasure::to_string() const {
  if (is_kingman_preset()) return "kingman";
  if (is_star_preset()) return "star";
  if (is_bs_preset()) return "bs";
  if (density_kind_ == DensityKind::kBeta && atoms_.empty() && density_mass_ == 1.0 &&
      beta_closed_form_) {
    return "beta:a=" + format_double(beta_->a) + ",b=" + format_double(beta_->b);
  }
  if (density_kind_ == DensityKind::kUniform && atoms_.empty()) {
    return "uniform";
  }
  if (!atoms_.empty() && !has_density()) {
    std::string out = "atoms:";
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      if (i) out += ';';
      out += '(' + format_double(atoms_[i].x) + ',' + format_double(atoms_[i].w) + ')';
    }
    return out;
  }
  // Mixed specs have no grammar form; describe them unambiguously anyway.
  std::string out = "custom{atoms=" + std::to_string(atoms_.size()) +
                    ",density_mass=" + format_double(density_mass_) + "}";
  return out;
}

}  // namespace lcoal
