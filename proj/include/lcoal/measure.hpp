#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lcoal {

struct Atom {
  double x;  // location in [0,1]
  double w;  // weight > 0
};

struct BetaParams {
  double a;
  double b;
};

// A finite measure Lambda on [0,1]: point atoms plus at most one named
// density with a declared total mass. The density part is either a Beta(a,b)
// family member (rates then have a closed form) or a registry entry
// integrated by quadrature.
class LambdaMeasure {
 public:
  enum class DensityKind { kNone, kUniform, kBeta };

  static LambdaMeasure kingman();              // unit atom at 0
  static LambdaMeasure star();                 // unit atom at 1
  static LambdaMeasure bolthausen_sznitman();  // Beta(1,1) = uniform, mass 1
  static LambdaMeasure beta(double a, double b, double mass = 1.0);
  // Beta density integrated numerically instead of via the closed form;
  // exists so the two rate routes can be checked against each other.
  static LambdaMeasure beta_via_quadrature(double a, double b, double mass = 1.0);
  static LambdaMeasure uniform_density(double mass = 1.0);  // quadrature route
  static LambdaMeasure from_atoms(std::vector<Atom> atoms);
  // Copy of this measure with point atoms added to the density part.
  LambdaMeasure with_atoms(std::vector<Atom> atoms) const;

  // Grammar: kingman | star | bs | beta:a=<f>,b=<f> | atoms:(x,w);(x,w);...
  static LambdaMeasure parse(std::string_view text);
  std::string to_string() const;  // canonical form; parse() round-trips it

  double total_mass() const;

  const std::vector<Atom>& atoms() const { return atoms_; }
  DensityKind density_kind() const { return density_kind_; }
  bool has_density() const { return density_kind_ != DensityKind::kNone; }
  double density_mass() const { return density_mass_; }
  const std::optional<BetaParams>& beta_params() const { return beta_; }
  // True when the density part can be integrated in closed form.
  bool beta_closed_form() const { return beta_closed_form_; }
  // Pointwise value of the density part at x in (0,1), mass included.
  double density_value(double x) const;

  bool is_kingman_preset() const;
  bool is_star_preset() const;
  bool is_bs_preset() const;
  // Presets whose rates are rational (exact construction is available).
  bool exact_preset() const { return is_kingman_preset() || is_star_preset() || is_bs_preset(); }

 private:
  LambdaMeasure() = default;
  void validate() const;

  std::vector<Atom> atoms_;
  DensityKind density_kind_ = DensityKind::kNone;
  double density_mass_ = 0.0;
  std::optional<BetaParams> beta_;
  bool beta_closed_form_ = true;
  std::string preset_name_;  // set when built from a named preset
};

}  // namespace lcoal
