#pragma once

#include <complex>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "qmoney/qstate.hpp"

namespace qmoney {

enum class DistributionKind { Discrete, GridDensity, Uniform };

struct WeightedQubit {
  PureQubit state;
  double weight = 0.0;
};

/// Orthonormal spherical harmonic Y_l^m(theta, phi), Condon-Shortley phase,
/// l <= 2, |m| <= l.
cdouble spherical_harmonic(int l, int m, double theta, double phi);

/// Product rule on the sphere: Gauss-Legendre in cos(theta) times a uniform
/// azimuth grid. Weights sum to 4 pi.
struct SphereGrid {
  std::vector<PureQubit> nodes;
  std::vector<double> weights;

  static SphereGrid product(int n_theta = 64, int n_phi = 128);
};

/// The qubit distribution g. Point-mass weights always sum to one; the
/// uniform kind stores no points and has analytically known moments.
class QubitDistribution {
 public:
  /// Rescales exactly after checking |sum - 1| <= tol.
  static QubitDistribution discrete(std::vector<WeightedQubit> points,
                                    double tol = 1e-9);
  static QubitDistribution uniform();
  /// Samples a density g(theta, phi) (w.r.t. dOmega) on the product grid.
  static QubitDistribution from_density(
      const std::function<double(double theta, double phi)>& g,
      int n_theta = 64, int n_phi = 128, double tol = 1e-6);

  DistributionKind kind() const noexcept { return kind_; }
  const std::vector<WeightedQubit>& points() const noexcept { return points_; }

  /// Point masses; the uniform kind is materialized on the default grid.
  std::vector<WeightedQubit> support() const;

  /// Mass located at the north (theta = 0) and south (theta = pi) poles.
  double pole_mass_north() const;
  double pole_mass_south() const;

 private:
  friend QubitDistribution g_out(const QubitDistribution&,
                                 const std::function<double(const PureQubit&)>&);

  QubitDistribution(DistributionKind kind, std::vector<WeightedQubit> points)
      : kind_(kind), points_(std::move(points)) {}

  DistributionKind kind_ = DistributionKind::Uniform;
  std::vector<WeightedQubit> points_;
};

/// c_{l,m} = ∫ g Y_l^m dΩ for l <= 2. Only m >= 0 are stored; negative m follow
/// from c_{l,-m} = (-1)^m conj(c_{l,m}).
struct Moments {
  cdouble c00, c10, c11, c20, c21, c22;

  cdouble at(int l, int m) const;

  /// <cos theta>
  double a1() const;
  /// <P_2(cos theta)>
  double a2() const;

  /// Values in the 2π-larger normalization the literature quotes (c20 of
  /// banknote 1 becomes 0.25 √(5π)).
  Moments literature_scaled() const;

  bool axially_symmetric(double tol = 1e-9) const;
};

Moments moments(const QubitDistribution& g);
double mean_polarization(const QubitDistribution& g);

/// Γ = √2 γ−(γ+ − 1) / (γ+² − γ−²) with γ± = p(north) ± p(south); returns
/// ±infinity for a vanishing denominator, 0 when γ− = 0. Throws Indeterminate
/// on 0/0 with γ− ≠ 0.
double gamma_parameter(const QubitDistribution& g);

/// σ = ∫ g |ψ⟩⟨ψ| dΩ.
Matrix2c classical_replacement(const QubitDistribution& g);

/// Distribution of cloned states: mass F(q) w at q and (1 - F(q)) w at the
/// antipode; coincident points are merged.
QubitDistribution g_out(const QubitDistribution& g,
                        const std::function<double(const PureQubit&)>& per_state_fidelity);

/// Point sets equal up to ordering and merging of identical states.
bool same_distribution(const QubitDistribution& a, const QubitDistribution& b,
                       double tol = 1e-12);

// qdist v1 text format
std::string write_distribution(const QubitDistribution& g);
QubitDistribution read_distribution(std::string_view text);

}  // namespace qmoney
