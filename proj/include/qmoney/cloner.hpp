#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "qmoney/distribution.hpp"
#include "qmoney/qstate.hpp"

namespace qmoney {

/// Expansion matrices K_{l,m} for (l,m) in
/// {(0,0), (1,0), (1,1), (2,0), (2,1), (2,2)}, in that order.
/// Subsystem ordering is input ⊗ clone a ⊗ clone b.
const std::array<Matrix8c, 6>& k_matrices();

/// K_{l,m} for any |m| <= l, negative m via K_{l,-m} = (-1)^m K_{l,m}^T.
Matrix8c k_matrix(int l, int m);

/// Average-fidelity operator: F = Tr(R χ).
struct ROperator {
  Matrix8c matrix;
};

/// R = Σ_{l,m} K_{l,m} c_{l,m}. Throws NonHermitianResult on a convention bug.
ROperator build_r(const Moments& m);
inline ROperator build_r(const QubitDistribution& g) { return build_r(moments(g)); }

/// Choi operator of a 1→2 cloning map, χ = Σ |j⟩⟨k| ⊗ Φ(|j⟩⟨k|).
struct CloningMap {
  Matrix8c chi;
  double success_prob = 1.0;
  std::string label;
};

struct CptpCheck {
  double min_eigenvalue;
  double trace_deviation;  // max-entry |Tr_clones χ - 1|
  bool ok(double eig_tol = 1e-9, double trace_tol = 1e-8) const {
    return min_eigenvalue >= -eig_tol && trace_deviation <= trace_tol;
  }
};

CptpCheck check_cptp(const Matrix8c& chi);

/// Tr_clones(χ), the 2x2 operator on the input.
Matrix2c trace_clones(const Matrix8c& chi);

double average_fidelity(const ROperator& r, const CloningMap& map);

struct OptimizeOptions {
  double tol = 1e-10;      // stop when |F_{n+1} - F_n| < tol
  int max_iter = 100000;
};

struct OptimizeResult {
  CloningMap map;
  double fidelity = 0.0;
  int iterations = 0;
  std::vector<double> trajectory;  // F_n for n = 0..iterations
};

/// R-sandwich fixed-point iteration χ ← (Λ^{-1/2}⊗1) RχR (Λ^{-1/2}⊗1),
/// Λ = Tr_clones(RχR), seeded with 1/4. Deterministic.
/// Throws NoConvergence when the cap is hit with |ΔF| still above tol.
OptimizeResult optimize_chi(const ROperator& r, const OptimizeOptions& opt = {});

struct CloneStates {
  Matrix2c rho_a;
  Matrix2c rho_b;
  double f0 = 0.0;
  double f1 = 0.0;
};

/// Output states of both clones for the pure input q.
CloneStates clone_states(const CloningMap& map, const PureQubit& q);

/// Axially-symmetric 1→2 cloner fixed by the pole amplitudes Λ±. The
/// MPCC has Λ+ = Λ- = Λ, the PCC Λ± ∈ {0, 1} with Λ+ = 1 - Λ-.
struct AnalyticCloner {
  double lambda_plus = 1.0;
  double lambda_minus = 1.0;

  static AnalyticCloner mpcc(double lambda) { return {lambda, lambda}; }
  static AnalyticCloner universal();
  /// Favors the north pole when `north` is true.
  static AnalyticCloner pcc(bool north = true) {
    return north ? AnalyticCloner{1.0, 0.0} : AnalyticCloner{0.0, 1.0};
  }

  double lambda_bar_plus() const;
  double lambda_bar_minus() const;
};

struct AnalyticFidelities {
  double pole_plus;
  double pole_minus;
  double equator;
};

AnalyticFidelities analytic_clone_fidelities(const AnalyticCloner& c);

/// Choi operator of the cloning isometry followed by the ancilla trace.
CloningMap analytic_chi(const AnalyticCloner& c, double success_prob = 1.0);

enum class ClonerFamily { Pcc, Mpcc, Generic };

struct FamilySelection {
  ClonerFamily family = ClonerFamily::Generic;
  AnalyticCloner cloner;
  double gamma = 0.0;
  double fidelity = 0.0;  // Tr(R χ) of the analytic map (0 for Generic)
};

/// Chooses between PCC (|Γ| > 1), MPCC (Γ = 0 with mirror symmetry, Λ by
/// golden-section search) and the generic optimizer. Throws
/// NotAxiallySymmetric for g with any m ≠ 0 moment above 1e-9.
FamilySelection select_optimal_family(const QubitDistribution& g);

/// Golden-section maximizer of Tr(R χ_MPCC(Λ)) over Λ ∈ [0, 1].
double optimal_mpcc_lambda(const ROperator& r, double tol = 1e-8);

// qcloner v1 text format
std::string write_cloner(const CloningMap& map);
CloningMap read_cloner(std::string_view text);

}  // namespace qmoney
