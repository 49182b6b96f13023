#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "qmoney/distribution.hpp"
#include "qmoney/qstate.hpp"

namespace qmoney {

inline constexpr double kUniversalClonerFidelity = 5.0 / 6.0;
inline constexpr double kInfiniteKappa = std::numeric_limits<double>::infinity();

// Modified Bessel functions of the first kind. Power series up to x = 15,
// asymptotic expansion beyond. The *_scaled variants return e^{-x} I(x).
double bessel_i0(double x);
double bessel_i1(double x);
double bessel_i0_scaled(double x);
double bessel_i1_scaled(double x);

/// von Mises-Fisher density exp(κ cos α) / (2π I0(κ)).
double vmf_density(double kappa, double alpha);

/// Detection probability of a pure state misaligned by Δθ, for detector
/// resolution κ (κ = +inf allowed):
///   [2κ cosΔθ cosh κ + πκ I1(κ) sinΔθ + 2(κ − cosΔθ) sinh κ] / (4κ sinh κ).
double f_proc_pure(double delta_theta, double kappa);

/// Inverts κ ↦ f_proc_pure(0, κ) by bisection on [1e-6, 1e4].
double solve_kappa(double target_f);

enum class AxisPolicy {
  Strict,   // reject clones with a Bloch component off the target axis
  Project,  // apply the same affine rule to any state
};

/// m0 F + (1 − m0)(1 − F), with F = ⟨ψ|ρ|ψ⟩ and m0 = f_proc_pure(0, κ).
double detection_prob(const Matrix2c& rho, const PureQubit& target, double kappa,
                      AxisPolicy policy = AxisPolicy::Strict);

/// Σ w_i detection_prob(clone_fn(q_i), q_i, κ).
double avg_verification_fidelity(const QubitDistribution& g,
                                 const std::function<Matrix2c(const PureQubit&)>& clone_fn,
                                 double kappa, AxisPolicy policy = AxisPolicy::Strict);

enum class ThresholdPolicy { UcFloor, GDependent };

ThresholdPolicy parse_threshold_policy(const std::string& name);
std::string to_string(ThresholdPolicy p);

struct VerificationModel {
  double kappa = 25.0;
  double f_pass = 0.98;
  double threshold = kUniversalClonerFidelity;
  double min_delivered = 0.5;
  ThresholdPolicy policy = ThresholdPolicy::UcFloor;

  /// uc-floor: threshold 5/6. g-dependent: max(5/6, secure_threshold(g)).
  static VerificationModel make(double kappa, ThresholdPolicy policy,
                                const QubitDistribution& g, double min_delivered = 0.5);
};

struct Decision {
  bool pass = false;
  std::vector<std::string> reasons;
};

struct ReportStats {
  double delivered_fraction = 0.0;
  double avg_fid_estimate = 0.0;
};

/// Pass iff delivered > min_delivered and estimate > threshold (both strict).
Decision decide(const ReportStats& stats, const VerificationModel& model);

struct VerificationReport {
  size_t total_cells = 0;   // non-blank cells of the genuine note
  size_t delivered = 0;
  size_t correct = 0;
  double delivered_fraction = 0.0;
  double avg_fid_estimate = 0.0;
  double stderr_estimate = 0.0;
  double threshold = 0.0;
  Decision decision;
};

/// Fixed state in one of three mutually unbiased bases against a verifier
/// drawing bases uniformly.
double mub_attack_expected_fidelity(double kappa);

/// Average single-copy fidelity of the optimal cloner for g.
double secure_threshold(const QubitDistribution& g);

}  // namespace qmoney
