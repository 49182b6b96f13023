#include "qmoney/verification.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "qmoney/cloner.hpp"
#include "text_util.hpp"

namespace qmoney {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSeriesLimit = 15.0;

double bessel_series(int nu, double x) {
  const double h = 0.5 * x;
  double term = 1.0;
  for (int j = 1; j <= nu; ++j) term *= h / j;
  double sum = term;
  const double h2 = h * h;
  for (int k = 1; k < 500; ++k) {
    term *= h2 / (static_cast<double>(k) * (k + nu));
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum;
}

// Σ (-1)^k a_k(ν) / x^k of the large-argument expansion, truncated at the
// smallest term.
double bessel_asymptotic_sum(int nu, double x) {
  const double mu = 4.0 * nu * nu;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = -term * (mu - odd * odd) / (8.0 * k * x);
    if (std::abs(next) >= std::abs(term)) break;
    term = next;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

double bessel_scaled(int nu, double x) {
  const double ax = std::abs(x);
  double v;
  if (ax <= kSeriesLimit)
    v = bessel_series(nu, ax) * std::exp(-ax);
  else
    v = bessel_asymptotic_sum(nu, ax) / std::sqrt(2.0 * kPi * ax);
  return (nu % 2 == 1 && x < 0) ? -v : v;
}

void require_kappa(double kappa) {
  if (!(kappa > 0.0))
    throw Error(ErrorKind::OutOfRange, "kappa must be positive");
}

// coth κ − 1/κ
double langevin(double kappa) {
  if (kappa < 1e-2) {
    const double k2 = kappa * kappa;
    return kappa * (1.0 / 3.0 - k2 / 45.0 + 2.0 * k2 * k2 / 945.0);
  }
  return 1.0 / std::tanh(kappa) - 1.0 / kappa;
}

}  // namespace

double bessel_i0_scaled(double x) { return bessel_scaled(0, x); }
double bessel_i1_scaled(double x) { return bessel_scaled(1, x); }

double bessel_i0(double x) {
  const double ax = std::abs(x);
  if (ax <= kSeriesLimit) return bessel_series(0, ax);
  return bessel_i0_scaled(x) * std::exp(ax);
}

double bessel_i1(double x) {
  const double ax = std::abs(x);
  if (ax <= kSeriesLimit) return x < 0 ? -bessel_series(1, ax) : bessel_series(1, ax);
  return bessel_i1_scaled(x) * std::exp(ax);
}

double vmf_density(double kappa, double alpha) {
  require_kappa(kappa);
  return std::exp(kappa * (std::cos(alpha) - 1.0)) / (2.0 * kPi * bessel_i0_scaled(kappa));
}

double f_proc_pure(double delta_theta, double kappa) {
  require_kappa(kappa);
  const double c = std::cos(delta_theta);
  const double s = std::sin(delta_theta);
  if (std::isinf(kappa)) return 0.5 * (1.0 + c);
  // Same closed form, regrouped as 1/2 + (coth κ − 1/κ) cos/2 + π I1/(4 sinh κ) sin
  // with sinh κ = e^κ (1 − e^{−2κ}) / 2 so nothing overflows.
  const double sin_coeff =
      kPi * bessel_i1_scaled(kappa) / (2.0 * -std::expm1(-2.0 * kappa));
  return 0.5 + 0.5 * langevin(kappa) * c + sin_coeff * s;
}

double solve_kappa(double target_f) {
  double lo = 1e-6, hi = 1e4;
  const double flo = f_proc_pure(0.0, lo), fhi = f_proc_pure(0.0, hi);
  if (!(target_f > flo && target_f < fhi)) {
    std::ostringstream os;
    os << "target fidelity " << detail::format17(target_f) << " outside ("
       << detail::format17(flo) << ", " << detail::format17(fhi) << ")";
    throw Error(ErrorKind::OutOfRange, os.str());
  }
  for (int it = 0; it < 300; ++it) {
    const double mid = std::sqrt(lo * hi);
    if (f_proc_pure(0.0, mid) < target_f)
      lo = mid;
    else
      hi = mid;
    if (hi / lo - 1.0 < 1e-15) break;
  }
  const double k = std::sqrt(lo * hi);
  if (std::abs(f_proc_pure(0.0, k) - target_f) > 1e-9)
    throw Error(ErrorKind::NoConvergence, "kappa bisection did not reach 1e-9");
  return k;
}

double detection_prob(const Matrix2c& rho, const PureQubit& target, double kappa,
                      AxisPolicy policy) {
  const double m0 = f_proc_pure(0.0, kappa);
  const double f = fidelity(rho, target);
  if (policy == AxisPolicy::Strict && m0 < 1.0) {
    const Eigen::Vector3d r = bloch_vector(rho);
    const Eigen::Vector3d n = target.bloch();
    const double off = (r - r.dot(n) * n).norm();
    if (off > 1e-6) {
      std::ostringstream os;
      os << "clone Bloch vector has off-axis component " << off;
      throw Error(ErrorKind::OffAxisClone, os.str());
    }
  }
  return m0 * f + (1.0 - m0) * (1.0 - f);
}

double avg_verification_fidelity(const QubitDistribution& g,
                                 const std::function<Matrix2c(const PureQubit&)>& clone_fn,
                                 double kappa, AxisPolicy policy) {
  double acc = 0.0;
  for (const auto& p : g.support())
    acc += p.weight * detection_prob(clone_fn(p.state), p.state, kappa, policy);
  return acc;
}

ThresholdPolicy parse_threshold_policy(const std::string& name) {
  if (name == "uc-floor") return ThresholdPolicy::UcFloor;
  if (name == "g-dependent") return ThresholdPolicy::GDependent;
  throw Error(ErrorKind::Parse, "unknown threshold policy '" + name + "'");
}

std::string to_string(ThresholdPolicy p) {
  return p == ThresholdPolicy::UcFloor ? "uc-floor" : "g-dependent";
}

VerificationModel VerificationModel::make(double kappa, ThresholdPolicy policy,
                                          const QubitDistribution& g,
                                          double min_delivered) {
  VerificationModel m;
  m.kappa = kappa;
  m.f_pass = f_proc_pure(0.0, kappa);
  m.policy = policy;
  m.min_delivered = min_delivered;
  m.threshold = kUniversalClonerFidelity;
  if (policy == ThresholdPolicy::GDependent)
    m.threshold = std::max(kUniversalClonerFidelity, secure_threshold(g));
  return m;
}

Decision decide(const ReportStats& stats, const VerificationModel& model) {
  Decision d;
  if (!(stats.delivered_fraction > model.min_delivered)) {
    std::ostringstream os;
    os << "delivered fraction " << stats.delivered_fraction << " does not exceed "
       << model.min_delivered;
    d.reasons.push_back(os.str());
  }
  if (!(stats.avg_fid_estimate > model.threshold)) {
    std::ostringstream os;
    os << "average fidelity " << stats.avg_fid_estimate << " does not exceed threshold "
       << model.threshold;
    d.reasons.push_back(os.str());
  }
  d.pass = d.reasons.empty();
  return d;
}

double mub_attack_expected_fidelity(double kappa) {
  const double same_basis = 0.5 * (f_proc_pure(0.0, kappa) + f_proc_pure(kPi, kappa));
  return same_basis / 3.0 + 2.0 / 3.0 * f_proc_pure(kPi / 2.0, kappa);
}

double secure_threshold(const QubitDistribution& g) {
  return optimize_chi(build_r(g)).fidelity;
}

}  // namespace qmoney
