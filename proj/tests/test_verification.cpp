#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qmoney/cloner.hpp"
#include "qmoney/verification.hpp"

using namespace qmoney;

namespace {

constexpr double kPi = std::numbers::pi;

QubitDistribution banknote1() {
  return QubitDistribution::discrete({{{0, 0}, 0.25},
                                      {{kPi, 0}, 0.25},
                                      {{kPi / 2, 0}, 0.125},
                                      {{kPi / 2, kPi}, 0.125},
                                      {{kPi / 2, kPi / 2}, 0.125},
                                      {{kPi / 2, 3 * kPi / 2}, 0.125}});
}

QubitDistribution banknote2() {
  return QubitDistribution::discrete({{{0, 0}, 0.5},
                                      {{kPi / 2, 0}, 0.125},
                                      {{kPi / 2, kPi}, 0.125},
                                      {{kPi / 2, kPi / 2}, 0.125},
                                      {{kPi / 2, 3 * kPi / 2}, 0.125}});
}

// e^{-x} I_n(x) = (1/pi) ∫_0^pi e^{x(cos t - 1)} cos(n t) dt, composite Simpson.
double scaled_bessel_integral(int n, double x) {
  const int steps = 20000;
  const double h = kPi / steps;
  double acc = 0;
  for (int i = 0; i <= steps; ++i) {
    const double t = i * h;
    const double w = (i == 0 || i == steps) ? 1 : (i % 2 ? 4 : 2);
    acc += w * std::exp(x * (std::cos(t) - 1)) * std::cos(n * t);
  }
  return acc * h / 3 / kPi;
}

double f_proc_oracle(double dt, double k) {
  const double i1 = std::cyl_bessel_i(1.0, k);
  return (2 * k * std::cos(dt) * std::cosh(k) + kPi * k * i1 * std::sin(dt) +
          2 * (k - std::cos(dt)) * std::sinh(k)) /
         (4 * k * std::sinh(k));
}

}  // namespace

TEST_CASE("bessel functions against integral and library oracles") {
  for (double x : {1e-3, 0.1, 1.0, 5.0, 14.9, 15.1, 30.0, 80.0, 400.0}) {
    CHECK(bessel_i0_scaled(x) == doctest::Approx(scaled_bessel_integral(0, x)).epsilon(1e-10));
    CHECK(bessel_i1_scaled(x) == doctest::Approx(scaled_bessel_integral(1, x)).epsilon(1e-10));
    if (x < 300) {
      CHECK(bessel_i0(x) == doctest::Approx(std::cyl_bessel_i(0.0, x)).epsilon(1e-12));
      CHECK(bessel_i1(x) == doctest::Approx(std::cyl_bessel_i(1.0, x)).epsilon(1e-12));
    }
  }
  CHECK(bessel_i0(0.0) == 1.0);
  CHECK(bessel_i1(0.0) == 0.0);
  CHECK(bessel_i1(-2.0) == doctest::Approx(-std::cyl_bessel_i(1.0, 2.0)));
}

TEST_CASE("vMF density is normalized on the circle") {
  for (double k : {0.5, 3.0, 25.0, 300.0}) {
    const int steps = 20000;
    const double h = 2 * kPi / steps;
    double acc = 0;
    for (int i = 0; i < steps; ++i) acc += vmf_density(k, -kPi + (i + 0.5) * h) * h;
    CHECK(acc == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("detection closed form") {
  for (double k : {0.05, 0.5, 2.9515, 10.0, 25.0, 60.0})
    for (double dt = 0; dt <= kPi + 1e-12; dt += kPi / 16)
      CHECK(f_proc_pure(dt, k) == doctest::Approx(f_proc_oracle(dt, k)).epsilon(1e-12));
  CHECK(f_proc_pure(0.0, 2000.0) < 1.0);
  CHECK(f_proc_pure(0.0, 2000.0) > 0.999);
  CHECK(f_proc_pure(0.0, kInfiniteKappa) == 1.0);
  CHECK(f_proc_pure(kPi / 2, kInfiniteKappa) == doctest::Approx(0.5));
  CHECK(f_proc_pure(0.0, 1e-8) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK_THROWS_AS(f_proc_pure(0.0, 0.0), Error);
}

TEST_CASE("detection identities and monotonicity") {
  for (double k = 0.01; k <= 100; k *= 1.1) {
    CHECK(f_proc_pure(kPi, k) == doctest::Approx(1.0 - f_proc_pure(0.0, k)).epsilon(1e-12));
  }
  double prev = 0;
  for (int i = 0; i < 100; ++i) {
    const double k = 0.01 * std::pow(1e4, i / 99.0);
    const double v = f_proc_pure(0.0, k);
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("contour grid decreases past the peak angle") {
  for (double k = 0.1; k <= 30.0; k += 0.5) {
    // peak of 1/2 + A cos + B sin
    const double a = f_proc_pure(0.0, k) - 0.5;
    const double b = f_proc_pure(kPi / 2, k) - 0.5;
    const double peak = std::atan2(b, a);
    CHECK(peak > 0.0);
    CHECK(peak < kPi / 2);
    double prev = f_proc_pure(peak, k);
    for (int i = 1; i <= 50; ++i) {
      const double dt = peak + (kPi - peak) * i / 50;
      const double v = f_proc_pure(dt, k);
      CHECK(v < prev);
      prev = v;
    }
  }
}

TEST_CASE("solve_kappa anchors and round trip") {
  CHECK(solve_kappa(5.0 / 6) == doctest::Approx(2.9515).epsilon(5e-4 / 2.9515));
  CHECK(std::abs(solve_kappa(0.98) - 25.0) < 0.05);
  CHECK(f_proc_pure(kPi / 2, 2.9515) == doctest::Approx(0.8115).epsilon(5e-4 / 0.8115));
  CHECK(solve_kappa(0.5 + 1e-5) < 1e-3);
  for (double k = 0.5; k <= 60; k *= 1.2)
    CHECK(std::abs(solve_kappa(f_proc_pure(0.0, k)) - k) < 1e-6 * std::max(1.0, k));
  CHECK_THROWS_AS(solve_kappa(0.4), Error);
  CHECK_THROWS_AS(solve_kappa(1.0), Error);
}

TEST_CASE("detection probability") {
  const PureQubit q{1.1, 0.4};
  CHECK(detection_prob(density(q), q, 25.0) == doctest::Approx(f_proc_pure(0.0, 25.0)));
  CHECK(std::abs(detection_prob(density(q), q, 25.0) - 0.98) < 2e-3);
  CHECK(detection_prob(Matrix2c::Identity() / 2.0, q, 3.0) == doctest::Approx(0.5));
  // Pole clone with F = 0.894 and a perfect detector.
  Matrix2c pole = Matrix2c::Zero();
  pole(0, 0) = 0.894;
  pole(1, 1) = 0.106;
  CHECK(detection_prob(pole, {0, 0}, kInfiniteKappa) == doctest::Approx(0.894));
  // off axis
  const Matrix2c tilted = density({0.3, 0.0});
  try {
    detection_prob(tilted, {0, 0}, 25.0);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::OffAxisClone);
  }
  const double m0 = f_proc_pure(0.0, 25.0), f = fidelity(tilted, {0, 0});
  CHECK(detection_prob(tilted, {0, 0}, 25.0, AxisPolicy::Project) ==
        doctest::Approx(m0 * f + (1 - m0) * (1 - f)));
  // affine with positive slope
  const Matrix2c worse = 0.9 * pole + 0.1 * Matrix2c::Identity() / 2.0;
  CHECK(detection_prob(worse, {0, 0}, 5.0) < detection_prob(pole, {0, 0}, 5.0));
}

TEST_CASE("average verification fidelity") {
  const auto perfect = [](const PureQubit& q) { return density(q); };
  CHECK(avg_verification_fidelity(banknote1(), perfect, 25.0) ==
        doctest::Approx(f_proc_pure(0.0, 25.0)));
  const CloningMap b1 = optimize_chi(build_r(banknote1())).map;
  const double f1 = avg_verification_fidelity(
      banknote1(), [&](const PureQubit& q) { return clone_states(b1, q).rho_a; },
      kInfiniteKappa, AxisPolicy::Project);
  CHECK(std::abs(f1 - 0.842) < 2e-3);
  const CloningMap uc = analytic_chi(AnalyticCloner::universal());
  const double fu = avg_verification_fidelity(
      QubitDistribution::uniform(), [&](const PureQubit& q) { return clone_states(uc, q).rho_a; },
      kInfiniteKappa);
  CHECK(fu == doctest::Approx(5.0 / 6).epsilon(1e-10));
}

TEST_CASE("decision rule") {
  VerificationModel m;
  m.threshold = 0.833;
  CHECK(decide({0.549, 0.842}, m).pass);
  const Decision both = decide({0.14, 0.819}, m);
  CHECK_FALSE(both.pass);
  CHECK(both.reasons.size() == 2);
  m.threshold = 5.0 / 6;
  const Decision edge = decide({1.0, 5.0 / 6 - 1e-6}, m);
  CHECK_FALSE(edge.pass);
  REQUIRE(edge.reasons.size() == 1);
  CHECK(edge.reasons[0].find("fidelity") != std::string::npos);
  CHECK_FALSE(decide({0.5, 0.99}, m).pass);
  CHECK_FALSE(decide({0.9, 5.0 / 6}, m).pass);
}

TEST_CASE("threshold policies") {
  CHECK(parse_threshold_policy("uc-floor") == ThresholdPolicy::UcFloor);
  CHECK(parse_threshold_policy("g-dependent") == ThresholdPolicy::GDependent);
  CHECK_THROWS_AS(parse_threshold_policy("other"), Error);
  CHECK(to_string(ThresholdPolicy::GDependent) == "g-dependent");
  const auto uc = VerificationModel::make(25.0, ThresholdPolicy::UcFloor, banknote2());
  CHECK(uc.threshold == 5.0 / 6);
  CHECK(uc.f_pass == doctest::Approx(f_proc_pure(0.0, 25.0)));
  const auto gd = VerificationModel::make(25.0, ThresholdPolicy::GDependent, banknote2());
  CHECK(std::abs(gd.threshold - 0.926) < 2e-3);
  const auto gu = VerificationModel::make(25.0, ThresholdPolicy::GDependent, QubitDistribution::uniform());
  CHECK(gu.threshold >= 5.0 / 6);
}

TEST_CASE("mutually unbiased guessing attack") {
  CHECK(std::abs(mub_attack_expected_fidelity(2.9515) -
                 (1.0 / 6 + 2.0 / 3 * f_proc_pure(kPi / 2, 2.9515))) < 1e-12);
  CHECK(std::abs(mub_attack_expected_fidelity(2.9515) - 0.7077) < 5e-4);
  CHECK(mub_attack_expected_fidelity(kInfiniteKappa) == doctest::Approx(0.5));
  CHECK(mub_attack_expected_fidelity(2.9515) < 5.0 / 6);
}

TEST_CASE("secure thresholds") {
  CHECK(secure_threshold(QubitDistribution::uniform()) == doctest::Approx(5.0 / 6).epsilon(1e-6));
  CHECK(std::abs(secure_threshold(banknote1()) - 0.842) < 2e-3);
  CHECK(std::abs(secure_threshold(banknote2()) - 0.926) < 2e-3);
}
