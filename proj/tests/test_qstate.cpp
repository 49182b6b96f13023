#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "qmoney/qstate.hpp"

using namespace qmoney;

namespace {

constexpr double kPi = std::numbers::pi;

CMatrix random_density(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> nd;
  CMatrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = cdouble(nd(rng), nd(rng));
  CMatrix rho = a * a.adjoint();
  return rho / rho.trace().real();
}

Matrix2c pauli(int k) {
  Matrix2c m;
  if (k == 0) m << 1, 0, 0, 1;
  if (k == 1) m << 0, 1, 1, 0;
  if (k == 2) m << 0, cdouble(0, -1), cdouble(0, 1), 0;
  if (k == 3) m << 1, 0, 0, -1;
  return m;
}

}  // namespace

TEST_CASE("poles and equator states") {
  const Vector2c north = state_vector({0.0, 0.0});
  const Vector2c south = state_vector({kPi, 0.0});
  CHECK(std::abs(north(0) - 1.0) < 1e-15);
  CHECK(std::abs(south(1) - 1.0) < 1e-15);
  const Vector2c plus = state_vector({kPi / 2, 0.0});
  CHECK(std::abs(plus(0) - std::sqrt(0.5)) < 1e-15);
  CHECK(std::abs(plus(1) - std::sqrt(0.5)) < 1e-15);
}

TEST_CASE("density of a pure state is a rank one projector") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 50; ++i) {
    const PureQubit q{std::acos(2 * u(rng) - 1), 2 * kPi * u(rng)};
    const Matrix2c rho = density(q);
    CHECK(std::abs(rho.trace() - 1.0) < 1e-14);
    CHECK((rho * rho - rho).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(fidelity(rho, q) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(fidelity(rho, orthogonal_state(q))) < 1e-14);
  }
}

TEST_CASE("fidelity against brute force overlap") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 50; ++i) {
    const PureQubit a{kPi * u(rng), 2 * kPi * u(rng)};
    const PureQubit b{kPi * u(rng), 2 * kPi * u(rng)};
    // |<a|b>|^2 = (1 + n_a . n_b) / 2
    const double expect = 0.5 * (1.0 + a.bloch().dot(b.bloch()));
    CHECK(fidelity(density(b), a) == doctest::Approx(expect).epsilon(1e-13));
  }
  CHECK(fidelity(Matrix2c::Identity() / 2.0, {1.0, 2.0}) == doctest::Approx(0.5));
}

TEST_CASE("fidelity rejects invalid density matrices") {
  Matrix2c bad;
  bad << 0.5, 0.1, 0.2, 0.5;
  try {
    fidelity(bad, {0, 0});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotHermitian);
  }
  try {
    fidelity(Matrix2c::Identity(), {0, 0});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::TraceNotOne);
  }
}

TEST_CASE("bloch vector matches pauli expectations") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    const Matrix2c rho = random_density(rng, 2);
    const Eigen::Vector3d r = bloch_vector(rho);
    for (int k = 1; k <= 3; ++k)
      CHECK(r(k - 1) == doctest::Approx((rho * pauli(k)).trace().real()).epsilon(1e-13));
  }
}

TEST_CASE("canonical and from_bloch fold back to the same state") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int i = 0; i < 100; ++i) {
    const PureQubit raw{u(rng), u(rng)};
    const PureQubit c = PureQubit::canonical(raw.theta, raw.phi);
    CHECK(c.theta >= 0.0);
    CHECK(c.theta <= kPi);
    CHECK(c.phi >= 0.0);
    CHECK(c.phi < 2 * kPi);
    CHECK(same_state(c, raw, 1e-12));
    CHECK(same_state(PureQubit::from_bloch(3.0 * raw.bloch()), raw, 1e-12));
  }
}

TEST_CASE("kron matches index formula") {
  std::mt19937_64 rng(5);
  const CMatrix a = random_density(rng, 2), b = random_density(rng, 4);
  const CMatrix k = kron(a, b);
  REQUIRE(k.rows() == 8);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) CHECK(std::abs(k(i, j) - a(i / 4, j / 4) * b(i % 4, j % 4)) < 1e-15);
}

TEST_CASE("partial trace of product states") {
  std::mt19937_64 rng(6);
  const CMatrix a = random_density(rng, 2), b = random_density(rng, 2), c = random_density(rng, 2);
  const CMatrix abc = kron(kron(a, b), c);
  const std::array<int, 3> dims{2, 2, 2};
  const std::array<int, 1> keep_b{1};
  const std::array<int, 2> keep_ac{0, 2};
  CHECK((partial_trace(abc, dims, keep_b) - b).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((partial_trace(abc, dims, keep_ac) - kron(a, c)).cwiseAbs().maxCoeff() < 1e-14);
  const CMatrix t = partial_trace(abc, dims, std::span<const int>{});
  REQUIRE(t.rows() == 1);
  CHECK(std::abs(t(0, 0) - 1.0) < 1e-14);
}

TEST_CASE("partial trace against explicit sums on an entangled state") {
  std::mt19937_64 rng(7);
  const CMatrix m = random_density(rng, 8);
  const std::array<int, 3> dims{2, 2, 2};
  const std::array<int, 1> keep0{0};
  const std::array<int, 2> keep12{1, 2};
  CMatrix r0 = CMatrix::Zero(2, 2), r12 = CMatrix::Zero(4, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int s = 0; s < 4; ++s) r0(i, j) += m(4 * i + s, 4 * j + s);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int s = 0; s < 2; ++s) r12(i, j) += m(4 * s + i, 4 * s + j);
  CHECK((partial_trace(m, dims, keep0) - r0).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((partial_trace(m, dims, keep12) - r12).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("herm_eig reconstructs and rejects non-hermitian input") {
  std::mt19937_64 rng(8);
  const CMatrix m = random_density(rng, 8);
  const HermitianEigen e = herm_eig(m);
  const CMatrix back = e.vectors * e.values.cast<cdouble>().asDiagonal() * e.vectors.adjoint();
  CHECK((back - m).cwiseAbs().maxCoeff() < 1e-10);
  for (Eigen::Index i = 1; i < e.values.size(); ++i) CHECK(e.values(i) >= e.values(i - 1));
  CMatrix bad = m;
  bad(0, 1) += 1e-6;
  CHECK_THROWS_AS(herm_eig(bad), Error);
}

TEST_CASE("inverse square root") {
  std::mt19937_64 rng(9);
  const CMatrix m = random_density(rng, 4) + 0.1 * CMatrix::Identity(4, 4);
  const CMatrix s = inverse_sqrt(m);
  CHECK((s * m * s - CMatrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-10);
}
