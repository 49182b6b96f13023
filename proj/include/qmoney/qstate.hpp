#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qmoney/error.hpp"

namespace qmoney {

template <typename Scalar>
using Complex = std::complex<Scalar>;

template <typename Scalar, int N>
using SquareC = Eigen::Matrix<std::complex<Scalar>, N, N>;

template <typename Scalar>
using DynamicC = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

using cdouble = std::complex<double>;
using CMatrix = DynamicC<double>;
using Matrix2c = SquareC<double, 2>;
using Matrix4c = SquareC<double, 4>;
using Matrix8c = SquareC<double, 8>;
using Vector2c = Eigen::Matrix<cdouble, 2, 1>;

/// Pure qubit on the Bloch sphere. |0> is the north pole (theta = 0) and
/// |1> the south pole; phi is the azimuth.
struct PureQubit {
  double theta = 0.0;
  double phi = 0.0;

  /// Folds arbitrary angles into theta in [0, pi], phi in [0, 2 pi).
  static PureQubit canonical(double theta, double phi);

  /// Nearest pure state to a (not necessarily normalized) Bloch direction.
  static PureQubit from_bloch(const Eigen::Vector3d& direction);

  Eigen::Vector3d bloch() const;

  // Exact angle equality; see same_state for physical equivalence.
  friend bool operator==(const PureQubit&, const PureQubit&) = default;
};

/// Same physical state: overlap magnitude within `tol` of one.
bool same_state(const PureQubit& a, const PureQubit& b, double tol = 1e-12);

Vector2c state_vector(const PureQubit& q);
PureQubit orthogonal_state(const PureQubit& q);
Matrix2c density(const PureQubit& q);

// <psi(q)| rho |psi(q)>. Throws NotHermitian / TraceNotOne for malformed rho.
double fidelity(const Matrix2c& rho, const PureQubit& q);

/// Bloch vector (x, y, z) of a 2x2 Hermitian matrix.
Eigen::Vector3d bloch_vector(const Matrix2c& rho);

template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& m, double tol = 1e-12) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

/// Checks trace, hermiticity and spectrum of a density matrix.
void require_density_matrix(const CMatrix& rho, double tol = 1e-10);

/// Tensor product a ⊗ b, first factor most significant.
template <typename A, typename B>
DynamicC<typename A::Scalar::value_type> kron(const Eigen::MatrixBase<A>& a,
                                              const Eigen::MatrixBase<B>& b) {
  using Scalar = typename A::Scalar::value_type;
  DynamicC<Scalar> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Reduced operator on subsystems `keep` (ascending or not; output ordering
/// follows ascending subsystem index). `dims` lists subsystem sizes, first
/// most significant. Keeping nothing yields the 1x1 trace.
CMatrix partial_trace(const CMatrix& m, std::span<const int> dims,
                      std::span<const int> keep);

struct HermitianEigen {
  Eigen::VectorXd values;  // ascending
  CMatrix vectors;         // columns
};

/// Throws NotHermitian unless m is Hermitian within 1e-10.
HermitianEigen herm_eig(const CMatrix& m);

/// Inverse square root of a positive-definite Hermitian matrix.
CMatrix inverse_sqrt(const CMatrix& m, double regularize = 0.0);

}  // namespace qmoney
