#include "qmoney/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace qmoney {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::TraceNotOne: return "TraceNotOne";
    case ErrorKind::NotNormalized: return "NotNormalized";
    case ErrorKind::Indeterminate: return "Indeterminate";
    case ErrorKind::NonHermitianResult: return "NonHermitianResult";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::SingularLagrange: return "SingularLagrange";
    case ErrorKind::NotAxiallySymmetric: return "NotAxiallySymmetric";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::OffAxisClone: return "OffAxisClone";
    case ErrorKind::UnmappableColor: return "UnmappableColor";
    case ErrorKind::EmptyBanknote: return "EmptyBanknote";
    case ErrorKind::Parse: return "Parse";
    case ErrorKind::MissingChi: return "MissingChi";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_two_pi(double x) {
  double r = std::fmod(x, kTwoPi);
  if (r < 0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

}  // namespace

PureQubit PureQubit::canonical(double theta, double phi) {
  double t = wrap_two_pi(theta);
  double p = phi;
  if (t > kPi) {
    t = kTwoPi - t;
    p += kPi;
  }
  return {t, wrap_two_pi(p)};
}

PureQubit PureQubit::from_bloch(const Eigen::Vector3d& direction) {
  const double n = direction.norm();
  if (n == 0.0) return {};
  const double z = std::clamp(direction.z() / n, -1.0, 1.0);
  const double phi = std::atan2(direction.y(), direction.x());
  return canonical(std::acos(z), phi);
}

Eigen::Vector3d PureQubit::bloch() const {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
          std::cos(theta)};
}

bool same_state(const PureQubit& a, const PureQubit& b, double tol) {
  return std::abs(1.0 - std::abs(state_vector(a).dot(state_vector(b)))) <= tol;
}

Vector2c state_vector(const PureQubit& q) {
  return {cdouble(std::cos(q.theta / 2), 0.0),
          std::polar(std::sin(q.theta / 2), q.phi)};
}

PureQubit orthogonal_state(const PureQubit& q) {
  return PureQubit::canonical(kPi - q.theta, q.phi + kPi);
}

Matrix2c density(const PureQubit& q) {
  const Vector2c v = state_vector(q);
  return v * v.adjoint();
}

double fidelity(const Matrix2c& rho, const PureQubit& q) {
  require_density_matrix(rho);
  const Vector2c v = state_vector(q);
  const cdouble f = v.dot(rho * v);
  if (std::abs(f.imag()) > 1e-12)
    throw Error(ErrorKind::NotHermitian, "fidelity has an imaginary part");
  return std::clamp(f.real(), 0.0, 1.0);
}

Eigen::Vector3d bloch_vector(const Matrix2c& rho) {
  return {2.0 * rho(1, 0).real(), 2.0 * rho(1, 0).imag(),
          (rho(0, 0) - rho(1, 1)).real()};
}

void require_density_matrix(const CMatrix& rho, double tol) {
  if (rho.rows() != rho.cols())
    throw Error(ErrorKind::DimensionMismatch, "density matrix is not square");
  if (!is_hermitian(rho, tol))
    throw Error(ErrorKind::NotHermitian, "density matrix is not Hermitian");
  const cdouble tr = rho.trace();
  if (std::abs(tr - 1.0) > tol) {
    std::ostringstream os;
    os << "density matrix trace " << tr.real() << " differs from one";
    throw Error(ErrorKind::TraceNotOne, os.str());
  }
}

CMatrix partial_trace(const CMatrix& m, std::span<const int> dims,
                      std::span<const int> keep) {
  Eigen::Index total = 1;
  for (int d : dims) {
    if (d <= 0) throw Error(ErrorKind::DimensionMismatch, "subsystem dimension must be positive");
    total *= d;
  }
  if (m.rows() != total || m.cols() != total)
    throw Error(ErrorKind::DimensionMismatch,
                "subsystem dimensions do not match matrix size");

  const int n = static_cast<int>(dims.size());
  std::vector<bool> kept(n, false);
  for (int k : keep) {
    if (k < 0 || k >= n)
      throw Error(ErrorKind::DimensionMismatch, "kept subsystem index out of range");
    kept[k] = true;
  }

  // Strides for the full index and for the kept / traced factors.
  std::vector<Eigen::Index> stride(n, 1);
  for (int i = n - 2; i >= 0; --i) stride[i] = stride[i + 1] * dims[i + 1];

  std::vector<int> kept_axes, traced_axes;
  for (int i = 0; i < n; ++i) (kept[i] ? kept_axes : traced_axes).push_back(i);

  auto offsets = [&](const std::vector<int>& axes) {
    std::vector<Eigen::Index> out{0};
    for (int ax : axes) {
      std::vector<Eigen::Index> next;
      next.reserve(out.size() * dims[ax]);
      for (Eigen::Index base : out)
        for (int v = 0; v < dims[ax]; ++v) next.push_back(base + v * stride[ax]);
      out = std::move(next);
    }
    return out;
  };
  const auto kept_off = offsets(kept_axes);
  const auto traced_off = offsets(traced_axes);

  const auto dk = static_cast<Eigen::Index>(kept_off.size());
  CMatrix out = CMatrix::Zero(dk, dk);
  for (Eigen::Index r = 0; r < dk; ++r)
    for (Eigen::Index c = 0; c < dk; ++c) {
      cdouble acc = 0.0;
      for (Eigen::Index t : traced_off) acc += m(kept_off[r] + t, kept_off[c] + t);
      out(r, c) = acc;
    }
  return out;
}

HermitianEigen herm_eig(const CMatrix& m) {
  if (!is_hermitian(m, 1e-10))
    throw Error(ErrorKind::NotHermitian, "herm_eig requires a Hermitian matrix");
  const CMatrix sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym);
  return {solver.eigenvalues(), solver.eigenvectors()};
}

CMatrix inverse_sqrt(const CMatrix& m, double regularize) {
  const auto eig = herm_eig(m);
  Eigen::VectorXd inv(eig.values.size());
  for (Eigen::Index i = 0; i < inv.size(); ++i) {
    const double v = eig.values[i] + regularize;
    if (!(v > 0.0))
      throw Error(ErrorKind::SingularLagrange, "matrix is not positive definite");
    inv[i] = 1.0 / std::sqrt(v);
  }
  return eig.vectors * inv.asDiagonal() * eig.vectors.adjoint();
}

}  // namespace qmoney
