#include "qmoney/cloner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "text_util.hpp"

namespace qmoney {

namespace {

constexpr double kPi = std::numbers::pi;

using Block4 = Eigen::Matrix<double, 4, 4>;

Matrix8c blocks(const Block4& tl, const Block4& tr, const Block4& bl, const Block4& br) {
  Matrix8c k = Matrix8c::Zero();
  k.block<4, 4>(0, 0) = tl.cast<cdouble>();
  k.block<4, 4>(0, 4) = tr.cast<cdouble>();
  k.block<4, 4>(4, 0) = bl.cast<cdouble>();
  k.block<4, 4>(4, 4) = br.cast<cdouble>();
  return k;
}

std::array<Matrix8c, 6> make_k_matrices() {
  const Block4 a = Eigen::Vector4d(2, 2, 2, 2).asDiagonal();
  const Block4 b = Eigen::Vector4d(2, 0, 0, -2).asDiagonal();
  Block4 c = Block4::Zero();
  // C_ij = (δ_i2 + δ_i3) δ_j1 + (δ_j2 + δ_j3) δ_i4, one-based.
  c(1, 0) = c(2, 0) = 1.0;
  c(3, 1) = c(3, 2) = 1.0;
  const Block4 z = Block4::Zero();

  std::array<Matrix8c, 6> k;
  k[0] = std::sqrt(kPi) / 12.0 * blocks(3 * a + b, 2 * c.transpose(), 2 * c, 3 * a - b);
  k[1] = 0.5 * std::sqrt(kPi / 12.0) * blocks(a + b, z, z, -a + b);
  k[2] = -std::sqrt(kPi / 24.0) * blocks(c, a, z, c);
  k[3] = -std::sqrt(kPi / 5.0) / 6.0 * blocks(-b, c.transpose(), c, b);
  k[4] = -0.5 * std::sqrt(kPi / 30.0) * blocks(c, b, z, -c);
  k[5] = std::sqrt(kPi / 30.0) * blocks(z, c, z, z);
  return k;
}

int k_index(int l, int m) {
  switch (l * 10 + m) {
    case 0: return 0;
    case 10: return 1;
    case 11: return 2;
    case 20: return 3;
    case 21: return 4;
    case 22: return 5;
    default: break;
  }
  throw Error(ErrorKind::OutOfRange, "K_{l,m} is only defined for l <= 2, |m| <= l");
}

// Closed-form inverse square root of a 2x2 positive-definite Hermitian matrix:
// sqrt(A) = (A + s 1) / t with s = sqrt(det A), t = sqrt(tr A + 2 s).
bool inverse_sqrt2(const Matrix2c& a, Matrix2c& out) {
  const double det = (a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0)).real();
  const double tr = a.trace().real();
  if (!(det > 0.0) || !(tr > 0.0)) return false;
  const double s = std::sqrt(det);
  const double t = std::sqrt(tr + 2.0 * s);
  Matrix2c adj;
  adj << a(1, 1) + s, -a(0, 1), -a(1, 0), a(0, 0) + s;
  out = adj / (s * t);
  return std::isfinite(out.cwiseAbs().maxCoeff());
}

Matrix8c lift_input(const Matrix2c& m) {
  Matrix8c out = Matrix8c::Zero();
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k)
      out.block<4, 4>(4 * j, 4 * k) = m(j, k) * Matrix4c::Identity();
  return out;
}

Matrix8c normalize_trace(const Matrix8c& chi) {
  Matrix2c inv;
  if (!inverse_sqrt2(trace_clones(chi), inv))
    throw Error(ErrorKind::SingularLagrange, "clone-space partial trace is singular");
  const Matrix8c s = lift_input(inv);
  return s * chi * s;
}

// Clip negative eigenvalues and re-impose Tr_clones χ = 1 once.
Matrix8c repair(const Matrix8c& chi) {
  Eigen::SelfAdjointEigenSolver<Matrix8c> es(0.5 * (chi + chi.adjoint()));
  Eigen::Matrix<double, 8, 1> v = es.eigenvalues().cwiseMax(0.0);
  Matrix8c fixed = es.eigenvectors() * v.asDiagonal() * es.eigenvectors().adjoint();
  fixed = normalize_trace(fixed);
  return 0.5 * (fixed + fixed.adjoint());
}

}  // namespace

const std::array<Matrix8c, 6>& k_matrices() {
  static const std::array<Matrix8c, 6> k = make_k_matrices();
  return k;
}

Matrix8c k_matrix(int l, int m) {
  if (m >= 0) return k_matrices()[k_index(l, m)];
  const Matrix8c t = k_matrices()[k_index(l, -m)].transpose();
  return (m % 2 == 0) ? t : Matrix8c(-t);
}

ROperator build_r(const Moments& mom) {
  Matrix8c r = Matrix8c::Zero();
  for (int l = 0; l <= 2; ++l)
    for (int m = -l; m <= l; ++m) r += k_matrix(l, m) * mom.at(l, m);
  if (!is_hermitian(r, 1e-10))
    throw Error(ErrorKind::NonHermitianResult, "R operator is not Hermitian");
  return {0.5 * (r + r.adjoint())};
}

Matrix2c trace_clones(const Matrix8c& chi) {
  Matrix2c t;
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k) t(j, k) = chi.block<4, 4>(4 * j, 4 * k).trace();
  return t;
}

CptpCheck check_cptp(const Matrix8c& chi) {
  Eigen::SelfAdjointEigenSolver<Matrix8c> es(0.5 * (chi + chi.adjoint()),
                                             Eigen::EigenvaluesOnly);
  const double dev = (trace_clones(chi) - Matrix2c::Identity()).cwiseAbs().maxCoeff();
  const double herm = (chi - chi.adjoint()).cwiseAbs().maxCoeff();
  return {es.eigenvalues().minCoeff(), std::max(dev, herm)};
}

double average_fidelity(const ROperator& r, const CloningMap& map) {
  return (r.matrix * map.chi).trace().real();
}

OptimizeResult optimize_chi(const ROperator& r, const OptimizeOptions& opt) {
  if (!is_hermitian(r.matrix, 1e-10))
    throw Error(ErrorKind::NotHermitian, "R operator is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix8c> es(r.matrix, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  if (lmin < -1e-10)
    throw Error(ErrorKind::OutOfRange, "R operator is not positive semidefinite");

  // Every feasible χ has Tr χ = 2, so R + s·1 has the same maximizer. The shift
  // keeps Λ away from singular for rank-deficient R.
  const double shift = std::max(0.0, 1e-3 - lmin);
  const Matrix8c rs = r.matrix + shift * Matrix8c::Identity();

  OptimizeResult res;
  Matrix8c chi = Matrix8c::Identity() / 4.0;
  double f = (r.matrix * chi).trace().real();
  res.trajectory.push_back(f);

  bool converged = false;
  int n = 0;
  while (n < opt.max_iter) {
    ++n;
    const Matrix8c x = rs * chi * rs;
    const Matrix2c lambda = trace_clones(x);
    Matrix2c inv;
    if (!inverse_sqrt2(lambda, inv) &&
        !inverse_sqrt2(lambda + 1e-12 * Matrix2c::Identity(), inv))
      throw Error(ErrorKind::SingularLagrange, "Lagrange operator is not invertible");
    const Matrix8c s = lift_input(inv);
    chi = s * x * s;
    chi = 0.5 * (chi + chi.adjoint());
    if (n % 64 == 0) chi = repair(chi);

    const double fn = (r.matrix * chi).trace().real();
    res.trajectory.push_back(fn);
    const double delta = std::abs(fn - f);
    f = fn;
    if (delta < opt.tol) {
      converged = true;
      break;
    }
  }
  chi = repair(chi);
  f = (r.matrix * chi).trace().real();
  res.trajectory.back() = std::max(res.trajectory.back(), f);
  if (!converged)
    throw Error(ErrorKind::NoConvergence,
                "optimizer hit the iteration cap (" + std::to_string(opt.max_iter) +
                    ") without |dF| < " + detail::format17(opt.tol));
  res.map = {chi, 1.0, "optimized"};
  res.fidelity = f;
  res.iterations = n;
  return res;
}

CloneStates clone_states(const CloningMap& map, const PureQubit& q) {
  const Matrix2c rho = density(q);
  Matrix4c out = Matrix4c::Zero();
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k) out += rho(j, k) * map.chi.block<4, 4>(4 * j, 4 * k);
  out = 0.5 * (out + out.adjoint());

  CloneStates cs;
  // out is indexed 2a + b.
  for (int a = 0; a < 2; ++a)
    for (int a2 = 0; a2 < 2; ++a2) {
      cs.rho_a(a, a2) = out(2 * a, 2 * a2) + out(2 * a + 1, 2 * a2 + 1);
      cs.rho_b(a, a2) = out(a, a2) + out(2 + a, 2 + a2);
    }
  const Vector2c v = state_vector(q);
  cs.f0 = v.dot(cs.rho_a * v).real();
  cs.f1 = v.dot(cs.rho_b * v).real();
  return cs;
}

AnalyticCloner AnalyticCloner::universal() { return mpcc(std::sqrt(2.0 / 3.0)); }

double AnalyticCloner::lambda_bar_plus() const {
  return std::sqrt(std::max(0.0, 1.0 - lambda_plus * lambda_plus));
}

double AnalyticCloner::lambda_bar_minus() const {
  return std::sqrt(std::max(0.0, 1.0 - lambda_minus * lambda_minus));
}

AnalyticFidelities analytic_clone_fidelities(const AnalyticCloner& c) {
  const double lp = c.lambda_plus, lm = c.lambda_minus;
  return {(1.0 + lp * lp) / 2.0, (1.0 + lm * lm) / 2.0,
          0.5 + (lp * c.lambda_bar_minus() + c.lambda_bar_plus() * lm) / (2.0 * std::sqrt(2.0))};
}

CloningMap analytic_chi(const AnalyticCloner& c, double success_prob) {
  if (c.lambda_plus < 0.0 || c.lambda_plus > 1.0 || c.lambda_minus < 0.0 ||
      c.lambda_minus > 1.0)
    throw Error(ErrorKind::OutOfRange, "cloner amplitudes must lie in [0, 1]");
  // Isometry columns on clone a ⊗ clone b ⊗ ancilla, index 4a + 2b + anc:
  //   |0⟩ → Λ+ |00⟩|1⟩ + Λ̄+ |ψ+⟩|0⟩,   |1⟩ → Λ- |11⟩|0⟩ + Λ̄- |ψ+⟩|1⟩.
  Eigen::Matrix<cdouble, 8, 2> v = Eigen::Matrix<cdouble, 8, 2>::Zero();
  const double r2 = 1.0 / std::sqrt(2.0);
  v(1, 0) = c.lambda_plus;
  v(2, 0) = v(4, 0) = c.lambda_bar_plus() * r2;
  v(6, 1) = c.lambda_minus;
  v(3, 1) = v(5, 1) = c.lambda_bar_minus() * r2;

  Matrix8c chi = Matrix8c::Zero();
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k)
      for (int o = 0; o < 4; ++o)
        for (int o2 = 0; o2 < 4; ++o2) {
          cdouble acc = 0.0;
          for (int anc = 0; anc < 2; ++anc)
            acc += v(2 * o + anc, j) * std::conj(v(2 * o2 + anc, k));
          chi(4 * j + o, 4 * k + o2) = acc;
        }
  std::string label = "analytic(" + detail::format17(c.lambda_plus) + "," +
                      detail::format17(c.lambda_minus) + ")";
  return {chi, success_prob, std::move(label)};
}

double optimal_mpcc_lambda(const ROperator& r, double tol) {
  auto f = [&](double lam) {
    return average_fidelity(r, analytic_chi(AnalyticCloner::mpcc(lam)));
  };
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.0, hi = 1.0;
  double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  while (hi - lo > tol) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = f(x1);
    }
  }
  return 0.5 * (lo + hi);
}

FamilySelection select_optimal_family(const QubitDistribution& g) {
  const Moments m = moments(g);
  if (!m.axially_symmetric())
    throw Error(ErrorKind::NotAxiallySymmetric,
                "distribution has non-zero m != 0 moments");
  FamilySelection sel;
  try {
    sel.gamma = gamma_parameter(g);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Indeterminate) throw;
    sel.gamma = std::numeric_limits<double>::quiet_NaN();
    return sel;
  }
  const ROperator r = build_r(m);
  if (std::abs(sel.gamma) > 1.0) {
    const double minus = g.pole_mass_north() - g.pole_mass_south();
    sel.family = ClonerFamily::Pcc;
    sel.cloner = AnalyticCloner::pcc(minus > 0.0);
  } else if (sel.gamma == 0.0 && std::abs(m.c10) < 1e-9) {
    sel.family = ClonerFamily::Mpcc;
    sel.cloner = AnalyticCloner::mpcc(optimal_mpcc_lambda(r));
  } else {
    return sel;
  }
  sel.fidelity = average_fidelity(r, analytic_chi(sel.cloner));
  return sel;
}

std::string write_cloner(const CloningMap& map) {
  std::string out = "qcloner v1\n";
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) {
      if (j) out += ' ';
      out += detail::format17(map.chi(i, j).real()) + ' ' +
             detail::format17(map.chi(i, j).imag());
    }
    out += '\n';
  }
  out += "success_prob " + detail::format17(map.success_prob) + '\n';
  return out;
}

CloningMap read_cloner(std::string_view text) {
  constexpr std::string_view fmt = "qcloner";
  const auto lines = detail::split_lines(text);
  if (lines.empty() || detail::trim(lines[0]) != "qcloner v1")
    detail::parse_fail(fmt, 1, "expected header 'qcloner v1'");
  if (lines.size() < 10) detail::parse_fail(fmt, lines.size(), "truncated cloner file");
  CloningMap map;
  map.label = "file";
  for (int i = 0; i < 8; ++i) {
    const auto tok = detail::split_ws(lines[i + 1]);
    if (tok.size() != 16)
      detail::parse_fail(fmt, i + 2, "expected 16 numbers (8 re/im pairs)");
    for (int j = 0; j < 8; ++j)
      map.chi(i, j) = {detail::parse_double(tok[2 * j], fmt, i + 2),
                       detail::parse_double(tok[2 * j + 1], fmt, i + 2)};
  }
  const auto tok = detail::split_ws(lines[9]);
  if (tok.size() != 2 || tok[0] != "success_prob")
    detail::parse_fail(fmt, 10, "expected 'success_prob <p>'");
  map.success_prob = detail::parse_double(tok[1], fmt, 10);
  if (!(map.success_prob > 0.0 && map.success_prob <= 1.0))
    detail::parse_fail(fmt, 10, "success_prob must lie in (0, 1]");
  for (size_t i = 10; i < lines.size(); ++i)
    if (!detail::trim(lines[i]).empty()) detail::parse_fail(fmt, i + 1, "trailing content");
  return map;
}

}  // namespace qmoney
