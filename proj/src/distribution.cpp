#include "qmoney/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <tuple>

#include "text_util.hpp"

namespace qmoney {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPoleTol = 1e-12;

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) { p1 = z; p0 = 1.0; }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = z;
    x[n - 1 - i] = -z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

using BlochKey = std::tuple<long long, long long, long long>;

BlochKey key_of(const PureQubit& q) {
  const Eigen::Vector3d b = q.bloch();
  auto r = [](double v) { return std::llround(v * 1e8); };
  return {r(b.x()), r(b.y()), r(b.z())};
}

std::vector<WeightedQubit> merge_points(const std::vector<WeightedQubit>& pts) {
  std::map<BlochKey, size_t> index;
  std::vector<WeightedQubit> out;
  for (const auto& p : pts) {
    if (p.weight == 0.0) continue;
    const auto k = key_of(p.state);
    auto it = index.find(k);
    if (it == index.end()) {
      index.emplace(k, out.size());
      out.push_back(p);
    } else {
      out[it->second].weight += p.weight;
    }
  }
  return out;
}

bool is_north(const PureQubit& q) { return q.theta <= kPoleTol; }
bool is_south(const PureQubit& q) { return q.theta >= kPi - kPoleTol; }

}  // namespace

cdouble spherical_harmonic(int l, int m, double theta, double phi) {
  if (m < 0) {
    const cdouble y = std::conj(spherical_harmonic(l, -m, theta, phi));
    return (m % 2 == 0) ? y : -y;
  }
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double inv_pi = 1.0 / kPi;
  switch (l * 10 + m) {
    case 0: return 0.5 * std::sqrt(inv_pi);
    case 10: return std::sqrt(3.0 / 4.0 * inv_pi) * c;
    case 11: return -std::sqrt(3.0 / 8.0 * inv_pi) * s * std::polar(1.0, phi);
    case 20: return std::sqrt(5.0 / 16.0 * inv_pi) * (3.0 * c * c - 1.0);
    case 21: return -std::sqrt(15.0 / 8.0 * inv_pi) * s * c * std::polar(1.0, phi);
    case 22: return std::sqrt(15.0 / 32.0 * inv_pi) * s * s * std::polar(1.0, 2.0 * phi);
    default: break;
  }
  throw Error(ErrorKind::OutOfRange, "spherical harmonics are only provided for l <= 2");
}

SphereGrid SphereGrid::product(int n_theta, int n_phi) {
  std::vector<double> x, w;
  gauss_legendre(n_theta, x, w);
  SphereGrid grid;
  grid.nodes.reserve(static_cast<size_t>(n_theta) * n_phi);
  grid.weights.reserve(grid.nodes.capacity());
  const double dphi = 2.0 * kPi / n_phi;
  for (int i = 0; i < n_theta; ++i)
    for (int j = 0; j < n_phi; ++j) {
      grid.nodes.push_back({std::acos(x[i]), j * dphi});
      grid.weights.push_back(w[i] * dphi);
    }
  return grid;
}

QubitDistribution QubitDistribution::discrete(std::vector<WeightedQubit> points,
                                              double tol) {
  if (points.empty())
    throw Error(ErrorKind::NotNormalized, "distribution has no points");
  double total = 0.0;
  for (auto& p : points) {
    if (!(p.weight > 0.0) || !std::isfinite(p.weight))
      throw Error(ErrorKind::NotNormalized, "point weights must be positive and finite");
    p.state = PureQubit::canonical(p.state.theta, p.state.phi);
    total += p.weight;
  }
  if (std::abs(total - 1.0) > tol) {
    std::ostringstream os;
    os << "weights sum to " << detail::format17(total) << ", expected 1";
    throw Error(ErrorKind::NotNormalized, os.str());
  }
  // Leave already-normalized input bit-identical so text round trips are exact.
  if (std::abs(total - 1.0) > 1e-13)
    for (auto& p : points) p.weight /= total;
  return {DistributionKind::Discrete, std::move(points)};
}

QubitDistribution QubitDistribution::uniform() {
  return {DistributionKind::Uniform, {}};
}

QubitDistribution QubitDistribution::from_density(
    const std::function<double(double, double)>& g, int n_theta, int n_phi,
    double tol) {
  const auto grid = SphereGrid::product(n_theta, n_phi);
  std::vector<WeightedQubit> pts;
  pts.reserve(grid.nodes.size());
  double total = 0.0;
  for (size_t i = 0; i < grid.nodes.size(); ++i) {
    const double v = g(grid.nodes[i].theta, grid.nodes[i].phi);
    if (v < 0.0 || !std::isfinite(v))
      throw Error(ErrorKind::NotNormalized, "density must be non-negative and finite");
    total += v * grid.weights[i];
    if (v > 0.0) pts.push_back({grid.nodes[i], v * grid.weights[i]});
  }
  if (std::abs(total - 1.0) > tol) {
    std::ostringstream os;
    os << "density integrates to " << detail::format17(total) << ", expected 1";
    throw Error(ErrorKind::NotNormalized, os.str());
  }
  for (auto& p : pts) p.weight /= total;
  return {DistributionKind::GridDensity, std::move(pts)};
}

std::vector<WeightedQubit> QubitDistribution::support() const {
  if (kind_ != DistributionKind::Uniform) return points_;
  const auto grid = SphereGrid::product();
  std::vector<WeightedQubit> pts(grid.nodes.size());
  for (size_t i = 0; i < pts.size(); ++i)
    pts[i] = {grid.nodes[i], grid.weights[i] / (4.0 * kPi)};
  return pts;
}

double QubitDistribution::pole_mass_north() const {
  double m = 0.0;
  for (const auto& p : points_)
    if (is_north(p.state)) m += p.weight;
  return m;
}

double QubitDistribution::pole_mass_south() const {
  double m = 0.0;
  for (const auto& p : points_)
    if (is_south(p.state)) m += p.weight;
  return m;
}

cdouble Moments::at(int l, int m) const {
  if (m < 0) {
    const cdouble c = std::conj(at(l, -m));
    return (m % 2 == 0) ? c : -c;
  }
  switch (l * 10 + m) {
    case 0: return c00;
    case 10: return c10;
    case 11: return c11;
    case 20: return c20;
    case 21: return c21;
    case 22: return c22;
    default: break;
  }
  throw Error(ErrorKind::OutOfRange, "moments are only defined for l <= 2");
}

double Moments::a1() const { return c10.real() / std::sqrt(3.0 / (4.0 * kPi)); }

double Moments::a2() const { return c20.real() / (2.0 * std::sqrt(5.0 / (16.0 * kPi))); }

Moments Moments::literature_scaled() const {
  const double s = 2.0 * kPi;
  return {s * c00, s * c10, s * c11, s * c20, s * c21, s * c22};
}

bool Moments::axially_symmetric(double tol) const {
  return std::abs(c11) < tol && std::abs(c21) < tol && std::abs(c22) < tol;
}

Moments moments(const QubitDistribution& g) {
  Moments m{};
  m.c00 = 0.5 / std::sqrt(kPi);
  if (g.kind() == DistributionKind::Uniform) return m;
  for (const auto& p : g.points()) {
    const double t = p.state.theta, f = p.state.phi;
    m.c10 += p.weight * spherical_harmonic(1, 0, t, f);
    m.c11 += p.weight * spherical_harmonic(1, 1, t, f);
    m.c20 += p.weight * spherical_harmonic(2, 0, t, f);
    m.c21 += p.weight * spherical_harmonic(2, 1, t, f);
    m.c22 += p.weight * spherical_harmonic(2, 2, t, f);
  }
  double total = 0.0;
  for (const auto& p : g.points()) total += p.weight;
  m.c00 *= total;
  return m;
}

double mean_polarization(const QubitDistribution& g) {
  double a = 0.0;
  for (const auto& p : g.points()) a += p.weight * std::cos(p.state.theta);
  return a;
}

double gamma_parameter(const QubitDistribution& g) {
  const double north = g.pole_mass_north();
  const double south = g.pole_mass_south();
  const double plus = north + south;
  const double minus = north - south;
  if (std::abs(minus) <= kPoleTol) return 0.0;
  const double num = std::sqrt(2.0) * minus * (plus - 1.0);
  const double den = plus * plus - minus * minus;
  if (std::abs(den) <= kPoleTol) {
    if (std::abs(num) <= kPoleTol)
      throw Error(ErrorKind::Indeterminate, "Gamma parameter is 0/0");
    return std::copysign(std::numeric_limits<double>::infinity(), num);
  }
  return num / den;
}

Matrix2c classical_replacement(const QubitDistribution& g) {
  if (g.kind() == DistributionKind::Uniform) return Matrix2c::Identity() / 2.0;
  Matrix2c sigma = Matrix2c::Zero();
  for (const auto& p : g.points()) sigma += p.weight * density(p.state);
  return 0.5 * (sigma + sigma.adjoint());
}

QubitDistribution g_out(const QubitDistribution& g,
                        const std::function<double(const PureQubit&)>& per_state_fidelity) {
  std::vector<WeightedQubit> pts;
  for (const auto& p : g.support()) {
    const double f = std::clamp(per_state_fidelity(p.state), 0.0, 1.0);
    pts.push_back({p.state, f * p.weight});
    pts.push_back({orthogonal_state(p.state), (1.0 - f) * p.weight});
  }
  auto out = QubitDistribution::discrete(merge_points(pts));
  if (g.kind() != DistributionKind::Discrete) out.kind_ = DistributionKind::GridDensity;
  return out;
}

bool same_distribution(const QubitDistribution& a, const QubitDistribution& b, double tol) {
  if (a.kind() == DistributionKind::Uniform || b.kind() == DistributionKind::Uniform)
    return a.kind() == b.kind();
  const auto pa = merge_points(a.points());
  const auto pb = merge_points(b.points());
  if (pa.size() != pb.size()) return false;
  std::vector<bool> used(pb.size(), false);
  for (const auto& p : pa) {
    bool found = false;
    for (size_t j = 0; j < pb.size(); ++j) {
      if (used[j] || !same_state(p.state, pb[j].state, tol)) continue;
      if (std::abs(p.weight - pb[j].weight) > tol) return false;
      used[j] = found = true;
      break;
    }
    if (!found) return false;
  }
  return true;
}

std::string write_distribution(const QubitDistribution& g) {
  std::string out = "qdist v1\n";
  if (g.kind() == DistributionKind::Uniform) return out + "uniform\n";
  for (const auto& p : g.points()) {
    out += detail::format17(p.state.theta) + ' ' + detail::format17(p.state.phi) + ' ' +
           detail::format17(p.weight) + '\n';
  }
  return out;
}

QubitDistribution read_distribution(std::string_view text) {
  constexpr std::string_view fmt = "qdist";
  const auto lines = detail::split_lines(text);
  size_t i = 0;
  auto skip = [&] {
    while (i < lines.size()) {
      const auto t = detail::trim(lines[i]);
      if (!t.empty() && t.front() != '#') break;
      ++i;
    }
  };
  skip();
  if (i >= lines.size() || detail::trim(lines[i]) != "qdist v1")
    detail::parse_fail(fmt, i + 1, "expected header 'qdist v1'");
  ++i;

  bool uniform = false;
  std::vector<WeightedQubit> pts;
  for (; i < lines.size(); ++i) {
    auto t = detail::trim(lines[i]);
    if (const auto hash = t.find('#'); hash != std::string_view::npos)
      t = detail::trim(t.substr(0, hash));
    if (t.empty()) continue;
    if (t == "uniform") {
      if (uniform || !pts.empty())
        detail::parse_fail(fmt, i + 1, "'uniform' cannot be combined with points");
      uniform = true;
      continue;
    }
    if (uniform) detail::parse_fail(fmt, i + 1, "'uniform' cannot be combined with points");
    const auto tok = detail::split_ws(t);
    if (tok.size() != 3) detail::parse_fail(fmt, i + 1, "expected 'theta phi weight'");
    const double theta = detail::parse_double(tok[0], fmt, i + 1);
    const double phi = detail::parse_double(tok[1], fmt, i + 1);
    const double w = detail::parse_double(tok[2], fmt, i + 1);
    if (theta < 0.0 || theta > kPi)
      detail::parse_fail(fmt, i + 1, "theta outside [0, pi]");
    if (!(w > 0.0)) detail::parse_fail(fmt, i + 1, "weight must be positive");
    pts.push_back({{theta, phi}, w});
  }
  if (uniform) return QubitDistribution::uniform();
  if (pts.empty()) detail::parse_fail(fmt, lines.size(), "no points and no 'uniform' line");
  return QubitDistribution::discrete(std::move(pts), 1e-9);
}

}  // namespace qmoney
