#include "qmoney/attack.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include "qmoney/random.hpp"
#include "text_util.hpp"

namespace qmoney {

namespace {

// Runs body(i) for i in [0, n) over contiguous chunks.
template <class F>
void parallel_for(size_t n, unsigned threads, F&& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<size_t>(threads, std::max<size_t>(n / 256, 1)));
  if (threads <= 1) {
    for (size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  const size_t chunk = (n + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const size_t lo = t * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &body] {
      for (size_t i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

struct Replacement {
  std::array<Matrix2c, 2> states;
  double p_first = 1.0;
};

// σ sampled in its own eigenbasis.
Replacement make_replacement(const QubitDistribution& g) {
  const Matrix2c sigma = classical_replacement(g);
  const HermitianEigen eig = herm_eig(sigma);
  Replacement r;
  for (int i = 0; i < 2; ++i) {
    const Vector2c v = eig.vectors.col(i);
    r.states[i] = v * v.adjoint();
  }
  r.p_first = std::clamp(eig.values(0) / (eig.values(0) + eig.values(1)), 0.0, 1.0);
  return r;
}

void check_strategy(const AttackStrategy& s) {
  if (!(s.epsilon >= 0.0 && s.epsilon <= 1.0))
    throw Error(ErrorKind::OutOfRange, "epsilon must lie in [0, 1]");
  if (s.kind == AttackKind::Classical && s.epsilon != 1.0)
    throw Error(ErrorKind::OutOfRange, "classical strategy requires epsilon = 1");
  if (s.kind != AttackKind::Classical && s.kind != AttackKind::Hybrid && s.epsilon != 0.0)
    throw Error(ErrorKind::OutOfRange, "pure quantum strategies require epsilon = 0");
  if (s.kind != AttackKind::Classical &&
      !(s.quantum_success_prob > 0.0 && s.quantum_success_prob <= 1.0))
    throw Error(ErrorKind::OutOfRange, "quantum success probability must lie in (0, 1]");
}

}  // namespace

AttackKind parse_attack_kind(std::string_view name) {
  if (name == "universal") return AttackKind::Universal;
  if (name == "pcc") return AttackKind::Pcc;
  if (name == "mpcc") return AttackKind::Mpcc;
  if (name == "optimized") return AttackKind::Optimized;
  if (name == "classical") return AttackKind::Classical;
  if (name == "hybrid") return AttackKind::Hybrid;
  throw Error(ErrorKind::Parse, "unknown attack strategy '" + std::string(name) + "'");
}

std::string to_string(AttackKind k) {
  switch (k) {
    case AttackKind::Universal: return "universal";
    case AttackKind::Pcc: return "pcc";
    case AttackKind::Mpcc: return "mpcc";
    case AttackKind::Optimized: return "optimized";
    case AttackKind::Classical: return "classical";
    case AttackKind::Hybrid: return "hybrid";
  }
  return "?";
}

std::string to_string(CellStrategy s) {
  switch (s) {
    case CellStrategy::Classical: return "classical";
    case CellStrategy::Quantum: return "quantum";
    case CellStrategy::Lost: return "lost";
  }
  return "?";
}

std::optional<CloningMap> resolve_cloning_map(const AttackStrategy& strat,
                                              const QubitDistribution& g_public) {
  switch (strat.kind) {
    case AttackKind::Classical: return std::nullopt;
    case AttackKind::Universal: return analytic_chi(AnalyticCloner::universal());
    case AttackKind::Pcc:
      return analytic_chi(AnalyticCloner::pcc(mean_polarization(g_public) >= 0.0));
    case AttackKind::Mpcc:
      return analytic_chi(AnalyticCloner::mpcc(optimal_mpcc_lambda(build_r(g_public))));
    case AttackKind::Optimized:
      if (!strat.chi) throw Error(ErrorKind::MissingChi, "optimized strategy needs a cloner");
      return strat.chi;
    case AttackKind::Hybrid:
      if (strat.chi) return strat.chi;
      return optimize_chi(build_r(g_public)).map;
  }
  return std::nullopt;
}

AttackOutcome run_attack(const PhotonSequence& seq, const QubitDistribution& g_public,
                         const AttackStrategy& strat, unsigned threads) {
  check_strategy(strat);
  const std::optional<CloningMap> map = resolve_cloning_map(strat, g_public);
  std::optional<Replacement> repl;
  if (strat.epsilon > 0.0) repl = make_replacement(g_public);

  const size_t n = seq.entries.size();
  AttackOutcome out;
  out.clone_a.cells.resize(n);
  out.clone_b.cells.resize(n);
  out.per_cell_log.resize(n);
  const std::uint64_t seed = strat.seed;

  parallel_for(n, threads, [&](size_t i) {
    const PhotonEntry& e = seq.entries[i];
    CloneCell& a = out.clone_a.cells[i];
    CloneCell& b = out.clone_b.cells[i];
    CellLog& log = out.per_cell_log[i];
    a.cell = b.cell = log.cell = e.cell;
    if (!e.state) return;

    if (strat.epsilon > 0.0 && counter_uniform(seed, e.cell, DrawTag::Strategy) < strat.epsilon) {
      log.used = CellStrategy::Classical;
      log.success = true;
      const bool first = counter_uniform(seed, e.cell, DrawTag::Replacement) < repl->p_first;
      const Matrix2c& fake = repl->states[first ? 0 : 1];
      const Matrix2c original = density(*e.state);
      if (counter_uniform(seed, e.cell, DrawTag::SwapSide) < 0.5) {
        a.rho = original;
        b.rho = fake;
      } else {
        a.rho = fake;
        b.rho = original;
      }
      return;
    }
    log.used = CellStrategy::Quantum;
    if (counter_uniform(seed, e.cell, DrawTag::QuantumSuccess) >= strat.quantum_success_prob)
      return;
    log.success = true;
    const CloneStates cs = clone_states(*map, *e.state);
    a.rho = cs.rho_a;
    b.rho = cs.rho_b;
  });

  size_t delivered = 0, copied = 0;
  for (const auto& log : out.per_cell_log) {
    if (log.used != CellStrategy::Lost) ++delivered;
    if (log.success) ++copied;
  }
  out.copied_fraction = delivered ? static_cast<double>(copied) / delivered : 0.0;
  return out;
}

double min_cloning_efficiency(double epsilon) {
  if (!(epsilon >= 0.0 && epsilon < 1.0))
    throw Error(ErrorKind::OutOfRange, "epsilon must lie in [0, 1)");
  return std::clamp((0.5 - epsilon) / (1.0 - epsilon), 0.0, 1.0);
}

namespace {

const PureQubit& secret_at(const Banknote& note, size_t cell) {
  if (cell >= note.cells.size() || !note.secret[cell])
    throw Error(ErrorKind::GridMismatch,
                "clone cell " + std::to_string(cell) + " does not match a photon of the note");
  return *note.secret[cell];
}

void check_alignment(const CloneRecord& clone, const Banknote& note) {
  if (note.cells.size() != static_cast<size_t>(note.width) * note.height ||
      note.secret.size() != note.cells.size())
    throw Error(ErrorKind::GridMismatch, "banknote grid is inconsistent");
  std::vector<bool> seen(note.cells.size(), false);
  for (const auto& c : clone.cells) {
    secret_at(note, c.cell);
    if (seen[c.cell])
      throw Error(ErrorKind::GridMismatch, "clone cell " + std::to_string(c.cell) + " repeated");
    seen[c.cell] = true;
  }
}

}  // namespace

CloneVerification verify_clone(const CloneRecord& clone, const Banknote& secret,
                               const VerificationModel& model, std::uint64_t seed,
                               unsigned threads) {
  check_alignment(clone, secret);
  CloneVerification v;
  v.results.assign(secret.cells.size(), CellResult::Missing);
  std::vector<std::uint8_t> correct(clone.cells.size(), 0);

  parallel_for(clone.cells.size(), threads, [&](size_t i) {
    const CloneCell& c = clone.cells[i];
    if (!c.rho) return;
    const double p =
        detection_prob(*c.rho, *secret.secret[c.cell], model.kappa, AxisPolicy::Project);
    correct[i] = counter_uniform(seed, c.cell, DrawTag::Verify) < p;
  });

  VerificationReport& r = v.report;
  r.total_cells = secret.photon_count();
  for (size_t i = 0; i < clone.cells.size(); ++i) {
    const CloneCell& c = clone.cells[i];
    if (!c.rho) continue;
    ++r.delivered;
    if (correct[i]) ++r.correct;
    v.results[c.cell] = correct[i] ? CellResult::Ok : CellResult::Error;
  }
  r.delivered_fraction =
      r.total_cells ? static_cast<double>(r.delivered) / r.total_cells : 0.0;
  if (r.delivered) {
    const double p = static_cast<double>(r.correct) / r.delivered;
    r.avg_fid_estimate = p;
    r.stderr_estimate = std::sqrt(p * (1.0 - p) / r.delivered);
  }
  r.threshold = model.threshold;
  r.decision = decide({r.delivered_fraction, r.avg_fid_estimate}, model);
  return v;
}

double mean_clone_fidelity(const CloneRecord& clone, const Banknote& secret) {
  check_alignment(clone, secret);
  double acc = 0.0;
  size_t n = 0;
  for (const auto& c : clone.cells) {
    if (!c.rho) continue;
    acc += fidelity(*c.rho, *secret.secret[c.cell]);
    ++n;
  }
  return n ? acc / n : 0.0;
}

std::string write_attack_report(const AttackStrategy& strat, const AttackOutcome& outcome,
                                const CloneVerification& verification, bool per_cell) {
  const VerificationReport& r = verification.report;
  std::ostringstream os;
  os << "strategy=" << to_string(strat.kind) << '\n'
     << "epsilon=" << detail::format17(strat.epsilon) << '\n'
     << "copied_fraction=" << detail::format17(outcome.copied_fraction) << '\n'
     << "avg_fidelity=" << detail::format17(r.avg_fid_estimate) << '\n'
     << "stderr=" << detail::format17(r.stderr_estimate) << '\n'
     << "decision=" << (r.decision.pass ? "pass" : "fail") << '\n'
     << "threshold=" << detail::format17(r.threshold) << '\n';
  if (per_cell) {
    os << "cell,used,success,correct\n";
    for (const auto& log : outcome.per_cell_log) {
      os << log.cell << ',' << to_string(log.used) << ',' << (log.success ? 1 : 0) << ',';
      const CellResult res = log.cell < verification.results.size()
                                 ? verification.results[log.cell]
                                 : CellResult::Missing;
      if (res != CellResult::Missing) os << (res == CellResult::Ok ? 1 : 0);
      os << '\n';
    }
  }
  return os.str();
}

std::string write_clone(const CloneRecord& clone) {
  std::string out = "qclone v1\nentries " + std::to_string(clone.cells.size()) + "\n";
  for (const auto& c : clone.cells) {
    out += std::to_string(c.cell);
    if (!c.rho) {
      out += " lost\n";
      continue;
    }
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        out += ' ' + detail::format17((*c.rho)(j, k).real()) + ' ' +
               detail::format17((*c.rho)(j, k).imag());
    out += '\n';
  }
  return out;
}

CloneRecord read_clone(std::string_view text) {
  constexpr std::string_view fmt = "qclone";
  const auto lines = detail::split_lines(text);
  if (lines.empty() || detail::trim(lines[0]) != "qclone v1")
    detail::parse_fail(fmt, 1, "expected header 'qclone v1'");
  if (lines.size() < 2) detail::parse_fail(fmt, 2, "expected 'entries N'");
  const auto head = detail::split_ws(lines[1]);
  if (head.size() != 2 || head[0] != "entries") detail::parse_fail(fmt, 2, "expected 'entries N'");
  const long long n = detail::parse_int(head[1], fmt, 2);
  if (n < 0) detail::parse_fail(fmt, 2, "negative entry count");
  if (lines.size() < static_cast<size_t>(n) + 2)
    detail::parse_fail(fmt, lines.size() + 1, "unexpected end of file");

  CloneRecord rec;
  rec.cells.reserve(static_cast<size_t>(n));
  for (long long i = 0; i < n; ++i) {
    const size_t ln = static_cast<size_t>(i) + 3;
    const auto tok = detail::split_ws(lines[ln - 1]);
    if (tok.empty()) detail::parse_fail(fmt, ln, "empty entry");
    const long long cell = detail::parse_int(tok[0], fmt, ln);
    if (cell < 0) detail::parse_fail(fmt, ln, "negative cell index");
    CloneCell c{static_cast<size_t>(cell), std::nullopt};
    if (tok.size() == 2 && tok[1] == "lost") {
      rec.cells.push_back(c);
      continue;
    }
    if (tok.size() != 9) detail::parse_fail(fmt, ln, "expected cell index and 8 numbers or 'lost'");
    Matrix2c rho;
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        rho(j, k) = cdouble(detail::parse_double(tok[1 + 4 * j + 2 * k], fmt, ln),
                            detail::parse_double(tok[2 + 4 * j + 2 * k], fmt, ln));
    try {
      require_density_matrix(rho, 1e-9);
    } catch (const Error& e) {
      detail::parse_fail(fmt, ln, e.what());
    }
    c.rho = rho;
    rec.cells.push_back(c);
  }
  for (size_t ln = static_cast<size_t>(n) + 2; ln < lines.size(); ++ln)
    if (!detail::trim(lines[ln]).empty()) detail::parse_fail(fmt, ln + 1, "trailing content");
  return rec;
}

}  // namespace qmoney
