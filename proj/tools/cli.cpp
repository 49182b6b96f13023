#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

#include "qmoney/attack.hpp"
#include "qmoney/banknote.hpp"
#include "qmoney/cloner.hpp"
#include "qmoney/distribution.hpp"
#include "qmoney/verification.hpp"

namespace qmoney::cli {

namespace fs = std::filesystem;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string format = "text";
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class Io {
 public:
  explicit Io(const Globals& g) : g_(g) {}

  std::string path(const std::string& p) const {
    if (g_.out_dir.empty() || fs::path(p).is_absolute()) return p;
    return (fs::path(g_.out_dir) / p).string();
  }

  void write(const std::string& p, const std::string& data) const {
    const fs::path full = path(p);
    if (full.has_parent_path()) {
      std::error_code ec;
      fs::create_directories(full.parent_path(), ec);
    }
    std::ofstream os(full, std::ios::binary);
    if (!os) throw Error(ErrorKind::Io, "cannot write '" + full.string() + "'");
    os.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!os) throw Error(ErrorKind::Io, "write failed for '" + full.string() + "'");
  }

 private:
  const Globals& g_;
};

double parse_kappa(const std::string& s) {
  if (s == "inf" || s == "infinity") return kInfiniteKappa;
  double k = 0.0;
  try {
    size_t pos = 0;
    k = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
  } catch (const std::exception&) {
    throw Error(ErrorKind::Parse, "invalid kappa '" + s + "'");
  }
  if (!(k > 0.0)) throw Error(ErrorKind::OutOfRange, "kappa must be positive");
  return k;
}

// key=value lines, or a one-row csv table.
void emit(std::ostream& out, const Globals& g,
          const std::vector<std::pair<std::string, std::string>>& kv) {
  if (g.format == "csv") {
    for (size_t i = 0; i < kv.size(); ++i) out << (i ? "," : "") << kv[i].first;
    out << '\n';
    for (size_t i = 0; i < kv.size(); ++i) out << (i ? "," : "") << kv[i].second;
    out << '\n';
  } else {
    for (const auto& [k, v] : kv) out << k << '=' << v << '\n';
  }
}

std::string join(const std::vector<std::string>& v, const char* sep) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + v[i];
  return s;
}

QubitDistribution public_distribution(const std::string& dist_file, const Banknote& note) {
  if (!dist_file.empty()) return read_distribution(read_file(dist_file));
  return empirical_distribution(note);
}

Rgb heat(double v) {
  v = std::clamp(v, 0.0, 1.0);
  return {static_cast<std::uint8_t>(std::lround(255 * v)), static_cast<std::uint8_t>(std::lround(64 * (1 - std::abs(2 * v - 1)))),
          static_cast<std::uint8_t>(std::lround(255 * (1 - v)))};
}

// One column per row of values, bar height proportional to value in [0, 1].
Image strip(const std::vector<double>& values, int height = 64, int col_width = 4) {
  Image img(static_cast<int>(values.size()) * col_width, height);
  for (size_t i = 0; i < values.size(); ++i) {
    const int h = static_cast<int>(std::lround(std::clamp(values[i], 0.0, 1.0) * height));
    for (int y = height - h; y < height; ++y)
      for (int dx = 0; dx < col_width; ++dx)
        img.at(static_cast<int>(i) * col_width + dx, y) = heat(values[i]);
  }
  return img;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return v;
}

void write_figure(const Io& io, std::ostream& out, const std::string& prefix,
                  const std::string& csv, const Image& img) {
  if (prefix.empty()) {
    out << csv;
    return;
  }
  io.write(prefix + ".csv", csv);
  io.write(prefix + ".ppm", write_ppm(img));
  out << "csv=" << io.path(prefix + ".csv") << "\nimage=" << io.path(prefix + ".ppm") << '\n';
}

std::string family_name(ClonerFamily f) {
  switch (f) {
    case ClonerFamily::Pcc: return "pcc";
    case ClonerFamily::Mpcc: return "mpcc";
    case ClonerFamily::Generic: return "generic";
  }
  return "?";
}

struct AttackArgs {
  std::string note, strategy = "optimized", cloner, dist, prefix = "attack", palette = "banknote1";
  std::string kappa = "25", policy = "uc-floor";
  double epsilon = -1.0, qsuccess = 1.0, loss = 0.0;
  unsigned threads = 1;
  bool per_cell = false;
};

struct VerifyArgs {
  std::string note, clone, dist, kappa = "25", policy = "uc-floor", render;
  std::string palette = "banknote1";
  unsigned threads = 1;
};

struct FigureArgs {
  int which = 2;
  std::string prefix, kappa = "25", policy = "uc-floor";
  double qsuccess = 0.248;
  int photons = 20000;
};

int cmd_encode(const Globals& g, const Io& io, std::ostream& out, std::ostream& err,
               const std::string& image, const std::string& palette, const std::string& serial,
               const std::string& dest) {
  const Image img = read_ppm(read_file(image));
  const Banknote note = encode(img, palette_by_name(palette), serial);
  if (note.photon_count() == 0) err << "warning: image has no non-blank cells; note is empty\n";
  io.write(dest, write_banknote(note));
  emit(out, g,
       {{"serial", note.serial},
        {"width", std::to_string(note.width)},
        {"height", std::to_string(note.height)},
        {"photons", std::to_string(note.photon_count())}});
  return kExitOk;
}

int cmd_optimize(const Globals& g, const Io& io, std::ostream& out, const std::string& dist,
                 const std::string& note_file, const std::string& dest, bool analytic,
                 int max_iter) {
  QubitDistribution q = QubitDistribution::uniform();
  if (!dist.empty())
    q = read_distribution(read_file(dist));
  else if (!note_file.empty())
    q = empirical_distribution(read_banknote(read_file(note_file)));
  else
    throw Error(ErrorKind::Parse, "optimize needs --dist or --note");

  const ROperator r = build_r(q);
  OptimizeOptions oo;
  oo.max_iter = max_iter;
  const OptimizeResult res = optimize_chi(r, oo);

  std::optional<FamilySelection> fam;
  try {
    fam = select_optimal_family(q);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NotAxiallySymmetric) throw;
  }

  CloningMap written = res.map;
  double f = res.fidelity;
  if (analytic && fam && fam->family != ClonerFamily::Generic) {
    written = analytic_chi(fam->cloner);
    written.label = family_name(fam->family);
    f = fam->fidelity;
  }
  if (!dest.empty()) io.write(dest, write_cloner(written));

  std::vector<std::pair<std::string, std::string>> kv{
      {"F", fmt(f)}, {"iterations", std::to_string(res.iterations)}};
  kv.emplace_back("family", fam ? family_name(fam->family) : "generic");
  kv.emplace_back("gamma", fam ? fmt(fam->gamma) : "nan");
  if (fam && fam->family == ClonerFamily::Mpcc) kv.emplace_back("lambda", fmt(fam->cloner.lambda_plus));
  if (fam && fam->family == ClonerFamily::Pcc) {
    kv.emplace_back("lambda_plus", fmt(fam->cloner.lambda_plus));
    kv.emplace_back("lambda_minus", fmt(fam->cloner.lambda_minus));
  }
  emit(out, g, kv);
  return kExitOk;
}

std::vector<std::pair<std::string, std::string>> report_kv(const VerificationReport& r) {
  return {{"total_cells", std::to_string(r.total_cells)},
          {"delivered", std::to_string(r.delivered)},
          {"correct", std::to_string(r.correct)},
          {"delivered_fraction", fmt(r.delivered_fraction)},
          {"avg_fidelity", fmt(r.avg_fid_estimate)},
          {"stderr", fmt(r.stderr_estimate)},
          {"threshold", fmt(r.threshold)},
          {"decision", r.decision.pass ? "pass" : "fail"},
          {"reasons", join(r.decision.reasons, "; ")}};
}

int cmd_attack(const Globals& g, const Io& io, std::ostream& out, const AttackArgs& a) {
  const Banknote note = read_banknote(read_file(a.note));
  const QubitDistribution gp = public_distribution(a.dist, note);

  AttackStrategy strat;
  strat.kind = parse_attack_kind(a.strategy);
  strat.seed = g.seed;
  strat.quantum_success_prob = a.qsuccess;
  if (a.epsilon >= 0.0)
    strat.epsilon = a.epsilon;
  else
    strat.epsilon = strat.kind == AttackKind::Classical ? 1.0 : 0.0;
  if (!a.cloner.empty()) strat.chi = read_cloner(read_file(a.cloner));

  const PhotonSequence seq = emit_photons(note, a.loss, g.seed);
  const AttackOutcome outcome = run_attack(seq, gp, strat, a.threads);

  const VerificationModel model =
      VerificationModel::make(parse_kappa(a.kappa), parse_threshold_policy(a.policy), gp);
  const Palette palette = palette_by_name(a.palette);
  const CloneVerification va = verify_clone(outcome.clone_a, note, model, g.seed ^ 0xA, a.threads);
  const CloneVerification vb = verify_clone(outcome.clone_b, note, model, g.seed ^ 0xB, a.threads);

  io.write(a.prefix + "_a.qclone", write_clone(outcome.clone_a));
  io.write(a.prefix + "_b.qclone", write_clone(outcome.clone_b));
  io.write(a.prefix + "_a.ppm", write_ppm(render(note, va.results, palette)));
  io.write(a.prefix + "_b.ppm", write_ppm(render(note, vb.results, palette)));
  const std::string report = write_attack_report(strat, outcome, va, a.per_cell);
  io.write(a.prefix + "_report.txt", report);

  if (g.format == "csv") {
    emit(out, g,
         {{"strategy", to_string(strat.kind)},
          {"epsilon", fmt(strat.epsilon)},
          {"copied_fraction", fmt(outcome.copied_fraction)},
          {"avg_fidelity", fmt(va.report.avg_fid_estimate)},
          {"stderr", fmt(va.report.stderr_estimate)},
          {"decision", va.report.decision.pass ? "pass" : "fail"},
          {"threshold", fmt(va.report.threshold)}});
  } else {
    out << write_attack_report(strat, outcome, va, false);
  }
  return kExitOk;
}

int cmd_verify(const Globals& g, const Io& io, std::ostream& out, const VerifyArgs& v) {
  const Banknote note = read_banknote(read_file(v.note));
  const CloneRecord clone = read_clone(read_file(v.clone));
  const QubitDistribution gp = public_distribution(v.dist, note);
  const VerificationModel model =
      VerificationModel::make(parse_kappa(v.kappa), parse_threshold_policy(v.policy), gp);
  const CloneVerification res = verify_clone(clone, note, model, g.seed, v.threads);
  if (!v.render.empty())
    io.write(v.render, write_ppm(render(note, res.results, palette_by_name(v.palette))));
  emit(out, g, report_kv(res.report));
  return res.report.decision.pass ? kExitOk : kExitVerifyFail;
}

int cmd_render(const Io& io, std::ostream& out, const std::string& note_file,
               const std::string& clone_file, const std::string& kappa,
               const std::string& palette, const std::string& dest, std::uint64_t seed) {
  const Banknote note = read_banknote(read_file(note_file));
  std::vector<CellResult> results(note.cells.size(), CellResult::Ok);
  if (!clone_file.empty()) {
    const CloneRecord clone = read_clone(read_file(clone_file));
    VerificationModel model;
    model.kappa = parse_kappa(kappa);
    model.f_pass = f_proc_pure(0.0, model.kappa);
    results = verify_clone(clone, note, model, seed).results;
  }
  io.write(dest, write_ppm(render(note, results, palette_by_name(palette))));
  out << "image=" << io.path(dest) << '\n';
  return kExitOk;
}

int cmd_figure(const Globals& g, const Io& io, std::ostream& out, const FigureArgs& f) {
  std::ostringstream csv;
  if (f.which == 2) {
    const std::vector<double> dtheta = linspace(0.0, std::numbers::pi, 61);
    std::vector<double> kappas;
    for (double k : linspace(std::log(0.1), std::log(30.0), 40)) kappas.push_back(std::exp(k));
    kappas.push_back(2.9515);
    kappas.push_back(25.0);
    std::sort(kappas.begin(), kappas.end());
    Image img(static_cast<int>(dtheta.size()), static_cast<int>(kappas.size()));
    csv << "delta_theta,kappa,f_proc\n";
    for (size_t j = 0; j < kappas.size(); ++j)
      for (size_t i = 0; i < dtheta.size(); ++i) {
        const double v = f_proc_pure(dtheta[i], kappas[j]);
        csv << fmt(dtheta[i]) << ',' << fmt(kappas[j]) << ',' << fmt(v) << '\n';
        img.at(static_cast<int>(i), static_cast<int>(kappas.size() - 1 - j)) = heat(v);
      }
    write_figure(io, out, f.prefix, csv.str(), img);
    return kExitOk;
  }

  if (f.which != 5 && f.which != 6)
    throw Error(ErrorKind::OutOfRange, "figure must be 2, 5 or 6");

  // Hybrid attacks on a reference banknote-2 sized to f.photons.
  const int width = 200;  // multiple of 8, so any height works
  const Banknote note = reference_note(2, width, std::max(1, (f.photons + width - 1) / width));
  const QubitDistribution gp = empirical_distribution(note);
  const PhotonSequence seq = emit_photons(note, 0.0, g.seed);
  const CloningMap map = optimize_chi(build_r(gp)).map;
  const std::vector<double> eps = linspace(0.0, 0.9, 19);

  if (f.which == 5) {
    csv << "epsilon,min_cloning_efficiency,expected_copied_fraction,copied_fraction\n";
    std::vector<double> bars;
    for (double e : eps) {
      AttackStrategy s{AttackKind::Hybrid, e, f.qsuccess, g.seed, map};
      const AttackOutcome o = run_attack(seq, gp, s, 0);
      csv << fmt(e) << ',' << fmt(min_cloning_efficiency(e)) << ','
          << fmt(e + (1 - e) * f.qsuccess) << ',' << fmt(o.copied_fraction) << '\n';
      bars.push_back(o.copied_fraction);
    }
    write_figure(io, out, f.prefix, csv.str(), strip(bars));
    return kExitOk;
  }

  const double kappa = parse_kappa(f.kappa);
  const VerificationModel uc = VerificationModel::make(kappa, ThresholdPolicy::UcFloor, gp);
  const VerificationModel gd = VerificationModel::make(kappa, ThresholdPolicy::GDependent, gp);
  csv << "epsilon,copied_fraction,avg_fidelity,stderr,threshold_uc,threshold_g,pass_uc,pass_g\n";
  std::vector<double> bars;
  for (double e : eps) {
    AttackStrategy s{AttackKind::Hybrid, e, f.qsuccess, g.seed, map};
    const AttackOutcome o = run_attack(seq, gp, s, 0);
    const CloneVerification v = verify_clone(o.clone_a, note, uc, g.seed, 0);
    const bool pass_g = decide({v.report.delivered_fraction, v.report.avg_fid_estimate}, gd).pass;
    csv << fmt(e) << ',' << fmt(o.copied_fraction) << ',' << fmt(v.report.avg_fid_estimate)
        << ',' << fmt(v.report.stderr_estimate) << ',' << fmt(uc.threshold) << ','
        << fmt(gd.threshold) << ',' << (v.report.decision.pass ? 1 : 0) << ','
        << (pass_g ? 1 : 0) << '\n';
    bars.push_back(v.report.avg_fid_estimate);
  }
  write_figure(io, out, f.prefix, csv.str(), strip(bars));
  return kExitOk;
}

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::NoConvergence: return kExitNoConvergence;
    case ErrorKind::GridMismatch: return kExitMismatch;
    default: return kExitInput;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Wiesner quantum money: encode, clone, attack and verify banknotes", "qmoney"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "64-bit seed for every random draw");
  app.add_option("--out-dir", g.out_dir, "directory for relative output paths");
  app.add_option("--format", g.format, "report format")
      ->check(CLI::IsMember({"text", "csv"}));

  auto* enc = app.add_subcommand("encode", "encode a PPM image as a banknote");
  std::string enc_image, enc_palette = "banknote1", enc_serial = "0000", enc_out;
  enc->add_option("--image", enc_image)->required();
  enc->add_option("--palette", enc_palette)->check(CLI::IsMember({"banknote1", "banknote2"}));
  enc->add_option("--serial", enc_serial);
  enc->add_option("--out", enc_out)->required();

  auto* smp = app.add_subcommand("sample", "write a demo image");
  int smp_which = 1;
  std::string smp_out;
  smp->add_option("--which", smp_which)->check(CLI::IsMember({1, 2}));
  smp->add_option("--out", smp_out)->required();

  auto* ren = app.add_subcommand("render", "render a note, or a clone's verification result");
  std::string ren_note, ren_clone, ren_kappa = "25", ren_palette = "banknote1", ren_out;
  ren->add_option("--note", ren_note)->required();
  ren->add_option("--clone", ren_clone);
  ren->add_option("--kappa", ren_kappa);
  ren->add_option("--palette", ren_palette);
  ren->add_option("--out", ren_out)->required();

  auto* opt = app.add_subcommand("optimize", "optimal 1->2 cloner for a distribution");
  std::string opt_dist, opt_note, opt_out;
  bool opt_analytic = false;
  int opt_max_iter = OptimizeOptions{}.max_iter;
  auto* od = opt->add_option("--dist", opt_dist);
  opt->add_option("--note", opt_note)->excludes(od);
  opt->add_option("--out", opt_out);
  opt->add_option("--max-iter", opt_max_iter)->check(CLI::PositiveNumber);
  opt->add_flag("--analytic", opt_analytic, "write the analytic family cloner when one applies");

  auto* att = app.add_subcommand("attack", "simulate a forgery");
  AttackArgs aa;
  att->add_option("--note", aa.note)->required();
  att->add_option("--strategy", aa.strategy)
      ->check(CLI::IsMember({"universal", "pcc", "mpcc", "optimized", "classical", "hybrid"}));
  att->add_option("--epsilon", aa.epsilon, "classical fraction");
  att->add_option("--qsuccess", aa.qsuccess, "quantum cloning success probability");
  att->add_option("--cloner", aa.cloner, "qcloner file");
  att->add_option("--dist", aa.dist, "public distribution (default: the note's)");
  att->add_option("--loss", aa.loss, "photon loss probability before the attack");
  att->add_option("--out-prefix", aa.prefix);
  att->add_option("--palette", aa.palette);
  att->add_option("--kappa", aa.kappa);
  att->add_option("--threshold-policy", aa.policy)
      ->check(CLI::IsMember({"uc-floor", "g-dependent"}));
  att->add_option("--threads", aa.threads);
  att->add_flag("--per-cell", aa.per_cell, "append the per-cell table to the report file");

  auto* ver = app.add_subcommand("verify", "bank-side verification of a clone");
  VerifyArgs va;
  ver->add_option("--note", va.note)->required();
  ver->add_option("--clone", va.clone)->required();
  ver->add_option("--kappa", va.kappa, "detector resolution, or inf");
  ver->add_option("--threshold-policy", va.policy)
      ->check(CLI::IsMember({"uc-floor", "g-dependent"}));
  ver->add_option("--dist", va.dist);
  ver->add_option("--render", va.render, "write the verified note as PPM");
  ver->add_option("--palette", va.palette);
  ver->add_option("--threads", va.threads);

  auto* fig = app.add_subcommand("figure", "tables behind the detector and attack figures");
  FigureArgs fa;
  fig->add_option("--which", fa.which)->check(CLI::IsMember({2, 5, 6}));
  fig->add_option("--out-prefix", fa.prefix);
  fig->add_option("--kappa", fa.kappa);
  fig->add_option("--qsuccess", fa.qsuccess);
  fig->add_option("--photons", fa.photons);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  const Io io(g);
  try {
    if (*enc) return cmd_encode(g, io, out, err, enc_image, enc_palette, enc_serial, enc_out);
    if (*smp) {
      io.write(smp_out, write_ppm(sample_image(smp_which)));
      out << "image=" << io.path(smp_out) << '\n';
      return kExitOk;
    }
    if (*ren) return cmd_render(io, out, ren_note, ren_clone, ren_kappa, ren_palette, ren_out, g.seed);
    if (*opt) return cmd_optimize(g, io, out, opt_dist, opt_note, opt_out, opt_analytic, opt_max_iter);
    if (*att) return cmd_attack(g, io, out, aa);
    if (*ver) return cmd_verify(g, io, out, va);
    if (*fig) return cmd_figure(g, io, out, fa);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace qmoney::cli
