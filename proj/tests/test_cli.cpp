#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include "cli.hpp"
#include "qmoney/banknote.hpp"
#include "qmoney/distribution.hpp"

namespace fs = std::filesystem;
using namespace qmoney;

namespace {

struct Run {
  int code;
  std::string out, err;
};

class Workdir {
 public:
  explicit Workdir(const std::string& name)
      : dir_(fs::temp_directory_path() / ("qmoney_cli_" + name)) {
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  ~Workdir() { fs::remove_all(dir_); }

  std::string path(const std::string& f) const { return (dir_ / f).string(); }

  Run run(std::vector<std::string> args) const {
    args.insert(args.begin(), {"--out-dir", dir_.string()});
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
  }

  std::string read(const std::string& f) const {
    std::ifstream in(path(f), std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  }

  void write(const std::string& f, const std::string& data) const {
    std::ofstream(path(f), std::ios::binary) << data;
  }

 private:
  fs::path dir_;
};

std::string value(const std::string& text, const std::string& key) {
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line))
    if (line.rfind(key + "=", 0) == 0) return line.substr(key.size() + 1);
  return {};
}

}  // namespace

TEST_CASE("help and bad flags") {
  Workdir w("help");
  CHECK(w.run({"--help"}).code == 0);
  CHECK(w.run({}).code == cli::kExitInput);
  CHECK(w.run({"optimize", "--bogus"}).code == cli::kExitInput);
  CHECK(w.run({"--format", "xml", "sample", "--out", "x.ppm"}).code == cli::kExitInput);
}

TEST_CASE("sample, encode and render round trip") {
  Workdir w("encode");
  REQUIRE(w.run({"sample", "--which", "1", "--out", "s1.ppm"}).code == 0);
  const Run enc = w.run({"encode", "--image", w.path("s1.ppm"), "--palette", "banknote1",
                         "--serial", "N-1", "--out", "n1.qnote"});
  REQUIRE(enc.code == 0);
  CHECK(value(enc.out, "photons") == "880");
  const Banknote note = read_banknote(w.read("n1.qnote"));
  CHECK(note.serial == "N-1");
  const auto g = empirical_distribution(note);
  CHECK(g.pole_mass_north() == 0.25);
  CHECK(g.pole_mass_south() == 0.25);

  REQUIRE(w.run({"render", "--note", w.path("n1.qnote"), "--out", "r1.ppm"}).code == 0);
  CHECK(w.read("r1.ppm") == w.read("s1.ppm"));
}

TEST_CASE("encode errors") {
  Workdir w("encerr");
  REQUIRE(w.run({"sample", "--which", "2", "--out", "s2.ppm"}).code == 0);
  const std::string full = w.read("s2.ppm");
  w.write("trunc.ppm", full.substr(0, full.size() / 2));
  const Run t = w.run({"encode", "--image", w.path("trunc.ppm"), "--out", "x.qnote"});
  CHECK(t.code == cli::kExitInput);
  CHECK(t.err.find("unexpected end of pixel data") != std::string::npos);

  Image odd(3, 2);
  odd.at(2, 1) = {128, 255, 0};
  w.write("odd.ppm", write_ppm(odd));
  const Run u = w.run({"encode", "--image", w.path("odd.ppm"), "--out", "x.qnote"});
  CHECK(u.code == cli::kExitInput);
  CHECK(u.err.find("(2, 1)") != std::string::npos);

  w.write("white.ppm", write_ppm(Image(4, 4)));
  const Run e = w.run({"encode", "--image", w.path("white.ppm"), "--out", "white.qnote"});
  CHECK(e.code == 0);
  CHECK(e.err.find("warning") != std::string::npos);
  CHECK(read_banknote(w.read("white.qnote")).photon_count() == 0);

  CHECK(w.run({"encode", "--image", w.path("missing.ppm"), "--out", "x"}).code == cli::kExitInput);
}

TEST_CASE("optimize reports fidelity, family and Lambda") {
  Workdir w("optimize");
  w.write("uniform.qdist", "qdist v1\nuniform\n");
  const Run u = w.run({"optimize", "--dist", w.path("uniform.qdist"), "--out", "u.qcloner"});
  REQUIRE(u.code == 0);
  CHECK(std::abs(std::stod(value(u.out, "F")) - 5.0 / 6) < 1e-4);
  CHECK(fs::exists(w.path("u.qcloner")));

  w.write("n1.qnote", write_banknote(reference_note(1, 16, 4)));
  const Run b1 = w.run({"optimize", "--note", w.path("n1.qnote"), "--analytic"});
  REQUIRE(b1.code == 0);
  CHECK(std::abs(std::stod(value(b1.out, "F")) - 0.842) < 2e-3);
  CHECK(value(b1.out, "family") == "mpcc");
  CHECK(std::abs(std::stod(value(b1.out, "lambda")) - 0.888) < 3e-3);
  CHECK(value(b1.out, "gamma") == "0");

  w.write("n2.qnote", write_banknote(reference_note(2, 16, 4)));
  const Run b2 = w.run({"optimize", "--note", w.path("n2.qnote")});
  REQUIRE(b2.code == 0);
  CHECK(std::abs(std::stod(value(b2.out, "F")) - 0.926) < 2e-3);
  CHECK(value(b2.out, "family") == "pcc");

  const Run nc = w.run({"optimize", "--note", w.path("n2.qnote"), "--max-iter", "2"});
  CHECK(nc.code == cli::kExitNoConvergence);

  CHECK(w.run({"optimize"}).code == cli::kExitInput);
  w.write("bad.qdist", "qdist v1\n0 0 2\n");
  CHECK(w.run({"optimize", "--dist", w.path("bad.qdist")}).code == cli::kExitInput);

  const Run csv = w.run({"--format", "csv", "optimize", "--dist", w.path("uniform.qdist")});
  CHECK(csv.out.rfind("F,iterations,family,gamma", 0) == 0);
}

TEST_CASE("hybrid crack passes the floor and fails the g-dependent threshold") {
  Workdir w("crack");
  w.write("n2.qnote", write_banknote(reference_note(2, 200, 50)));
  const Run a = w.run({"--seed", "7", "attack", "--note", w.path("n2.qnote"), "--strategy", "hybrid",
                       "--epsilon", "0.4", "--qsuccess", "0.248", "--out-prefix", "crack"});
  REQUIRE(a.code == 0);
  CHECK(value(a.out, "strategy") == "hybrid");
  CHECK(std::abs(std::stod(value(a.out, "copied_fraction")) - 0.5488) < 0.02);
  for (const char* f : {"crack_a.qclone", "crack_b.qclone", "crack_a.ppm", "crack_b.ppm",
                        "crack_report.txt"})
    CHECK(fs::exists(w.path(f)));
  const Image img = read_ppm(w.read("crack_a.ppm"));
  CHECK(img.width == 200);

  const Run pass = w.run({"verify", "--note", w.path("n2.qnote"), "--clone", w.path("crack_a.qclone"),
                          "--kappa", "inf"});
  CHECK(pass.code == cli::kExitOk);
  CHECK(value(pass.out, "decision") == "pass");
  const Run fail = w.run({"verify", "--note", w.path("n2.qnote"), "--clone", w.path("crack_a.qclone"),
                          "--kappa", "inf", "--threshold-policy", "g-dependent"});
  CHECK(fail.code == cli::kExitVerifyFail);
  CHECK(value(fail.out, "reasons").find("threshold") != std::string::npos);
}

TEST_CASE("verify exit codes for malformed and mismatched inputs") {
  Workdir w("verify");
  w.write("small.qnote", write_banknote(reference_note(1, 8, 1)));
  w.write("big.qnote", write_banknote(reference_note(1, 16, 2)));
  REQUIRE(w.run({"attack", "--note", w.path("big.qnote"), "--strategy", "universal",
                 "--out-prefix", "big"}).code == 0);
  const Run mm = w.run({"verify", "--note", w.path("small.qnote"), "--clone", w.path("big_a.qclone")});
  CHECK(mm.code == cli::kExitMismatch);
  w.write("junk.qclone", "qclone v1\nentries one\n");
  CHECK(w.run({"verify", "--note", w.path("small.qnote"), "--clone", w.path("junk.qclone")}).code ==
        cli::kExitInput);
  CHECK(w.run({"verify", "--note", w.path("big.qnote"), "--clone", w.path("big_a.qclone"),
               "--kappa", "-3"}).code == cli::kExitInput);
  const Run ok = w.run({"verify", "--note", w.path("big.qnote"), "--clone", w.path("big_a.qclone"),
                        "--render", "v.ppm"});
  CHECK((ok.code == 0 || ok.code == 1));
  CHECK(fs::exists(w.path("v.ppm")));
}

TEST_CASE("attack outputs are seed deterministic") {
  Workdir w("determinism");
  w.write("n.qnote", write_banknote(reference_note(2, 40, 10)));
  auto go = [&](const std::string& seed, const std::string& prefix) {
    return w.run({"--seed", seed, "attack", "--note", w.path("n.qnote"), "--strategy", "hybrid",
                  "--epsilon", "0.4", "--qsuccess", "0.248", "--out-prefix", prefix, "--per-cell",
                  "--threads", "3"});
  };
  const Run a = go("5", "a");
  const Run b = go("5", "b");
  const Run c = go("6", "c");
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  for (const char* suffix : {"_a.qclone", "_b.qclone", "_a.ppm", "_b.ppm", "_report.txt"})
    CHECK(w.read(std::string("a") + suffix) == w.read(std::string("b") + suffix));
  CHECK(w.read("a_a.qclone") != w.read("c_a.qclone"));
  CHECK(w.read("a_report.txt").find("cell,used,success,correct") != std::string::npos);
}

TEST_CASE("figure tables") {
  Workdir w("figure");
  const Run f2 = w.run({"figure", "--which", "2"});
  REQUIRE(f2.code == 0);
  CHECK(f2.out.rfind("delta_theta,kappa,f_proc\n", 0) == 0);
  const auto at = f2.out.find("\n0,2.9515,");
  REQUIRE(at != std::string::npos);
  const double v = std::stod(f2.out.substr(at + 10, 12));
  CHECK(std::abs(v - 0.8333) < 1e-4);

  const Run f5 = w.run({"figure", "--which", "5", "--photons", "4000", "--out-prefix", "fig5"});
  REQUIRE(f5.code == 0);
  CHECK(fs::exists(w.path("fig5.csv")));
  CHECK(fs::exists(w.path("fig5.ppm")));
  CHECK(w.read("fig5.csv").rfind("epsilon,min_cloning_efficiency", 0) == 0);

  const Run f6 = w.run({"figure", "--which", "6", "--photons", "4000", "--kappa", "inf"});
  REQUIRE(f6.code == 0);
  CHECK(f6.out.rfind("epsilon,copied_fraction,avg_fidelity", 0) == 0);
  CHECK(w.run({"figure", "--which", "3"}).code == cli::kExitInput);
}
