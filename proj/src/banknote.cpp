#include "qmoney/banknote.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <numbers>

#include "qmoney/random.hpp"
#include "text_util.hpp"

namespace qmoney {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMaxColorDistance = 16.0;

double color_distance(const Rgb& a, const Rgb& b) {
  const double dr = double(a.r) - b.r, dg = double(a.g) - b.g, db = double(a.b) - b.b;
  return std::sqrt(dr * dr + dg * dg + db * db);
}

const PaletteEntry* nearest(const Palette& palette, const Rgb& c) {
  const PaletteEntry* best = nullptr;
  double best_d = kMaxColorDistance;
  for (const auto& e : palette.entries) {
    const double d = color_distance(e.color, c);
    if (d <= best_d) {
      if (best && d == best_d) continue;
      best = &e;
      best_d = d;
    }
  }
  return best;
}

Error unmappable(int x, int y, const Rgb& c) {
  return Error(ErrorKind::UnmappableColor,
               "pixel (" + std::to_string(x) + ", " + std::to_string(y) + ") color (" +
                   std::to_string(c.r) + ", " + std::to_string(c.g) + ", " +
                   std::to_string(c.b) + ") is not within distance 16 of any palette color");
}

}  // namespace

std::string write_ppm(const Image& img) {
  std::string out = "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) +
                    "\n255\n";
  out.reserve(out.size() + img.pixels.size() * 3);
  for (const auto& p : img.pixels) {
    out.push_back(static_cast<char>(p.r));
    out.push_back(static_cast<char>(p.g));
    out.push_back(static_cast<char>(p.b));
  }
  return out;
}

Image read_ppm(std::string_view bytes) {
  size_t pos = 0;
  auto fail = [](const std::string& msg) -> Error {
    return Error(ErrorKind::Parse, "ppm: " + msg);
  };
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else {
        break;
      }
    }
  };
  auto read_uint = [&](const char* what) {
    skip_space();
    if (pos >= bytes.size() || !std::isdigit(static_cast<unsigned char>(bytes[pos])))
      throw fail(std::string("expected ") + what);
    long long v = 0;
    while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
      v = v * 10 + (bytes[pos] - '0');
      if (v > 1 << 24) throw fail(std::string(what) + " too large");
      ++pos;
    }
    return static_cast<int>(v);
  };

  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '6')
    throw fail("missing P6 magic");
  pos = 2;
  const int w = read_uint("width");
  const int h = read_uint("height");
  const int maxval = read_uint("maxval");
  if (w <= 0 || h <= 0) throw fail("image dimensions must be positive");
  if (maxval != 255) throw fail("only 8-bit images (maxval 255) are supported");
  if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos])))
    throw fail("unexpected end of pixel data");
  ++pos;

  const size_t need = static_cast<size_t>(w) * h * 3;
  if (bytes.size() - pos < need) throw fail("unexpected end of pixel data");
  Image img(w, h);
  for (size_t i = 0; i < img.pixels.size(); ++i) {
    img.pixels[i] = {static_cast<std::uint8_t>(bytes[pos + 3 * i]),
                     static_cast<std::uint8_t>(bytes[pos + 3 * i + 1]),
                     static_cast<std::uint8_t>(bytes[pos + 3 * i + 2])};
  }
  return img;
}

char symbol_code(Symbol s) {
  static constexpr std::array<char, 7> codes{'H', 'V', 'D', 'A', 'L', 'R', '.'};
  return codes[static_cast<size_t>(s)];
}

Symbol symbol_from_code(char c) {
  switch (c) {
    case 'H': return Symbol::H;
    case 'V': return Symbol::V;
    case 'D': return Symbol::D;
    case 'A': return Symbol::A;
    case 'L': return Symbol::L;
    case 'R': return Symbol::R;
    case '.': return Symbol::Blank;
    default: break;
  }
  throw Error(ErrorKind::Parse, std::string("unknown symbol code '") + c + "'");
}

std::optional<PureQubit> symbol_state(Symbol s) {
  switch (s) {
    case Symbol::L: return PureQubit{0.0, 0.0};
    case Symbol::R: return PureQubit{kPi, 0.0};
    case Symbol::H: return PureQubit{kPi / 2, 0.0};
    case Symbol::V: return PureQubit{kPi / 2, kPi};
    case Symbol::D: return PureQubit{kPi / 2, kPi / 2};
    case Symbol::A: return PureQubit{kPi / 2, 3 * kPi / 2};
    case Symbol::Blank: break;
  }
  return std::nullopt;
}

Rgb Palette::color_of(Symbol s) const {
  for (const auto& e : entries)
    if (e.symbol == s) return e.color;
  if (s == Symbol::Blank) return kWhite;
  throw Error(ErrorKind::UnmappableColor,
              std::string("palette '") + name + "' has no color for symbol " + symbol_code(s));
}

Palette palette_by_name(std::string_view name) {
  if (name == "banknote1") {
    return {"banknote1",
            {{kWhite, Symbol::Blank},
             {{30, 60, 200}, Symbol::L},
             {{200, 120, 20}, Symbol::R},
             {{20, 140, 60}, Symbol::H},
             {{120, 40, 140}, Symbol::V},
             {{20, 150, 170}, Symbol::D},
             {{170, 160, 30}, Symbol::A}}};
  }
  if (name == "banknote2") {
    return {"banknote2",
            {{kWhite, Symbol::Blank},
             {{10, 10, 10}, Symbol::L},
             {{110, 110, 110}, Symbol::R},
             {{40, 90, 160}, Symbol::H},
             {{160, 60, 90}, Symbol::V},
             {{60, 150, 110}, Symbol::D},
             {{190, 150, 70}, Symbol::A}}};
  }
  throw Error(ErrorKind::Parse, "unknown palette '" + std::string(name) + "'");
}

size_t Banknote::photon_count() const {
  return static_cast<size_t>(
      std::count_if(cells.begin(), cells.end(), [](Symbol s) { return s != Symbol::Blank; }));
}

Banknote encode(const Image& image, const Palette& palette, const std::string& serial) {
  Banknote note;
  note.serial = serial;
  note.width = image.width;
  note.height = image.height;
  note.cells.reserve(image.pixels.size());
  note.secret.reserve(image.pixels.size());
  for (int y = 0; y < image.height; ++y)
    for (int x = 0; x < image.width; ++x) {
      const Rgb& c = image.at(x, y);
      const PaletteEntry* e = nearest(palette, c);
      if (!e) throw unmappable(x, y, c);
      note.cells.push_back(e->symbol);
      note.secret.push_back(symbol_state(e->symbol));
    }
  return note;
}

Image quantize(const Image& image, const Palette& palette) {
  Image out(image.width, image.height);
  for (int y = 0; y < image.height; ++y)
    for (int x = 0; x < image.width; ++x) {
      const PaletteEntry* e = nearest(palette, image.at(x, y));
      if (!e) throw unmappable(x, y, image.at(x, y));
      out.at(x, y) = e->color;
    }
  return out;
}

QubitDistribution empirical_distribution(const Banknote& note) {
  std::vector<WeightedQubit> pts;
  size_t total = 0;
  for (const auto& s : note.secret) {
    if (!s) continue;
    ++total;
    auto it = std::find_if(pts.begin(), pts.end(),
                           [&](const WeightedQubit& p) { return same_state(p.state, *s); });
    if (it == pts.end())
      pts.push_back({*s, 1.0});
    else
      it->weight += 1.0;
  }
  if (total == 0) throw Error(ErrorKind::EmptyBanknote, "banknote carries no photons");
  for (auto& p : pts) p.weight /= static_cast<double>(total);
  return QubitDistribution::discrete(std::move(pts));
}

double PhotonSequence::delivered_fraction() const {
  if (entries.empty()) return 0.0;
  const auto delivered = std::count_if(entries.begin(), entries.end(),
                                       [](const PhotonEntry& e) { return e.state.has_value(); });
  return static_cast<double>(delivered) / static_cast<double>(entries.size());
}

PhotonSequence emit_photons(const Banknote& note, double loss_prob, std::uint64_t seed) {
  if (!(loss_prob >= 0.0 && loss_prob < 1.0))
    throw Error(ErrorKind::OutOfRange, "loss probability must lie in [0, 1)");
  PhotonSequence seq;
  for (size_t i = 0; i < note.cells.size(); ++i) {
    if (!note.secret[i]) continue;
    PhotonEntry e{i, note.secret[i]};
    if (loss_prob > 0.0 && counter_uniform(seed, i, DrawTag::Loss) < loss_prob)
      e.state.reset();
    seq.entries.push_back(e);
  }
  return seq;
}

Image render(const Banknote& note, const std::vector<CellResult>& results,
             const Palette& palette) {
  if (results.size() != note.cells.size())
    throw Error(ErrorKind::GridMismatch, "result grid does not match the banknote");
  Image img(note.width, note.height);
  for (size_t i = 0; i < note.cells.size(); ++i) {
    if (note.cells[i] == Symbol::Blank) continue;
    switch (results[i]) {
      case CellResult::Ok: img.pixels[i] = palette.color_of(note.cells[i]); break;
      case CellResult::Error: img.pixels[i] = kRed; break;
      case CellResult::Missing: img.pixels[i] = kWhite; break;
    }
  }
  return img;
}

std::string write_banknote(const Banknote& note) {
  std::string out = "qnote v1\nserial " + note.serial + "\ndims " +
                    std::to_string(note.width) + " " + std::to_string(note.height) + "\n";
  for (int y = 0; y < note.height; ++y) {
    for (int x = 0; x < note.width; ++x)
      out += symbol_code(note.cells[static_cast<size_t>(y) * note.width + x]);
    out += '\n';
  }
  for (const auto& s : note.secret)
    if (s) out += detail::format17(s->theta) + ' ' + detail::format17(s->phi) + '\n';
  return out;
}

Banknote read_banknote(std::string_view text) {
  constexpr std::string_view fmt = "qnote";
  const auto lines = detail::split_lines(text);
  size_t ln = 0;
  auto next = [&](const char* what) -> std::string_view {
    if (ln >= lines.size())
      detail::parse_fail(fmt, ln + 1, std::string("unexpected end of file, expected ") + what);
    return lines[ln++];
  };

  if (detail::trim(next("header")) != "qnote v1")
    detail::parse_fail(fmt, ln, "expected header 'qnote v1'");

  Banknote note;
  const auto serial_line = next("serial line");
  if (serial_line.substr(0, 7) != "serial ")
    detail::parse_fail(fmt, ln, "expected 'serial <text>'");
  note.serial = std::string(serial_line.substr(7));

  const auto dims = detail::split_ws(next("dims line"));
  if (dims.size() != 3 || dims[0] != "dims") detail::parse_fail(fmt, ln, "expected 'dims W H'");
  const auto w = detail::parse_int(dims[1], fmt, ln);
  const auto h = detail::parse_int(dims[2], fmt, ln);
  if (w <= 0 || h <= 0 || w * h > (1ll << 28))
    detail::parse_fail(fmt, ln, "dimensions must be positive");
  note.width = static_cast<int>(w);
  note.height = static_cast<int>(h);

  for (int y = 0; y < note.height; ++y) {
    const auto row = next("symbol row");
    if (static_cast<long long>(row.size()) != w)
      detail::parse_fail(fmt, ln, "row has " + std::to_string(row.size()) + " symbols, expected " +
                                      std::to_string(w));
    for (size_t x = 0; x < row.size(); ++x) {
      try {
        note.cells.push_back(symbol_from_code(row[x]));
      } catch (const Error& e) {
        detail::parse_fail(fmt, ln, "column " + std::to_string(x + 1) + ": " + e.what());
      }
    }
  }
  for (Symbol s : note.cells) {
    if (s == Symbol::Blank) {
      note.secret.push_back(std::nullopt);
      continue;
    }
    const auto tok = detail::split_ws(next("secret 'theta phi' line"));
    if (tok.size() != 2) detail::parse_fail(fmt, ln, "expected 'theta phi'");
    const double theta = detail::parse_double(tok[0], fmt, ln);
    const double phi = detail::parse_double(tok[1], fmt, ln);
    if (theta < 0.0 || theta > kPi) detail::parse_fail(fmt, ln, "theta outside [0, pi]");
    note.secret.push_back(PureQubit{theta, phi});
  }
  for (; ln < lines.size(); ++ln)
    if (!detail::trim(lines[ln]).empty()) detail::parse_fail(fmt, ln + 1, "trailing content");
  return note;
}

namespace {

// Symbol n of a stream of independently shuffled eight-symbol blocks that
// carry the reference frequencies exactly.
class BlockStream {
 public:
  explicit BlockStream(int which) : which_(which) {
    if (which != 1 && which != 2)
      throw Error(ErrorKind::OutOfRange, "reference note must be 1 or 2");
    base_ = which == 1 ? std::array<Symbol, 8>{Symbol::L, Symbol::L, Symbol::R, Symbol::R,
                                               Symbol::H, Symbol::V, Symbol::D, Symbol::A}
                       : std::array<Symbol, 8>{Symbol::L, Symbol::L, Symbol::L, Symbol::L,
                                               Symbol::H, Symbol::V, Symbol::D, Symbol::A};
  }

  Symbol next() {
    if (n_ % 8 == 0) {
      block_ = base_;
      for (int i = 7; i > 0; --i) {
        const auto r = counter_hash(static_cast<std::uint64_t>(which_), n_ + i, DrawTag::Strategy);
        std::swap(block_[i], block_[r % (i + 1)]);
      }
    }
    return block_[n_++ % 8];
  }

 private:
  int which_;
  size_t n_ = 0;
  std::array<Symbol, 8> base_{}, block_{};
};

}  // namespace

Image sample_image(int which) {
  BlockStream stream(which);
  const Palette palette = palette_by_name(which == 1 ? "banknote1" : "banknote2");
  constexpr int kW = 48, kH = 24, kMargin = 2;
  Image img(kW, kH);
  for (int y = kMargin; y < kH - kMargin; ++y)
    for (int x = kMargin; x < kW - kMargin; ++x) img.at(x, y) = palette.color_of(stream.next());
  return img;
}

Banknote reference_note(int which, int width, int height, const std::string& serial) {
  BlockStream stream(which);
  if (width <= 0 || height <= 0 || (static_cast<long long>(width) * height) % 8 != 0)
    throw Error(ErrorKind::OutOfRange, "reference note area must be a positive multiple of 8");
  Banknote note;
  note.serial = serial;
  note.width = width;
  note.height = height;
  const size_t n = static_cast<size_t>(width) * height;
  note.cells.reserve(n);
  note.secret.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    note.cells.push_back(stream.next());
    note.secret.push_back(symbol_state(note.cells.back()));
  }
  return note;
}

}  // namespace qmoney
