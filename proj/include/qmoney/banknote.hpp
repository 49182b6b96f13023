#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qmoney/distribution.hpp"
#include "qmoney/qstate.hpp"

namespace qmoney {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

inline constexpr Rgb kWhite{255, 255, 255};
inline constexpr Rgb kRed{255, 0, 0};

struct Image {
  int width = 0;
  int height = 0;
  std::vector<Rgb> pixels;  // row-major

  Image() = default;
  Image(int w, int h, Rgb fill = kWhite)
      : width(w), height(h), pixels(static_cast<size_t>(w) * h, fill) {}

  Rgb& at(int x, int y) { return pixels[static_cast<size_t>(y) * width + x]; }
  const Rgb& at(int x, int y) const { return pixels[static_cast<size_t>(y) * width + x]; }
  friend bool operator==(const Image&, const Image&) = default;
};

// Binary P6, maxval 255. Comments are accepted on read, never written.
std::string write_ppm(const Image& img);
Image read_ppm(std::string_view bytes);

/// Polarization alphabet. L and R are the Bloch poles, H/V/D/A the equator.
enum class Symbol : std::uint8_t { H, V, D, A, L, R, Blank };

char symbol_code(Symbol s);
Symbol symbol_from_code(char c);
std::optional<PureQubit> symbol_state(Symbol s);

struct PaletteEntry {
  Rgb color;
  Symbol symbol;
};

struct Palette {
  std::string name;
  std::vector<PaletteEntry> entries;

  Rgb color_of(Symbol s) const;
};

/// Named palettes "banknote1" and "banknote2".
Palette palette_by_name(std::string_view name);

struct Banknote {
  std::string serial;
  int width = 0;
  int height = 0;
  std::vector<Symbol> cells;                  // row-major
  std::vector<std::optional<PureQubit>> secret;  // same shape as cells

  size_t photon_count() const;
  friend bool operator==(const Banknote&, const Banknote&) = default;
};

/// Nearest palette color per pixel (Euclidean RGB distance at most 16).
/// Throws UnmappableColor naming the first offending pixel.
Banknote encode(const Image& image, const Palette& palette, const std::string& serial);

/// Each pixel replaced by its palette color.
Image quantize(const Image& image, const Palette& palette);

/// Symbol frequencies over non-blank cells. Throws EmptyBanknote.
QubitDistribution empirical_distribution(const Banknote& note);

struct PhotonEntry {
  size_t cell = 0;
  std::optional<PureQubit> state;  // nullopt = lost
};

struct PhotonSequence {
  std::vector<PhotonEntry> entries;  // one per non-blank cell, cell ascending

  double delivered_fraction() const;
};

/// Each photon lost independently with probability loss_prob.
PhotonSequence emit_photons(const Banknote& note, double loss_prob, std::uint64_t seed);

enum class CellResult : std::uint8_t { Ok, Error, Missing };

/// Ok cells in palette color, Error red, Missing and blank cells white.
Image render(const Banknote& note, const std::vector<CellResult>& results,
             const Palette& palette);

// qnote v1 text format
std::string write_banknote(const Banknote& note);
Banknote read_banknote(std::string_view text);

/// Deterministic demo images whose non-blank symbol frequencies are the
/// two reference notes' (which = 1 or 2), drawn in the matching palette.
Image sample_image(int which);

/// width x height note (area a multiple of 8, no blank cells) with the
/// symbol frequencies of reference note `which`.
Banknote reference_note(int which, int width, int height, const std::string& serial = "ref");

}  // namespace qmoney
