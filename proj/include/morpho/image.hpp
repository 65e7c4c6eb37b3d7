#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "errors.hpp"
#include "grid.hpp"

namespace morpho {

/// 8-bit greyscale raster, row 0 at the top.
using GreyImage = Grid<std::uint8_t>;

namespace detail {

inline void skip_pnm_space(std::istream& in) {
  for (;;) {
    int c = in.peek();
    if (c == '#') {
      std::string discard;
      std::getline(in, discard);
    } else if (c != EOF && std::isspace(c)) {
      in.get();
    } else {
      return;
    }
  }
}

inline int read_pnm_int(std::istream& in, const std::string& what) {
  skip_pnm_space(in);
  int v = -1;
  if (!(in >> v) || v < 0) throw InputError("malformed PGM header: " + what);
  return v;
}

}  // namespace detail

/// Reads a portable greymap, binary (P5) or plain (P2). 16-bit samples are
/// scaled down to 8 bits.
inline GreyImage read_pgm(std::istream& in) {
  std::string magic(2, '\0');
  if (!in.read(magic.data(), 2) || (magic != "P5" && magic != "P2"))
    throw InputError("not a PGM image (expected P5 or P2)");
  const int w = detail::read_pnm_int(in, "width");
  const int h = detail::read_pnm_int(in, "height");
  const int maxval = detail::read_pnm_int(in, "maxval");
  if (w == 0 || h == 0) throw InputError("empty PGM image");
  if (maxval == 0 || maxval > 65535) throw InputError("PGM maxval out of range");

  GreyImage img(w, h);
  auto scale = [maxval](int v) {
    return static_cast<std::uint8_t>((static_cast<long>(v) * 255 + maxval / 2) / maxval);
  };
  if (magic == "P2") {
    for (auto& px : img.values()) {
      px = scale(detail::read_pnm_int(in, "sample"));
    }
    return img;
  }
  in.get();  // single whitespace after maxval
  const int bytes = maxval < 256 ? 1 : 2;
  std::string raw(img.size() * bytes, '\0');
  if (!in.read(raw.data(), static_cast<std::streamsize>(raw.size())))
    throw InputError("truncated PGM pixel data");
  auto out = img.values();
  for (std::size_t i = 0; i < out.size(); ++i) {
    int v = static_cast<unsigned char>(raw[i * bytes]);
    if (bytes == 2) v = (v << 8) | static_cast<unsigned char>(raw[i * 2 + 1]);
    out[i] = scale(std::min(v, maxval));
  }
  return img;
}

inline GreyImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open image " + path.string());
  return read_pgm(in);
}

inline void write_pgm(std::ostream& out, const GreyImage& img) {
  out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
  auto px = img.values();
  out.write(reinterpret_cast<const char*>(px.data()), static_cast<std::streamsize>(px.size()));
}

inline void write_pgm(const std::filesystem::path& path, const GreyImage& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write image " + path.string());
  write_pgm(out, img);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace morpho
