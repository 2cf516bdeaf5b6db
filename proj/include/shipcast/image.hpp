#pragma once

// 8-bit RGB rasters, PNG I/O and a tiny label font.

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "shipcast/categorical.hpp"

namespace shipcast {

struct Image {
  int width{0};
  int height{0};
  std::vector<std::uint8_t> rgb;  ///< row-major, 3 bytes per pixel

  Image() = default;
  Image(int w, int h, Rgb fill);

  [[nodiscard]] Rgb pixel(int x, int y) const {
    const auto k = 3 * (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x));
    return {rgb[k], rgb[k + 1], rgb[k + 2]};
  }
  void set(int x, int y, Rgb c) {
    const auto k = 3 * (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x));
    rgb[k] = c.r;
    rgb[k + 1] = c.g;
    rgb[k + 2] = c.b;
  }
  void fill_rect(int x, int y, int w, int h, Rgb c);

  friend bool operator==(const Image&, const Image&) = default;
};

std::vector<std::uint8_t> encode_png(const Image& img);
/// Any PNG, converted to 8-bit RGB. Throws Error(IoError).
Image decode_png(const std::vector<std::uint8_t>& bytes);

void write_png(const std::filesystem::path& path, const Image& img);
Image read_png(const std::filesystem::path& path);

/// Draws `text` with a 5x7 bitmap font, each font pixel `scale` pixels wide.
/// Supports digits and A-H; other characters leave a blank cell.
void draw_text(Image& img, int x, int y, std::string_view text, Rgb ink, int scale = 2);

}  // namespace shipcast
