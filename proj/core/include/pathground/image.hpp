#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace pathground::img {

using Color = std::array<uint8_t, 3>;

/// 8-bit interleaved RGB raster, row-major, origin top-left.
struct ImageU8 {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> rgb;  // height * width * 3

  uint8_t* px(int x, int y) {
    return &rgb[3 * (static_cast<size_t>(y) * width + x)];
  }
  const uint8_t* px(int x, int y) const {
    return &rgb[3 * (static_cast<size_t>(y) * width + x)];
  }
};

ImageU8 make_image(int width, int height, Color fill);

/// Writes an 8-bit RGB PNG. Throws IoError on failure.
void write_png(const ImageU8& image, const std::filesystem::path& path);

/// Reads an 8-bit RGB PNG (alpha is dropped, gray promoted). Throws IoError.
ImageU8 read_png(const std::filesystem::path& path);

/// Reads only the dimensions of a PNG, without decoding pixel data.
std::pair<int, int> read_png_size(const std::filesystem::path& path);

/// Draws an axis-aligned rectangle outline; coordinates are clamped to the
/// image. (x1, y1) is inclusive.
void draw_rect(ImageU8& image, int x0, int y0, int x1, int y1, Color color,
               int thickness = 2);

/// Luminance in [0,1], one float per pixel.
std::vector<float> to_gray(const ImageU8& image);

}  // namespace pathground::img
