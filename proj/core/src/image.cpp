#include "pathground/image.hpp"

#include <png.h>

#include <algorithm>
#include <cstring>

#include "pathground/errors.hpp"

namespace pathground::img {

ImageU8 make_image(int width, int height, Color fill) {
  ImageU8 im;
  im.width = width;
  im.height = height;
  im.rgb.resize(static_cast<size_t>(width) * height * 3);
  for (size_t i = 0; i < im.rgb.size(); i += 3) {
    im.rgb[i] = fill[0];
    im.rgb[i + 1] = fill[1];
    im.rgb[i + 2] = fill[2];
  }
  return im;
}

void write_png(const ImageU8& image, const std::filesystem::path& path) {
  if (image.width <= 0 || image.height <= 0 ||
      image.rgb.size() != static_cast<size_t>(image.width) * image.height * 3) {
    throw IoError("write_png: malformed image buffer for " + path.string());
  }
  png_image pi;
  std::memset(&pi, 0, sizeof(pi));
  pi.version = PNG_IMAGE_VERSION;
  pi.width = static_cast<png_uint_32>(image.width);
  pi.height = static_cast<png_uint_32>(image.height);
  pi.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&pi, path.string().c_str(), 0, image.rgb.data(),
                               0, nullptr)) {
    throw IoError("write_png: " + path.string() + ": " + pi.message);
  }
}

ImageU8 read_png(const std::filesystem::path& path) {
  png_image pi;
  std::memset(&pi, 0, sizeof(pi));
  pi.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&pi, path.string().c_str())) {
    throw IoError("read_png: " + path.string() + ": " + pi.message);
  }
  pi.format = PNG_FORMAT_RGB;
  ImageU8 im;
  im.width = static_cast<int>(pi.width);
  im.height = static_cast<int>(pi.height);
  im.rgb.resize(PNG_IMAGE_SIZE(pi));
  if (!png_image_finish_read(&pi, nullptr, im.rgb.data(), 0, nullptr)) {
    throw IoError("read_png: " + path.string() + ": " + pi.message);
  }
  return im;
}

std::pair<int, int> read_png_size(const std::filesystem::path& path) {
  png_image pi;
  std::memset(&pi, 0, sizeof(pi));
  pi.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&pi, path.string().c_str())) {
    throw IoError("read_png_size: " + path.string() + ": " + pi.message);
  }
  const auto dims = std::make_pair(static_cast<int>(pi.width),
                                   static_cast<int>(pi.height));
  png_image_free(&pi);
  return dims;
}

void draw_rect(ImageU8& image, int x0, int y0, int x1, int y1, Color color,
               int thickness) {
  const auto clampx = [&](int x) { return std::clamp(x, 0, image.width - 1); };
  const auto clampy = [&](int y) { return std::clamp(y, 0, image.height - 1); };
  x0 = clampx(x0);
  x1 = clampx(x1);
  y0 = clampy(y0);
  y1 = clampy(y1);
  const auto put = [&](int x, int y) {
    uint8_t* p = image.px(x, y);
    p[0] = color[0];
    p[1] = color[1];
    p[2] = color[2];
  };
  for (int t = 0; t < thickness; ++t) {
    const int ax0 = clampx(x0 + t), ax1 = clampx(x1 - t);
    const int ay0 = clampy(y0 + t), ay1 = clampy(y1 - t);
    for (int x = ax0; x <= ax1; ++x) {
      put(x, ay0);
      put(x, ay1);
    }
    for (int y = ay0; y <= ay1; ++y) {
      put(ax0, y);
      put(ax1, y);
    }
  }
}

std::vector<float> to_gray(const ImageU8& image) {
  std::vector<float> g(static_cast<size_t>(image.width) * image.height);
  for (size_t i = 0; i < g.size(); ++i) {
    const uint8_t* p = &image.rgb[i * 3];
    g[i] = (0.299f * p[0] + 0.587f * p[1] + 0.114f * p[2]) / 255.0f;
  }
  return g;
}

}  // namespace pathground::img
