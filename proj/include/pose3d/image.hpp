// Copyright 2026 The pose3d Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef POSE3D_IMAGE_HPP_
#define POSE3D_IMAGE_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <png.h>

#include "pose3d/error.hpp"

namespace pose3d {

/// Interleaved RGB image, row-major (y, x, channel).
template <typename P>
struct BasicImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<P> pixels;

  BasicImage() = default;
  BasicImage(std::size_t w, std::size_t h, P fill = P{}) : width(w), height(h), pixels(w * h * 3, fill) {}

  P& at(std::size_t x, std::size_t y, std::size_t c) { return pixels[(y * width + x) * 3 + c]; }
  const P& at(std::size_t x, std::size_t y, std::size_t c) const { return pixels[(y * width + x) * 3 + c]; }

  friend bool operator==(const BasicImage&, const BasicImage&) = default;
};

using Image = BasicImage<double>;
using Image8 = BasicImage<std::uint8_t>;

/// Axis-aligned pixel rectangle; x, y may be negative after square extension.
struct Box {
  long x = 0;
  long y = 0;
  long w = 0;
  long h = 0;

  friend bool operator==(const Box&, const Box&) = default;
};

/// Intersection of `box` with the image rectangle.
inline Box clamp_box(const Box& box, std::size_t width, std::size_t height) {
  const long x0 = std::clamp(box.x, 0L, static_cast<long>(width));
  const long y0 = std::clamp(box.y, 0L, static_cast<long>(height));
  const long x1 = std::clamp(box.x + box.w, 0L, static_cast<long>(width));
  const long y1 = std::clamp(box.y + box.h, 0L, static_cast<long>(height));
  return {x0, y0, x1 - x0, y1 - y0};
}

/// Square box of side max(w, h) sharing the centre of `box`; when the padding
/// is odd the extra pixel goes right/below.
inline Box square_box(const Box& box) {
  if (box.w <= 0 || box.h <= 0) {
    throw InvalidInputError("invalid box: zero area (" + std::to_string(box.w) + "x" +
                            std::to_string(box.h) + ")");
  }
  const long side = std::max(box.w, box.h);
  return {box.x - (side - box.w) / 2, box.y - (side - box.h) / 2, side, side};
}

/// Crops the square extension of `box`. Pixels outside the source are zero.
template <typename P>
BasicImage<P> crop_square(const BasicImage<P>& img, const Box& box) {
  const Box sq = square_box(box);
  BasicImage<P> out(static_cast<std::size_t>(sq.w), static_cast<std::size_t>(sq.h), P{0});
  for (long y = 0; y < sq.h; ++y) {
    const long sy = sq.y + y;
    if (sy < 0 || sy >= static_cast<long>(img.height)) continue;
    for (long x = 0; x < sq.w; ++x) {
      const long sx = sq.x + x;
      if (sx < 0 || sx >= static_cast<long>(img.width)) continue;
      for (std::size_t c = 0; c < 3; ++c) out.at(x, y, c) = img.at(sx, sy, c);
    }
  }
  return out;
}

/// Bilinear resize to target x target with half-pixel centres
/// (align_corners = false); samples are clamped at the border.
inline Image resize_bilinear(const Image& img, std::size_t target = 128) {
  if (img.width == 0 || img.height == 0 || target == 0) throw InvalidInputError("resize: empty image");
  if (img.width == target && img.height == target) return img;
  Image out(target, target);
  const double sx = static_cast<double>(img.width) / static_cast<double>(target);
  const double sy = static_cast<double>(img.height) / static_cast<double>(target);
  auto source = [](std::size_t d, double scale, std::size_t n, std::size_t& i0, std::size_t& i1, double& f) {
    double s = (static_cast<double>(d) + 0.5) * scale - 0.5;
    s = std::clamp(s, 0.0, static_cast<double>(n - 1));
    i0 = static_cast<std::size_t>(std::floor(s));
    i1 = std::min(i0 + 1, n - 1);
    f = s - static_cast<double>(i0);
  };
  for (std::size_t y = 0; y < target; ++y) {
    std::size_t y0, y1;
    double fy;
    source(y, sy, img.height, y0, y1, fy);
    for (std::size_t x = 0; x < target; ++x) {
      std::size_t x0, x1;
      double fx;
      source(x, sx, img.width, x0, x1, fx);
      for (std::size_t c = 0; c < 3; ++c) {
        const double top = img.at(x0, y0, c) * (1 - fx) + img.at(x1, y0, c) * fx;
        const double bottom = img.at(x0, y1, c) * (1 - fx) + img.at(x1, y1, c) * fx;
        out.at(x, y, c) = top * (1 - fy) + bottom * fy;
      }
    }
  }
  return out;
}

/// 8-bit to [0, 1] reals.
inline Image to_real(const Image8& img) {
  Image out(img.width, img.height);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) out.pixels[i] = img.pixels[i] / 255.0;
  return out;
}

inline void write_png(const std::filesystem::path& path, const Image8& img) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(img.width);
  png.height = static_cast<png_uint_32>(img.height);
  png.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&png, path.c_str(), 0, img.pixels.data(), 0, nullptr)) {
    throw DataError("cannot write PNG " + path.string() + ": " + png.message);
  }
}

inline Image8 read_png(const std::filesystem::path& path) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&png, path.c_str())) {
    throw DataError("cannot read PNG " + path.string() + ": " + png.message);
  }
  png.format = PNG_FORMAT_RGB;
  Image8 img(png.width, png.height);
  if (!png_image_finish_read(&png, nullptr, img.pixels.data(), 0, nullptr)) {
    png_image_free(&png);
    throw DataError("cannot decode PNG " + path.string() + ": " + png.message);
  }
  return img;
}

}  // namespace pose3d

#endif  // POSE3D_IMAGE_HPP_
