// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "copyaug/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace copyaug {

struct Shape {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;

  constexpr std::size_t size() const noexcept { return height * width * channels; }
  friend constexpr bool operator==(const Shape &, const Shape &) = default;
};

inline std::string to_string(const Shape &s) {
  return std::to_string(s.height) + "x" + std::to_string(s.width) + "x" +
         std::to_string(s.channels);
}

/**
 * Pixel raster in the normalized float domain.
 *
 * Layout is row-major with interleaved channels: the value of channel `ch`
 * at (`row`, `col`) lives at `(row * width + col) * channels + ch`. Every
 * value is kept in [0, 1]; operations in this library preserve that, and
 * callers writing through `values()` are expected to as well.
 */
class ImageBuf {
public:
  ImageBuf() = default;

  ImageBuf(std::size_t height, std::size_t width, std::size_t channels, float fill = 0.0f)
      : shape_{height, width, channels} {
    check_shape(shape_);
    detail::require(fill >= 0.0f && fill <= 1.0f, "ImageBuf: fill value outside [0,1]");
    data_.assign(shape_.size(), fill);
  }

  ImageBuf(std::size_t height, std::size_t width, std::size_t channels, std::vector<float> data)
      : shape_{height, width, channels}, data_(std::move(data)) {
    check_shape(shape_);
    if (data_.size() != shape_.size())
      throw MalformedInput("ImageBuf: expected " + std::to_string(shape_.size()) +
                           " values, got " + std::to_string(data_.size()));
    for (float v : data_)
      if (!(v >= 0.0f && v <= 1.0f))
        throw MalformedInput("ImageBuf: value outside [0,1]");
  }

  const Shape &shape() const noexcept { return shape_; }
  std::size_t height() const noexcept { return shape_.height; }
  std::size_t width() const noexcept { return shape_.width; }
  std::size_t channels() const noexcept { return shape_.channels; }
  bool empty() const noexcept { return data_.empty(); }

  std::size_t offset(std::size_t row, std::size_t col, std::size_t ch = 0) const noexcept {
    return (row * shape_.width + col) * shape_.channels + ch;
  }

  float operator()(std::size_t row, std::size_t col, std::size_t ch = 0) const noexcept {
    return data_[offset(row, col, ch)];
  }
  float &operator()(std::size_t row, std::size_t col, std::size_t ch = 0) noexcept {
    return data_[offset(row, col, ch)];
  }

  std::span<const float> values() const noexcept { return data_; }
  std::span<float> values() noexcept { return data_; }

  friend bool operator==(const ImageBuf &, const ImageBuf &) = default;

private:
  static void check_shape(const Shape &s) {
    detail::require(s.height >= 1 && s.width >= 1, "ImageBuf: height and width must be >= 1");
    detail::require(s.channels == 1 || s.channels == 3, "ImageBuf: channels must be 1 or 3");
  }

  Shape shape_{};
  std::vector<float> data_;
};

/// Half-open pixel region [row_start, row_end) x [col_start, col_end).
struct Rect {
  std::size_t row_start = 0;
  std::size_t row_end = 0;
  std::size_t col_start = 0;
  std::size_t col_end = 0;

  constexpr std::size_t rows() const noexcept { return row_end - row_start; }
  constexpr std::size_t cols() const noexcept { return col_end - col_start; }
  constexpr std::size_t area() const noexcept { return rows() * cols(); }
  constexpr bool contains(std::size_t row, std::size_t col) const noexcept {
    return row >= row_start && row < row_end && col >= col_start && col < col_end;
  }

  friend constexpr bool operator==(const Rect &, const Rect &) = default;
};

inline std::string to_string(const Rect &r) {
  return "rows [" + std::to_string(r.row_start) + "," + std::to_string(r.row_end) + ") cols [" +
         std::to_string(r.col_start) + "," + std::to_string(r.col_end) + ")";
}

/// Converts 8-bit interleaved pixels into the normalized domain (byte / 255).
inline ImageBuf from_bytes(std::span<const std::uint8_t> raw, std::size_t height, std::size_t width,
                           std::size_t channels) {
  const Shape shape{height, width, channels};
  if (raw.size() != shape.size())
    throw MalformedInput("from_bytes: expected " + std::to_string(shape.size()) +
                         " bytes for " + to_string(shape) + ", got " + std::to_string(raw.size()));
  std::vector<float> data(raw.size());
  std::transform(raw.begin(), raw.end(), data.begin(),
                 [](std::uint8_t b) { return static_cast<float>(b) / 255.0f; });
  return ImageBuf(height, width, channels, std::move(data));
}

/// Quantizes one normalized value: round(v * 255) half away from zero, clamped.
inline std::uint8_t to_byte(float v) noexcept {
  const double scaled = std::round(static_cast<double>(v) * 255.0);
  return static_cast<std::uint8_t>(std::clamp(scaled, 0.0, 255.0));
}

inline std::vector<std::uint8_t> to_bytes(const ImageBuf &img) {
  std::vector<std::uint8_t> out(img.values().size());
  std::transform(img.values().begin(), img.values().end(), out.begin(), to_byte);
  return out;
}

} // namespace copyaug
