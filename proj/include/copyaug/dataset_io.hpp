// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "copyaug/error.hpp"
#include "copyaug/image.hpp"

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <vector>

namespace copyaug {

struct LabeledImage {
  std::uint8_t label = 0;
  ImageBuf image;
};

// CIFAR-10 binary layout: 1 label byte, then 32x32 R, G and B planes.
inline constexpr std::size_t kCifarSide = 32;
inline constexpr std::size_t kCifarPlane = kCifarSide * kCifarSide;
inline constexpr std::size_t kCifarRecordBytes = 1 + 3 * kCifarPlane;
inline constexpr std::size_t kCifarClasses = 10;

namespace detail {

inline std::vector<std::uint8_t> read_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path &path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out)
    throw IoError("short write to " + path.string());
}

} // namespace detail

/// Parses CIFAR-10 records, converting planar RGB to interleaved pixels.
inline std::vector<LabeledImage> parse_cifar10(std::span<const std::uint8_t> bytes) {
  if (bytes.size() % kCifarRecordBytes != 0)
    throw MalformedInput("CIFAR-10 data length " + std::to_string(bytes.size()) +
                         " is not a multiple of " + std::to_string(kCifarRecordBytes));
  std::vector<LabeledImage> out;
  out.reserve(bytes.size() / kCifarRecordBytes);
  std::vector<std::uint8_t> interleaved(3 * kCifarPlane);
  for (std::size_t off = 0; off < bytes.size(); off += kCifarRecordBytes) {
    const std::uint8_t label = bytes[off];
    if (label >= kCifarClasses)
      throw MalformedInput("CIFAR-10 record " + std::to_string(off / kCifarRecordBytes) +
                           " has label " + std::to_string(label));
    const auto planes = bytes.subspan(off + 1, 3 * kCifarPlane);
    for (std::size_t p = 0; p < kCifarPlane; ++p)
      for (std::size_t ch = 0; ch < 3; ++ch)
        interleaved[p * 3 + ch] = planes[ch * kCifarPlane + p];
    out.push_back({label, from_bytes(interleaved, kCifarSide, kCifarSide, 3)});
  }
  return out;
}

inline std::vector<LabeledImage> read_cifar10_batch(const std::filesystem::path &path) {
  return parse_cifar10(detail::read_file(path));
}

/// Inverse of parse_cifar10; images must be 32x32x3.
inline std::vector<std::uint8_t> encode_cifar10(std::span<const LabeledImage> images) {
  std::vector<std::uint8_t> out;
  out.reserve(images.size() * kCifarRecordBytes);
  for (const auto &li : images) {
    detail::require(li.image.shape() == Shape{kCifarSide, kCifarSide, 3},
                    "encode_cifar10: images must be 32x32x3");
    detail::require(li.label < kCifarClasses, "encode_cifar10: label out of range");
    out.push_back(li.label);
    const auto px = to_bytes(li.image);
    for (std::size_t ch = 0; ch < 3; ++ch)
      for (std::size_t p = 0; p < kCifarPlane; ++p)
        out.push_back(px[p * 3 + ch]);
  }
  return out;
}

inline void write_cifar10_batch(std::span<const LabeledImage> images,
                                const std::filesystem::path &path) {
  detail::write_file(path, encode_cifar10(images));
}

// ---------------------------------------------------------------------------
// PPM (P6, maxval 255)
// ---------------------------------------------------------------------------

inline std::vector<std::uint8_t> encode_ppm(const ImageBuf &img) {
  detail::require(img.channels() == 3, "encode_ppm: PPM needs a 3-channel image");
  const std::string header =
      "P6\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  const auto px = to_bytes(img);
  out.insert(out.end(), px.begin(), px.end());
  return out;
}

namespace detail {

class PpmHeaderReader {
public:
  explicit PpmHeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t pos() const noexcept { return pos_; }

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n')
          ++pos_;
      } else if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::size_t number(const char *what) {
    skip_space_and_comments();
    std::size_t value = 0;
    std::size_t digits = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + static_cast<std::size_t>(bytes_[pos_] - '0');
      if (++digits > 9)
        throw MalformedInput(std::string("PPM: ") + what + " is too large");
      ++pos_;
    }
    if (digits == 0)
      throw MalformedInput(std::string("PPM: missing ") + what);
    return value;
  }

  void single_whitespace() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_]))
      throw MalformedInput("PPM: expected whitespace after maxval");
    ++pos_;
  }

private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

} // namespace detail

inline ImageBuf decode_ppm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P')
    throw MalformedInput("PPM: missing magic");
  if (bytes[1] != '6')
    throw UnsupportedFormat("PPM: only binary P6 is supported");
  detail::PpmHeaderReader reader(bytes.subspan(2));
  const std::size_t width = reader.number("width");
  const std::size_t height = reader.number("height");
  const std::size_t maxval = reader.number("maxval");
  if (maxval != 255)
    throw UnsupportedFormat("PPM: maxval " + std::to_string(maxval) + " (only 255 is supported)");
  reader.single_whitespace();
  if (width == 0 || height == 0)
    throw MalformedInput("PPM: zero-sized image");
  const std::size_t payload = width * height * 3;
  const auto rest = bytes.subspan(2 + reader.pos());
  if (rest.size() < payload)
    throw MalformedInput("PPM: truncated payload (" + std::to_string(rest.size()) + " of " +
                         std::to_string(payload) + " bytes)");
  if (rest.size() > payload)
    throw MalformedInput("PPM: trailing bytes after payload");
  return from_bytes(rest, height, width, 3);
}

inline void write_ppm(const ImageBuf &img, const std::filesystem::path &path) {
  detail::write_file(path, encode_ppm(img));
}

inline ImageBuf read_ppm(const std::filesystem::path &path) {
  return decode_ppm(detail::read_file(path));
}

// ---------------------------------------------------------------------------
// Preview grids
// ---------------------------------------------------------------------------

inline constexpr std::size_t kGridSeparator = 2;

/**
 * Tiles equally shaped images row-major with black 2-pixel gutters between
 * tiles (none around the border). The number of columns is capped at the
 * image count; unused cells of the last row stay black.
 */
inline ImageBuf compose_grid(std::span<const ImageBuf> images, std::size_t columns) {
  detail::require(!images.empty(), "preview grid: no images");
  detail::require(columns >= 1, "preview grid: columns must be >= 1");
  const Shape tile = images.front().shape();
  for (const auto &img : images)
    detail::require(img.shape() == tile, "preview grid: images differ in shape");
  const std::size_t cols = std::min(columns, images.size());
  const std::size_t rows = (images.size() + cols - 1) / cols;
  const std::size_t width = cols * tile.width + (cols - 1) * kGridSeparator;
  const std::size_t height = rows * tile.height + (rows - 1) * kGridSeparator;
  ImageBuf grid(height, width, tile.channels, 0.0f);
  for (std::size_t i = 0; i < images.size(); ++i) {
    const std::size_t top = (i / cols) * (tile.height + kGridSeparator);
    const std::size_t left = (i % cols) * (tile.width + kGridSeparator);
    const auto &img = images[i];
    for (std::size_t r = 0; r < tile.height; ++r) {
      const auto src = img.values().subspan(img.offset(r, 0), tile.width * tile.channels);
      std::copy(src.begin(), src.end(),
                grid.values().begin() + static_cast<std::ptrdiff_t>(grid.offset(top + r, left)));
    }
  }
  return grid;
}

inline void write_preview_grid(std::span<const ImageBuf> images, std::size_t columns,
                               const std::filesystem::path &path) {
  write_ppm(compose_grid(images, columns), path);
}

} // namespace copyaug
