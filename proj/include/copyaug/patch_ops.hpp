// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "copyaug/error.hpp"
#include "copyaug/image.hpp"
#include "copyaug/rng.hpp"

#include <algorithm>
#include <cstddef>
#include <string>

namespace copyaug {

/// Copyout/Cutout hyperparameters: square side length and Cutout's fill value.
struct PatchParams {
  std::size_t extent = 16;
  float fill = 0.5f;
};

/// Extent must be at least 1 and strictly smaller than both image dimensions.
inline void validate(const PatchParams &params, const Shape &shape) {
  if (params.extent < 1 || params.extent >= std::min(shape.height, shape.width))
    throw ContractError("extent " + std::to_string(params.extent) +
                        " must satisfy 1 <= extent < min(height, width) for " + to_string(shape));
  if (!(params.fill >= 0.0f && params.fill <= 1.0f))
    throw ContractError("fill must lie in [0,1]");
}

struct PixelPos {
  std::size_t row = 0;
  std::size_t col = 0;
  friend constexpr bool operator==(const PixelPos &, const PixelPos &) = default;
};

/**
 * Square of side `extent` whose top-left sits at center - floor(extent/2),
 * intersected with the image. Odd and even extents share the formula; for an
 * even extent the center is the pixel just below-right of the true middle.
 */
inline Rect clip_square(std::size_t center_row, std::size_t center_col, std::size_t extent,
                        std::size_t height, std::size_t width) {
  detail::require(extent >= 1, "clip_square: extent must be >= 1");
  detail::require(center_row < height && center_col < width,
                  "clip_square: center outside the image");
  const auto span = [extent](std::size_t center, std::size_t limit) {
    const std::size_t half = extent / 2;
    const std::size_t lo = center >= half ? center - half : 0;
    // center - half + extent, computed without going negative
    const std::size_t hi = std::min(center + (extent - half), limit);
    return std::pair{lo, hi};
  };
  const auto [r0, r1] = span(center_row, height);
  const auto [c0, c1] = span(center_col, width);
  return Rect{r0, r1, c0, c1};
}

/// Uniform center over the full index grid; row is drawn first.
inline PixelPos sample_target_center(RngStream &rng, std::size_t height, std::size_t width) {
  detail::require(height >= 1 && width >= 1, "sample_target_center: empty image");
  const auto row = rng.below(height);
  const auto col = rng.below(width);
  return {row, col};
}

/// Top-left corner of an extent x extent square placed fully inside the image.
inline PixelPos sample_source_topleft(RngStream &rng, std::size_t height, std::size_t width,
                                      std::size_t extent) {
  detail::require(extent >= 1, "sample_source_topleft: extent must be >= 1");
  detail::require(extent <= height && extent <= width,
                  "sample_source_topleft: extent larger than the source image");
  const auto row = rng.between(0, height - extent);
  const auto col = rng.between(0, width - extent);
  return {row, col};
}

/// Random choices behind one Copyout call.
struct CopyoutDraw {
  Rect target;       ///< clipped region overwritten in the target
  PixelPos source;   ///< top-left of the (unclipped) source square
};

inline CopyoutDraw draw_copyout(RngStream &rng, const Shape &shape, std::size_t extent) {
  const auto center = sample_target_center(rng, shape.height, shape.width);
  const Rect target = clip_square(center.row, center.col, extent, shape.height, shape.width);
  const PixelPos source = sample_source_topleft(rng, shape.height, shape.width, extent);
  return {target, source};
}

/// Copies the leading sub-rectangle of the source square into `draw.target`.
inline ImageBuf apply_copyout(const ImageBuf &target, const ImageBuf &source,
                              const CopyoutDraw &draw) {
  detail::require(target.shape() == source.shape(), "copyout: target and source shapes differ");
  const Rect &r = draw.target;
  detail::require(draw.source.row + r.rows() <= source.height() &&
                      draw.source.col + r.cols() <= source.width(),
                  "copyout: source region outside the source image");
  ImageBuf out = target;
  const std::size_t run = r.cols() * target.channels();
  for (std::size_t i = 0; i < r.rows(); ++i) {
    const auto from = source.values().subspan(source.offset(draw.source.row + i, draw.source.col), run);
    std::copy(from.begin(), from.end(), out.values().begin() + static_cast<std::ptrdiff_t>(out.offset(r.row_start + i, r.col_start)));
  }
  return out;
}

/// Copyout: paste a random extent-sized square of `source` at a random spot of `target`.
inline ImageBuf copyout(const ImageBuf &target, const ImageBuf &source, RngStream &rng,
                        std::size_t extent) {
  detail::require(target.shape() == source.shape(), "copyout: target and source shapes differ");
  return apply_copyout(target, source, draw_copyout(rng, target.shape(), extent));
}

inline ImageBuf apply_fill(const ImageBuf &target, const Rect &region, float fill) {
  ImageBuf out = target;
  for (std::size_t r = region.row_start; r < region.row_end; ++r) {
    auto row = out.values().subspan(out.offset(r, region.col_start), region.cols() * out.channels());
    std::fill(row.begin(), row.end(), fill);
  }
  return out;
}

/// Cutout: overwrite a random clipped square with a constant fill (mid-gray by default).
inline ImageBuf cutout(const ImageBuf &target, RngStream &rng, std::size_t extent,
                       float fill = 0.5f) {
  detail::require(fill >= 0.0f && fill <= 1.0f, "cutout: fill must lie in [0,1]");
  const auto center = sample_target_center(rng, target.height(), target.width());
  return apply_fill(target, clip_square(center.row, center.col, extent, target.height(), target.width()),
                    fill);
}

/// SamplePairing: per-pixel mean (a + b) / 2 in float.
inline ImageBuf sample_pairing(const ImageBuf &a, const ImageBuf &b) {
  detail::require(a.shape() == b.shape(), "sample_pairing: shapes differ");
  ImageBuf out = a;
  auto dst = out.values();
  const auto rhs = b.values();
  for (std::size_t i = 0; i < dst.size(); ++i)
    dst[i] = (dst[i] + rhs[i]) / 2.0f;
  return out;
}

} // namespace copyaug
