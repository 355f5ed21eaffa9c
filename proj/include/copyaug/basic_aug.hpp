// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "copyaug/error.hpp"
#include "copyaug/image.hpp"
#include "copyaug/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace copyaug {

/// Rotation / zoom / flip ranges. Defaults are the CIFAR-10 reference setup.
struct BasicAugConfig {
  double rotation_range = 15.0; ///< degrees, angle drawn from [-range, +range]
  double zoom_range = 0.2;      ///< each axis factor drawn from [1 - range, 1 + range]
  bool horizontal_flip = true;

  /// A configuration that leaves every image untouched.
  static constexpr BasicAugConfig identity() { return {0.0, 0.0, false}; }
};

inline void validate(const BasicAugConfig &cfg) {
  if (!(cfg.rotation_range >= 0.0))
    throw ContractError("rotation_range must be >= 0");
  if (!(cfg.zoom_range >= 0.0 && cfg.zoom_range < 1.0))
    throw ContractError("zoom_range must lie in [0, 1)");
}

inline ImageBuf hflip(const ImageBuf &img) {
  ImageBuf out = img;
  const std::size_t w = img.width();
  for (std::size_t r = 0; r < img.height(); ++r)
    for (std::size_t c = 0; c < w; ++c)
      for (std::size_t ch = 0; ch < img.channels(); ++ch)
        out(r, c, ch) = img(r, w - 1 - c, ch);
  return out;
}

namespace detail {

// Sample coordinates this close to a pixel center are treated as exact, so
// rotations by multiples of 90 degrees do not pick up cos/sin rounding noise.
inline double snap(double x) {
  const double nearest = std::round(x);
  return std::abs(x - nearest) < 1e-9 ? nearest : x;
}

} // namespace detail

/**
 * Rotation plus per-axis zoom about the image center, in one resampling pass.
 *
 * Output pixel (r, c) reads the input at
 *
 *     [r']   [cr]   [cos -sin] [zoom_row    0    ] [r - cr]
 *     [c'] = [cc] + [sin  cos] [   0     zoom_col] [c - cc]
 *
 * with (cr, cc) = ((H-1)/2, (W-1)/2), i.e. the matrix maps output to input
 * coordinates, so a zoom factor above 1 shows more of the scene (zooms out).
 * Samples are bilinear; coordinates beyond the border are clamped to the
 * nearest edge pixel.
 */
inline ImageBuf affine_warp(const ImageBuf &img, double angle_deg, double zoom_row,
                            double zoom_col) {
  detail::require(zoom_row > 0.0 && zoom_col > 0.0, "affine_warp: zoom factors must be > 0");
  const std::size_t h = img.height();
  const std::size_t w = img.width();
  const std::size_t channels = img.channels();
  const double theta = angle_deg * std::numbers::pi / 180.0;
  const double cos_t = std::cos(theta);
  const double sin_t = std::sin(theta);
  const double cr = (static_cast<double>(h) - 1.0) / 2.0;
  const double cc = (static_cast<double>(w) - 1.0) / 2.0;
  const double max_r = static_cast<double>(h - 1);
  const double max_c = static_cast<double>(w - 1);

  ImageBuf out(h, w, channels);
  for (std::size_t r = 0; r < h; ++r) {
    const double dr = (static_cast<double>(r) - cr) * zoom_row;
    for (std::size_t c = 0; c < w; ++c) {
      const double dc = (static_cast<double>(c) - cc) * zoom_col;
      const double sr = std::clamp(detail::snap(cr + cos_t * dr - sin_t * dc), 0.0, max_r);
      const double sc = std::clamp(detail::snap(cc + sin_t * dr + cos_t * dc), 0.0, max_c);
      const auto r0 = static_cast<std::size_t>(std::floor(sr));
      const auto c0 = static_cast<std::size_t>(std::floor(sc));
      const std::size_t r1 = std::min(r0 + 1, h - 1);
      const std::size_t c1 = std::min(c0 + 1, w - 1);
      const double fr = sr - static_cast<double>(r0);
      const double fc = sc - static_cast<double>(c0);
      for (std::size_t ch = 0; ch < channels; ++ch) {
        const double top = (1.0 - fc) * img(r0, c0, ch) + fc * img(r0, c1, ch);
        const double bottom = (1.0 - fc) * img(r1, c0, ch) + fc * img(r1, c1, ch);
        const double v = (1.0 - fr) * top + fr * bottom;
        out(r, c, ch) = std::clamp(static_cast<float>(v), 0.0f, 1.0f);
      }
    }
  }
  return out;
}

/// The random parameters of one basic augmentation.
struct BasicAugDraw {
  double angle = 0.0;
  double zoom_row = 1.0;
  double zoom_col = 1.0;
  bool flip = false;
};

/// Draws in the fixed order angle, zoom_row, zoom_col, flip. The flip draw
/// is consumed even when flipping is disabled so the stream position is
/// independent of the configuration.
inline BasicAugDraw draw_basic_aug(RngStream &rng, const BasicAugConfig &cfg) {
  BasicAugDraw d;
  d.angle = rng.uniform(-cfg.rotation_range, cfg.rotation_range);
  d.zoom_row = rng.uniform(1.0 - cfg.zoom_range, 1.0 + cfg.zoom_range);
  d.zoom_col = rng.uniform(1.0 - cfg.zoom_range, 1.0 + cfg.zoom_range);
  const bool coin = rng.bernoulli(0.5);
  d.flip = cfg.horizontal_flip && coin;
  return d;
}

inline ImageBuf apply_basic_aug(const ImageBuf &img, const BasicAugDraw &d) {
  ImageBuf out = (d.angle == 0.0 && d.zoom_row == 1.0 && d.zoom_col == 1.0)
                     ? img
                     : affine_warp(img, d.angle, d.zoom_row, d.zoom_col);
  return d.flip ? hflip(out) : out;
}

inline ImageBuf basic_augment(const ImageBuf &img, RngStream &rng, const BasicAugConfig &cfg) {
  validate(cfg);
  return apply_basic_aug(img, draw_basic_aug(rng, cfg));
}

} // namespace copyaug
