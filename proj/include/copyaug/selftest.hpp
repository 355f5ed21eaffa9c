// SPDX-License-Identifier: Apache-2.0

#pragma once

// Brute-force reference checks shipped with the library. The oracles here
// deliberately avoid the production code paths they check: geometry is
// checked pixel by pixel, schedule counts by walking the epochs with their
// own phase arithmetic.

#include "copyaug/dataset_io.hpp"
#include "copyaug/image.hpp"
#include "copyaug/patch_ops.hpp"
#include "copyaug/rng.hpp"
#include "copyaug/schedule.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace copyaug::oracle {

/// Membership test for the unclipped square anchored at center - floor(extent/2).
inline bool in_square(long long row, long long col, long long center_row, long long center_col,
                      long long extent) {
  const long long top = center_row - extent / 2;
  const long long left = center_col - extent / 2;
  return row >= top && row < top + extent && col >= left && col < left + extent;
}

/// Pixel count of the clipped square, counted one pixel at a time.
inline std::size_t square_area(std::size_t center_row, std::size_t center_col, std::size_t extent,
                               std::size_t height, std::size_t width) {
  std::size_t n = 0;
  for (std::size_t r = 0; r < height; ++r)
    for (std::size_t c = 0; c < width; ++c)
      n += in_square(static_cast<long long>(r), static_cast<long long>(c),
                     static_cast<long long>(center_row), static_cast<long long>(center_col),
                     static_cast<long long>(extent));
  return n;
}

using ClipFn = std::function<Rect(std::size_t, std::size_t, std::size_t, std::size_t, std::size_t)>;

/// Compares `clip` with pixel membership for every center on every image
/// from 1x1 to max_side x max_side and every extent 1..max_extent. Returns
/// the number of mismatching (image, center, extent) cases.
inline std::size_t geometry_mismatches(const ClipFn &clip, std::size_t max_side = 8,
                                       std::size_t max_extent = 8) {
  std::size_t bad = 0;
  for (std::size_t h = 1; h <= max_side; ++h)
    for (std::size_t w = 1; w <= max_side; ++w)
      for (std::size_t e = 1; e <= max_extent; ++e)
        for (std::size_t cr = 0; cr < h; ++cr)
          for (std::size_t cc = 0; cc < w; ++cc) {
            const Rect rect = clip(cr, cc, e, h, w);
            bool same = rect.row_end <= h && rect.col_end <= w && rect.area() > 0;
            for (std::size_t r = 0; same && r < h; ++r)
              for (std::size_t c = 0; same && c < w; ++c)
                same = rect.contains(r, c) ==
                       in_square(static_cast<long long>(r), static_cast<long long>(c),
                                 static_cast<long long>(cr), static_cast<long long>(cc),
                                 static_cast<long long>(e));
            bad += !same;
          }
  return bad;
}

struct ModeCounts {
  std::size_t pairing = 0;
  std::size_t base = 0;
  std::size_t base_after_phase2 = 0;
};

/// Walks the epochs with an explicit on/off counter instead of modular arithmetic.
inline ModeCounts walk_schedule(const PhasePlan &plan) {
  ModeCounts counts;
  std::size_t epoch = 0;
  counts.base += plan.phase1_epochs;
  epoch += plan.phase1_epochs;
  bool on = true;
  std::size_t left_in_run = plan.on_epochs;
  for (std::size_t i = 0; i < plan.phase2_epochs; ++i, ++epoch) {
    while (left_in_run == 0) {
      on = !on;
      left_in_run = on ? plan.on_epochs : plan.off_epochs;
    }
    ++(on ? counts.pairing : counts.base);
    --left_in_run;
  }
  counts.base += plan.phase3_epochs;
  counts.base_after_phase2 = plan.phase3_epochs;
  return counts;
}

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SelftestOptions {
  /// Negative control: run the geometry check against a deliberately broken clip.
  bool corrupt_geometry = false;
};

inline std::vector<CheckResult> run_selftest(const SelftestOptions &opts = {}) {
  std::vector<CheckResult> results;

  {
    ClipFn clip = [](std::size_t r, std::size_t c, std::size_t e, std::size_t h, std::size_t w) {
      return clip_square(r, c, e, h, w);
    };
    if (opts.corrupt_geometry)
      clip = [](std::size_t r, std::size_t c, std::size_t e, std::size_t h, std::size_t w) {
        Rect rect = clip_square(r, c, e, h, w);
        rect.row_end = std::min(rect.row_end + 1, h);
        return rect;
      };
    const std::size_t bad = geometry_mismatches(clip);
    results.push_back({"geometry-exhaustive", bad == 0,
                       std::to_string(bad) + " mismatching cases over 1x1..8x8, extents 1..8"});
  }

  {
    struct Expect {
      std::string_view preset;
      std::size_t pairing;
      std::size_t base;
    };
    bool ok = true;
    std::string detail;
    for (const Expect &x : {Expect{"sp-cifar", 720, 480}, Expect{"cp-1to1", 450, 750},
                            Expect{"cp-3to1", 675, 525}, Expect{"cp-1to1-noFT", 550, 650}}) {
      const PhasePlan plan = *find_preset(x.preset);
      const ScheduleTable table = dump_table(plan);
      const ModeCounts walked = walk_schedule(plan);
      const bool this_ok = table.pairing_epochs == x.pairing && table.base_epochs == x.base &&
                           walked.pairing == x.pairing && walked.base == x.base &&
                           pairing_epoch_count(plan) == x.pairing;
      ok = ok && this_ok;
      detail += std::string(x.preset) + "=" + std::to_string(table.pairing_epochs) + "/" +
                std::to_string(table.base_epochs) + (this_ok ? " " : "(!) ");
    }
    results.push_back({"schedule-counts", ok, detail});
  }

  {
    std::size_t bad = 0;
    for (unsigned b = 0; b < 256; ++b) {
      const std::uint8_t byte = static_cast<std::uint8_t>(b);
      const ImageBuf img = from_bytes(std::span(&byte, 1), 1, 1, 1);
      const double expected = static_cast<double>(b) / 255.0;
      bad += to_bytes(img).front() != byte || std::abs(img(0, 0) - expected) > 1e-6;
    }
    results.push_back({"byte-round-trip", bad == 0, std::to_string(bad) + " of 256 bytes differ"});
  }

  {
    RngStream rng(0x5eed, 0, 0);
    std::vector<std::uint8_t> raw(5 * 7 * 3);
    for (auto &b : raw)
      b = static_cast<std::uint8_t>(rng.below(256));
    const ImageBuf img = from_bytes(raw, 5, 7, 3);
    const auto encoded = encode_ppm(img);
    const std::string header(encoded.begin(), encoded.begin() + 11);
    const bool ok = header == "P6\n7 5\n255\n" && to_bytes(decode_ppm(encoded)) == raw;
    results.push_back({"ppm-round-trip", ok, ok ? "P6 header and payload exact" : "mismatch"});
  }

  {
    RngStream rng(0x5eed, 1, 0);
    std::vector<float> va(4 * 4 * 3), vb(4 * 4 * 3);
    for (auto &v : va)
      v = static_cast<float>(rng.unit());
    for (auto &v : vb)
      v = static_cast<float>(rng.unit());
    const ImageBuf a(4, 4, 3, va), b(4, 4, 3, vb);
    const ImageBuf ab = sample_pairing(a, b);
    bool ok = sample_pairing(a, a) == a && ab == sample_pairing(b, a);
    for (std::size_t i = 0; i < va.size(); ++i)
      ok = ok && ab.values()[i] == (va[i] + vb[i]) / 2.0f;
    results.push_back({"pairing-algebra", ok, ok ? "idempotent, commutative, elementwise" : "mismatch"});
  }

  return results;
}

} // namespace copyaug::oracle
