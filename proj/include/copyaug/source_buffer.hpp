// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "copyaug/error.hpp"
#include "copyaug/image.hpp"
#include "copyaug/rng.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <ranges>
#include <string_view>
#include <vector>

namespace copyaug {

enum class BufferMode {
  Buffered, ///< sources come from recently basic-augmented images
  NoBuffer, ///< sources come straight from the raw training set
};

constexpr std::string_view to_string(BufferMode m) noexcept {
  return m == BufferMode::Buffered ? "buffered" : "nobuffer";
}

/**
 * FIFO ring of basic-augmented images that Copyout and SamplePairing draw
 * their source image from.
 *
 * Not internally synchronized: push() and sample() must not overlap. The
 * pipeline guarantees this by pushing only at batch barriers. sample()
 * returns a copy, so later evictions never affect an image already handed
 * out.
 */
class SourceBuffer {
public:
  explicit SourceBuffer(std::size_t capacity, BufferMode mode = BufferMode::Buffered,
                        std::optional<Shape> shape = std::nullopt)
      : capacity_(capacity), mode_(mode), shape_(shape) {
    detail::require(mode == BufferMode::NoBuffer || capacity >= 1,
                    "SourceBuffer: capacity must be >= 1 in buffered mode");
    slots_.reserve(capacity);
  }

  /// NoBuffer ablation: no storage, every sample comes from the training set.
  static SourceBuffer no_buffer() { return SourceBuffer(0, BufferMode::NoBuffer); }

  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t filled() const noexcept { return slots_.size(); }
  BufferMode mode() const noexcept { return mode_; }
  const std::optional<Shape> &shape() const noexcept { return shape_; }

  /// Stored images, oldest first.
  std::vector<ImageBuf> contents() const {
    std::vector<ImageBuf> out;
    out.reserve(slots_.size());
    for (std::size_t i = 0; i < slots_.size(); ++i)
      out.push_back(slots_[(head_ + i) % slots_.size()]);
    return out;
  }

  /// Stores `img`, evicting the oldest entry once full. A no-op without a buffer.
  void push(ImageBuf img) {
    if (mode_ == BufferMode::NoBuffer)
      return;
    if (!shape_)
      shape_ = img.shape();
    detail::require(img.shape() == *shape_, "SourceBuffer::push: image shape " +
                                                to_string(img.shape()) + " does not match " +
                                                to_string(*shape_));
    if (slots_.size() < capacity_) {
      slots_.push_back(std::move(img));
      return;
    }
    slots_[head_] = std::move(img);
    head_ = (head_ + 1) % capacity_;
  }

  /// Buffered: uniform over stored slots. NoBuffer: uniform over `training_set`
  /// (projected through `proj`), returned unaugmented.
  template <std::ranges::random_access_range Range, class Proj = std::identity>
  ImageBuf sample(RngStream &rng, const Range &training_set, Proj proj = {}) const {
    if (mode_ == BufferMode::Buffered)
      return sample(rng);
    const auto n = static_cast<std::size_t>(std::ranges::size(training_set));
    detail::require(n >= 1, "SourceBuffer::sample: training set is empty");
    const auto pick = rng.below(n);
    return std::invoke(proj, std::ranges::begin(training_set)[static_cast<std::ptrdiff_t>(pick)]);
  }

  /// Buffered-mode draw; throws in NoBuffer mode, which needs the training set.
  ImageBuf sample(RngStream &rng) const {
    detail::require(mode_ == BufferMode::Buffered,
                    "SourceBuffer::sample: no-buffer mode needs the training set");
    detail::require(!slots_.empty(), "SourceBuffer::sample: buffer is empty");
    return slots_[rng.below(slots_.size())];
  }

private:
  std::size_t capacity_;
  BufferMode mode_;
  std::optional<Shape> shape_;
  std::vector<ImageBuf> slots_;
  std::size_t head_ = 0; // oldest slot once the ring is full
};

} // namespace copyaug
