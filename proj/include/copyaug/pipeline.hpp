// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "copyaug/basic_aug.hpp"
#include "copyaug/dataset_io.hpp"
#include "copyaug/error.hpp"
#include "copyaug/image.hpp"
#include "copyaug/patch_ops.hpp"
#include "copyaug/rng.hpp"
#include "copyaug/schedule.hpp"
#include "copyaug/source_buffer.hpp"

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

namespace copyaug {

enum class Method { Baseline, Cutout, Copyout, SamplePairing, CopyPairing };

constexpr std::string_view to_string(Method m) noexcept {
  switch (m) {
  case Method::Baseline:
    return "baseline";
  case Method::Cutout:
    return "cutout";
  case Method::Copyout:
    return "copyout";
  case Method::SamplePairing:
    return "samplepairing";
  case Method::CopyPairing:
    return "copypairing";
  }
  return "?";
}

inline std::optional<Method> parse_method(std::string_view name) {
  for (Method m : {Method::Baseline, Method::Cutout, Method::Copyout, Method::SamplePairing,
                   Method::CopyPairing})
    if (to_string(m) == name)
      return m;
  return std::nullopt;
}

constexpr bool is_pairing(Method m) noexcept {
  return m == Method::SamplePairing || m == Method::CopyPairing;
}

constexpr bool uses_extent(Method m) noexcept {
  return m == Method::Cutout || m == Method::Copyout || m == Method::CopyPairing;
}

struct PipelineConfig {
  Method method = Method::Baseline;
  PatchParams patch{};
  std::optional<PhasePlan> plan; ///< required by the pairing methods, ignored otherwise
  BasicAugConfig basic{};
  std::size_t buffer_capacity = 256;
  BufferMode buffer_mode = BufferMode::Buffered;
  std::uint64_t seed = 0;
  std::size_t batch_size = 128;
  /// Keep the basic-augmented target and the drawn source on every sample.
  bool trace = false;
};

inline void validate(const PipelineConfig &cfg, const Shape &shape) {
  validate(cfg.basic);
  if (uses_extent(cfg.method))
    validate(cfg.patch, shape);
  if (is_pairing(cfg.method)) {
    if (!cfg.plan)
      throw ContractError(std::string(to_string(cfg.method)) + " needs a phase plan");
    validate(*cfg.plan);
    const Mode expected = cfg.method == Method::CopyPairing ? Mode::Copyout : Mode::Plain;
    if (cfg.plan->base_mode != expected)
      throw ContractError(std::string(to_string(cfg.method)) + " needs base mode " +
                          std::string(to_string(expected)));
  }
  if (cfg.buffer_mode == BufferMode::Buffered && cfg.buffer_capacity < 1)
    throw ContractError("buffer capacity must be >= 1 in buffered mode");
  if (cfg.batch_size < 1)
    throw ContractError("batch size must be >= 1");
}

/// One-line summary of every setting that influences output.
inline std::string describe(const PipelineConfig &cfg) {
  std::string s = "method=" + std::string(to_string(cfg.method)) +
                  " extent=" + std::to_string(cfg.patch.extent) +
                  " fill=" + std::to_string(cfg.patch.fill) +
                  " rotation=" + std::to_string(cfg.basic.rotation_range) +
                  " zoom=" + std::to_string(cfg.basic.zoom_range) +
                  " hflip=" + (cfg.basic.horizontal_flip ? "1" : "0") +
                  " buffer=" + (cfg.buffer_mode == BufferMode::Buffered
                                    ? std::to_string(cfg.buffer_capacity)
                                    : std::string("none")) +
                  " seed=" + std::to_string(cfg.seed) +
                  " batch_size=" + std::to_string(cfg.batch_size);
  if (cfg.plan && is_pairing(cfg.method))
    s += " plan=[" + describe(*cfg.plan) + "]";
  return s;
}

/// Mode applied at `epoch`: fixed for single methods, scheduled for pairing ones.
inline Mode effective_mode(const PipelineConfig &cfg, std::size_t epoch) {
  switch (cfg.method) {
  case Method::Baseline:
    return Mode::Plain;
  case Method::Cutout:
    return Mode::Cutout;
  case Method::Copyout:
    return Mode::Copyout;
  case Method::SamplePairing:
  case Method::CopyPairing:
    if (!cfg.plan)
      throw ContractError(std::string(to_string(cfg.method)) + " needs a phase plan");
    return mode_for_epoch(*cfg.plan, epoch);
  }
  throw ContractError("unknown method");
}

struct AugmentedSample {
  std::size_t index = 0; ///< position in the dataset
  std::uint8_t label = 0;
  Mode mode = Mode::Plain;
  ImageBuf image;
  // Populated only with PipelineConfig::trace.
  std::optional<ImageBuf> basic;
  std::optional<ImageBuf> source;
  std::optional<CopyoutDraw> copy;
};

using Batch = std::vector<AugmentedSample>;

/// Result of the basic-augmentation stage. The stream continues into the patch stage.
struct BasicStage {
  ImageBuf image;
  RngStream rng;
};

inline BasicStage basic_stage(const PipelineConfig &cfg, const ImageBuf &img, std::size_t epoch,
                              std::size_t index) {
  RngStream rng(cfg.seed, epoch, index);
  ImageBuf t = basic_augment(img, rng, cfg.basic);
  return {std::move(t), rng};
}

/// Applies the epoch's mode to an already basic-augmented image. Only reads
/// the buffer, so any number of these may run between two pushes.
template <std::ranges::random_access_range Dataset, class Proj = std::identity>
AugmentedSample patch_stage(const PipelineConfig &cfg, const SourceBuffer &buffer,
                            const Dataset &training_set, BasicStage staged, Mode mode,
                            std::size_t index, Proj proj = {}) {
  AugmentedSample out;
  out.index = index;
  out.mode = mode;
  RngStream &rng = staged.rng;
  switch (mode) {
  case Mode::Plain:
    out.image = staged.image;
    break;
  case Mode::Cutout:
    out.image = cutout(staged.image, rng, cfg.patch.extent, cfg.patch.fill);
    break;
  case Mode::Copyout: {
    ImageBuf source = buffer.sample(rng, training_set, proj);
    const CopyoutDraw draw = draw_copyout(rng, staged.image.shape(), cfg.patch.extent);
    out.image = apply_copyout(staged.image, source, draw);
    if (cfg.trace) {
      out.source = std::move(source);
      out.copy = draw;
    }
    break;
  }
  case Mode::SamplePairing: {
    ImageBuf source = buffer.sample(rng, training_set, proj);
    out.image = sample_pairing(staged.image, source);
    if (cfg.trace)
      out.source = std::move(source);
    break;
  }
  }
  if (cfg.trace)
    out.basic = std::move(staged.image);
  return out;
}

/**
 * Augments one image: basic augmentation, push into the buffer, then the
 * epoch's mode with a source drawn from the buffer (or from `training_set`
 * in no-buffer mode). Randomness comes from the (seed, epoch, index) stream
 * only, so nothing is cached between calls.
 */
template <std::ranges::random_access_range Dataset, class Proj = std::identity>
AugmentedSample augment_one(const PipelineConfig &cfg, SourceBuffer &buffer,
                            const Dataset &training_set, const ImageBuf &img, std::size_t epoch,
                            std::size_t index, Proj proj = {}) {
  validate(cfg, img.shape());
  const Mode mode = effective_mode(cfg, epoch);
  BasicStage staged = basic_stage(cfg, img, epoch, index);
  buffer.push(staged.image);
  return patch_stage(cfg, buffer, training_set, std::move(staged), mode, index, proj);
}

namespace detail {

/// Runs fn(i) for i in [0, n) on up to `workers` threads; rethrows the first failure.
template <class Fn> void parallel_for(std::size_t n, std::size_t workers, Fn &&fn) {
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i)
      fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure)
              failure = std::current_exception();
            next.store(n);
          }
        }
      });
  }
  if (failure)
    std::rethrow_exception(failure);
}

} // namespace detail

/**
 * Epoch driver over a labeled dataset.
 *
 * Each batch runs in three steps: basic augmentation of every image in
 * parallel; a serial push of the results into the buffer in batch order; then
 * the patch stage in parallel against the now-frozen buffer. Output is thus
 * identical for any worker count. The buffer persists across epochs.
 *
 * `dataset` is not copied and must outlive the pipeline.
 */
class Pipeline {
public:
  Pipeline(PipelineConfig cfg, std::span<const LabeledImage> dataset, std::size_t workers = 1)
      : cfg_(std::move(cfg)), dataset_(dataset), workers_(std::max<std::size_t>(workers, 1)),
        buffer_(cfg_.buffer_mode == BufferMode::Buffered ? SourceBuffer(cfg_.buffer_capacity)
                                                         : SourceBuffer::no_buffer()) {
    detail::require(!dataset_.empty(), "pipeline: dataset is empty");
    shape_ = dataset_.front().image.shape();
    for (const auto &li : dataset_)
      detail::require(li.image.shape() == shape_, "pipeline: dataset images differ in shape");
    validate(cfg_, shape_);
  }

  const PipelineConfig &config() const noexcept { return cfg_; }
  const SourceBuffer &buffer() const noexcept { return buffer_; }
  std::size_t workers() const noexcept { return workers_; }

  std::size_t batch_count() const noexcept {
    return (dataset_.size() + cfg_.batch_size - 1) / cfg_.batch_size;
  }

  /// Seeded Fisher-Yates order of dataset indices for `epoch`.
  std::vector<std::size_t> permutation(std::size_t epoch) const {
    std::vector<std::size_t> order(dataset_.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    RngStream rng(cfg_.seed, epoch, RngStream::kEpochStream);
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[rng.below(i)]);
    return order;
  }

  /// Calls `on_batch(Batch&&)` for each mini-batch of `epoch`, in order.
  template <class Fn> void for_each_batch(std::size_t epoch, Fn &&on_batch) {
    const Mode mode = effective_mode(cfg_, epoch);
    const auto order = permutation(epoch);
    const auto project = [](const LabeledImage &li) -> const ImageBuf & { return li.image; };
    for (std::size_t begin = 0; begin < order.size(); begin += cfg_.batch_size) {
      const std::size_t end = std::min(begin + cfg_.batch_size, order.size());
      const std::span<const std::size_t> ids(order.data() + begin, end - begin);

      std::vector<std::optional<BasicStage>> staged(ids.size());
      detail::parallel_for(ids.size(), workers_, [&](std::size_t i) {
        staged[i] = basic_stage(cfg_, dataset_[ids[i]].image, epoch, ids[i]);
      });

      for (const auto &s : staged)
        buffer_.push(s->image);

      Batch batch(ids.size());
      detail::parallel_for(ids.size(), workers_, [&](std::size_t i) {
        batch[i] = patch_stage(cfg_, buffer_, dataset_, std::move(*staged[i]), mode, ids[i], project);
        batch[i].label = dataset_[ids[i]].label;
      });
      on_batch(std::move(batch));
    }
  }

  std::vector<Batch> augment_epoch(std::size_t epoch) {
    std::vector<Batch> batches;
    batches.reserve(batch_count());
    for_each_batch(epoch, [&](Batch &&b) { batches.push_back(std::move(b)); });
    return batches;
  }

private:
  PipelineConfig cfg_;
  std::span<const LabeledImage> dataset_;
  std::size_t workers_;
  SourceBuffer buffer_;
  Shape shape_{};
};

} // namespace copyaug
