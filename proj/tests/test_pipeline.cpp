// SPDX-License-Identifier: Apache-2.0

#include "copyaug/pipeline.hpp"
#include "cli.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace copyaug;

namespace {

const auto kImage = [](const LabeledImage &li) -> const ImageBuf & { return li.image; };

PipelineConfig config(Method m, std::uint64_t seed = 7) {
  PipelineConfig cfg;
  cfg.method = m;
  cfg.seed = seed;
  cfg.batch_size = 16;
  cfg.buffer_capacity = 32;
  if (m == Method::SamplePairing)
    cfg.plan = find_preset("sp-cifar");
  if (m == Method::CopyPairing)
    cfg.plan = find_preset("cp-1to1");
  return cfg;
}

std::vector<std::vector<std::uint8_t>> epoch_bytes(Pipeline &p, std::size_t epoch) {
  std::vector<std::vector<std::uint8_t>> out;
  for (const auto &batch : p.augment_epoch(epoch))
    for (const auto &s : batch)
      out.push_back(to_bytes(s.image));
  return out;
}

// Pixels differing between two images, as a bounding box plus a count.
struct Diff {
  std::size_t count = 0;
  Rect box{};
};

Diff diff(const ImageBuf &a, const ImageBuf &b, std::size_t ch) {
  Diff d;
  std::size_t r0 = a.height(), r1 = 0, c0 = a.width(), c1 = 0;
  for (std::size_t r = 0; r < a.height(); ++r)
    for (std::size_t c = 0; c < a.width(); ++c)
      if (a(r, c, ch) != b(r, c, ch)) {
        ++d.count;
        r0 = std::min(r0, r), r1 = std::max(r1, r + 1), c0 = std::min(c0, c), c1 = std::max(c1, c + 1);
      }
  if (d.count)
    d.box = {r0, r1, c0, c1};
  return d;
}

} // namespace

TEST(EffectiveMode, FollowsMethodOrSchedule) {
  EXPECT_EQ(effective_mode(config(Method::Baseline), 500), Mode::Plain);
  EXPECT_EQ(effective_mode(config(Method::Cutout), 5), Mode::Cutout);
  EXPECT_EQ(effective_mode(config(Method::Copyout), 5), Mode::Copyout);
  const auto cp = config(Method::CopyPairing);
  EXPECT_EQ(effective_mode(cp, 100), Mode::SamplePairing);
  EXPECT_EQ(effective_mode(cp, 101), Mode::Copyout);
  for (std::size_t e = 0; e < 1200; ++e)
    ASSERT_EQ(effective_mode(cp, e), mode_for_epoch(*cp.plan, e));
}

TEST(ValidateConfig, RejectsBadCombinations) {
  const Shape s{32, 32, 3};
  auto cfg = config(Method::Copyout);
  cfg.patch.extent = 32;
  EXPECT_THROW(validate(cfg, s), ContractError);
  cfg = config(Method::SamplePairing);
  cfg.plan.reset();
  EXPECT_THROW(validate(cfg, s), ContractError);
  cfg = config(Method::CopyPairing);
  cfg.plan = find_preset("sp-cifar"); // wrong base mode
  EXPECT_THROW(validate(cfg, s), ContractError);
  cfg = config(Method::Baseline);
  cfg.batch_size = 0;
  EXPECT_THROW(validate(cfg, s), ContractError);
  cfg = config(Method::Baseline);
  cfg.patch.extent = 99; // ignored by baseline
  EXPECT_NO_THROW(validate(cfg, s));
}

TEST(AugmentOne, BaselineIsBasicAugmentation) {
  const auto data = cli::synthetic_dataset(4, 1);
  const auto cfg = config(Method::Baseline);
  SourceBuffer buf(8);
  const auto out = augment_one(cfg, buf, data, data[2].image, 3, 2, kImage);
  RngStream rng(cfg.seed, 3, 2);
  EXPECT_EQ(out.image, basic_augment(data[2].image, rng, cfg.basic));
  EXPECT_EQ(out.mode, Mode::Plain);
  EXPECT_EQ(buf.filled(), 1u);
}

TEST(AugmentOne, FirstCallPairsWithItself) {
  const auto data = cli::synthetic_dataset(1, 2);
  auto cfg = config(Method::SamplePairing);
  SourceBuffer buf(8);
  const auto out = augment_one(cfg, buf, data, data[0].image, 100, 0, kImage);
  EXPECT_EQ(out.mode, Mode::SamplePairing);
  RngStream rng(cfg.seed, 100, 0);
  EXPECT_EQ(out.image, basic_augment(data[0].image, rng, cfg.basic)); // pair(x, x) == x
}

TEST(AugmentOne, CopyPairingAlternates) {
  const auto data = cli::synthetic_dataset(2, 3);
  auto cfg = config(Method::CopyPairing);
  SourceBuffer buf(8);
  EXPECT_EQ(augment_one(cfg, buf, data, data[0].image, 100, 0, kImage).mode, Mode::SamplePairing);
  EXPECT_EQ(augment_one(cfg, buf, data, data[1].image, 101, 1, kImage).mode, Mode::Copyout);
  EXPECT_THROW(augment_one(cfg, buf, data, data[1].image, 1200, 1, kImage), ContractError);
}

TEST(AugmentOne, FreshResultEveryEpoch) {
  const auto data = cli::synthetic_dataset(1, 4);
  const auto cfg = config(Method::Copyout);
  SourceBuffer buf(8);
  const auto a = augment_one(cfg, buf, data, data[0].image, 0, 0, kImage);
  const auto b = augment_one(cfg, buf, data, data[0].image, 1, 0, kImage);
  EXPECT_NE(a.image, b.image);
}

TEST(Pipeline, BatchSizesCoverTheDataset) {
  const auto data = cli::synthetic_dataset(10, 5);
  auto cfg = config(Method::Baseline);
  cfg.batch_size = 4;
  Pipeline p(cfg, data);
  const auto batches = p.augment_epoch(0);
  ASSERT_EQ(batches.size(), 3u);
  EXPECT_EQ(batches[0].size(), 4u);
  EXPECT_EQ(batches[1].size(), 4u);
  EXPECT_EQ(batches[2].size(), 2u);
  std::set<std::size_t> seen;
  for (const auto &b : batches)
    for (const auto &s : b) {
      seen.insert(s.index);
      EXPECT_EQ(s.label, data[s.index].label);
    }
  EXPECT_EQ(seen.size(), 10u);
}

TEST(Pipeline, PermutationIsSeededPerEpoch) {
  const auto data = cli::synthetic_dataset(128, 6);
  Pipeline a(config(Method::Baseline), data), b(config(Method::Baseline), data);
  EXPECT_EQ(a.permutation(0), b.permutation(0));
  EXPECT_NE(a.permutation(0), a.permutation(1));
  Pipeline c(config(Method::Baseline, 8), data);
  EXPECT_NE(a.permutation(0), c.permutation(0));
  auto sorted = a.permutation(3);
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i)
    ASSERT_EQ(sorted[i], i);
}

TEST(Pipeline, WorkerCountDoesNotChangeOutput) {
  const auto data = cli::synthetic_dataset(70, 9);
  for (Method m : {Method::Copyout, Method::CopyPairing, Method::Cutout}) {
    Pipeline serial(config(m), data, 1), parallel(config(m), data, 4);
    for (std::size_t e : {99u, 100u, 101u}) {
      ASSERT_EQ(epoch_bytes(serial, e), epoch_bytes(parallel, e)) << to_string(m) << " epoch " << e;
    }
  }
}

TEST(Pipeline, CopyoutChangesAtMostARectangleOfExtentSquared) {
  const auto data = cli::synthetic_dataset(64, 10);
  auto cfg = config(Method::Copyout);
  cfg.trace = true;
  Pipeline p(cfg, data, 2);
  for (std::size_t epoch = 0; epoch < 3; ++epoch)
    for (const auto &batch : p.augment_epoch(epoch))
      for (const auto &s : batch) {
        ASSERT_TRUE(s.basic && s.copy);
        for (std::size_t ch = 0; ch < 3; ++ch) {
          const Diff d = diff(*s.basic, s.image, ch);
          ASSERT_LE(d.count, 16u * 16u);
          if (d.count) {
            const Rect &r = s.copy->target;
            ASSERT_TRUE(d.box.row_start >= r.row_start && d.box.row_end <= r.row_end &&
                        d.box.col_start >= r.col_start && d.box.col_end <= r.col_end);
          }
        }
      }
}

TEST(Pipeline, OutputsStayInRangeWithDatasetShape) {
  const auto data = cli::synthetic_dataset(20, 11);
  for (Method m : {Method::Baseline, Method::Cutout, Method::Copyout, Method::SamplePairing,
                   Method::CopyPairing}) {
    Pipeline p(config(m), data, 3);
    for (const auto &batch : p.augment_epoch(100))
      for (const auto &s : batch) {
        ASSERT_EQ(s.image.shape(), data[0].image.shape());
        for (float v : s.image.values())
          ASSERT_TRUE(v >= 0.0f && v <= 1.0f);
      }
  }
}

TEST(Pipeline, BufferPersistsAcrossEpochs) {
  const auto data = cli::synthetic_dataset(10, 12);
  auto cfg = config(Method::Copyout);
  cfg.buffer_capacity = 64;
  Pipeline p(cfg, data);
  p.augment_epoch(0);
  EXPECT_EQ(p.buffer().filled(), 10u);
  p.augment_epoch(1);
  EXPECT_EQ(p.buffer().filled(), 20u);
}

TEST(Pipeline, NoBufferSourcesAreRawImages) {
  const auto data = cli::synthetic_dataset(16, 13);
  auto cfg = config(Method::Copyout);
  cfg.buffer_mode = BufferMode::NoBuffer;
  cfg.trace = true;
  Pipeline p(cfg, data, 2);
  for (const auto &batch : p.augment_epoch(0))
    for (const auto &s : batch) {
      ASSERT_TRUE(s.source);
      const bool raw = std::any_of(data.begin(), data.end(),
                                   [&](const LabeledImage &li) { return li.image == *s.source; });
      ASSERT_TRUE(raw);
    }
  EXPECT_EQ(p.buffer().filled(), 0u);
}

TEST(Pipeline, RejectsEmptyOrMixedDatasets) {
  std::vector<LabeledImage> empty;
  EXPECT_THROW(Pipeline(config(Method::Baseline), empty), ContractError);
  auto data = cli::synthetic_dataset(2, 14);
  data.push_back({0, ImageBuf(16, 16, 3)});
  EXPECT_THROW(Pipeline(config(Method::Baseline), data), ContractError);
}

TEST(ParallelFor, PropagatesExceptions) {
  EXPECT_THROW(detail::parallel_for(100, 4,
                                    [](std::size_t i) {
                                      if (i == 37)
                                        throw ContractError("boom");
                                    }),
               ContractError);
}
