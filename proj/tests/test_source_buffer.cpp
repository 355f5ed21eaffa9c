// SPDX-License-Identifier: Apache-2.0

#include "copyaug/source_buffer.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace copyaug;

namespace {

ImageBuf tagged(std::size_t tag) {
  ImageBuf img(2, 2, 1, 0.0f);
  img(0, 0) = static_cast<float>(tag) / 1000.0f;
  return img;
}

std::size_t tag_of(const ImageBuf &img) {
  return static_cast<std::size_t>(std::lround(img(0, 0) * 1000.0f));
}

const std::vector<ImageBuf> kNoTrainingSet;

} // namespace

TEST(SourceBuffer, PushIncrementsFilled) {
  SourceBuffer buf(4);
  buf.push(tagged(1));
  EXPECT_EQ(buf.filled(), 1u);
}

TEST(SourceBuffer, RingEvictsOldestFirst) {
  SourceBuffer buf(4);
  for (std::size_t i = 1; i <= 5; ++i)
    buf.push(tagged(i));
  EXPECT_EQ(buf.filled(), 4u);
  std::vector<std::size_t> tags;
  for (const auto &img : buf.contents())
    tags.push_back(tag_of(img));
  EXPECT_EQ(tags, (std::vector<std::size_t>{2, 3, 4, 5}));
  for (std::size_t i = 6; i <= 11; ++i)
    buf.push(tagged(i));
  tags.clear();
  for (const auto &img : buf.contents())
    tags.push_back(tag_of(img));
  EXPECT_EQ(tags, (std::vector<std::size_t>{8, 9, 10, 11}));
}

TEST(SourceBuffer, SingleEntryAlwaysSampled) {
  SourceBuffer buf(4);
  buf.push(tagged(7));
  RngStream rng(1, 0, 0);
  for (int i = 0; i < 20; ++i)
    EXPECT_EQ(tag_of(buf.sample(rng, kNoTrainingSet)), 7u);
}

TEST(SourceBuffer, SamplesOnlyPushedImages) {
  SourceBuffer buf(8);
  RngStream rng(2, 0, 0);
  for (std::size_t i = 1; i <= 30; ++i) {
    buf.push(tagged(i));
    const std::size_t t = tag_of(buf.sample(rng));
    ASSERT_LE(t, i);
    ASSERT_GT(t + 8, i); // still resident
  }
}

TEST(SourceBuffer, UniformOverSlotsWithin5Sigma) {
  const std::size_t capacity = 128;
  SourceBuffer buf(capacity);
  for (std::size_t i = 0; i < capacity; ++i)
    buf.push(tagged(i));
  const int n = 100000;
  const double p = 1.0 / capacity;
  const double sigma = std::sqrt(n * p * (1 - p));
  std::vector<int> hist(capacity);
  RngStream rng(3, 0, 0);
  for (int i = 0; i < n; ++i)
    ++hist[tag_of(buf.sample(rng))];
  for (std::size_t k = 0; k < capacity; ++k)
    EXPECT_LT(std::abs(hist[k] - n * p), 5 * sigma) << "slot " << k;
}

TEST(SourceBuffer, SampleIsACopy) {
  SourceBuffer buf(1);
  buf.push(tagged(1));
  RngStream rng(4, 0, 0);
  const ImageBuf got = buf.sample(rng);
  buf.push(tagged(2));
  EXPECT_EQ(tag_of(got), 1u);
}

TEST(SourceBuffer, DeterministicForSameSeedAndPushes) {
  auto run = [] {
    SourceBuffer buf(16);
    RngStream rng(5, 1, 2);
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < 40; ++i) {
      buf.push(tagged(i));
      out.push_back(tag_of(buf.sample(rng)));
    }
    return out;
  };
  EXPECT_EQ(run(), run());
}

TEST(SourceBuffer, EmptyOrWrongShapeIsAContractError) {
  SourceBuffer buf(4);
  RngStream rng(1, 0, 0);
  EXPECT_THROW(buf.sample(rng), ContractError);
  buf.push(tagged(1));
  EXPECT_THROW(buf.push(ImageBuf(3, 3, 1)), ContractError);
  EXPECT_THROW(SourceBuffer(0), ContractError);
}

TEST(SourceBuffer, ConfiguredShapeIsEnforced) {
  SourceBuffer buf(4, BufferMode::Buffered, Shape{2, 2, 3});
  EXPECT_THROW(buf.push(tagged(1)), ContractError);
}

TEST(NoBuffer, DrawsRawTrainingImagesReproducibly) {
  const std::vector<ImageBuf> set{tagged(10), tagged(20), tagged(30)};
  SourceBuffer buf = SourceBuffer::no_buffer();
  buf.push(tagged(99)); // ignored
  EXPECT_EQ(buf.filled(), 0u);
  auto draw = [&] {
    RngStream rng(6, 0, 0);
    std::vector<std::size_t> tags;
    for (int i = 0; i < 50; ++i)
      tags.push_back(tag_of(buf.sample(rng, set)));
    return tags;
  };
  const auto first = draw();
  EXPECT_EQ(first, draw());
  for (std::size_t t : first)
    EXPECT_TRUE(t == 10 || t == 20 || t == 30);
  RngStream rng(1, 0, 0);
  EXPECT_THROW(buf.sample(rng, kNoTrainingSet), ContractError);
  EXPECT_THROW(buf.sample(rng), ContractError);
}

TEST(NoBuffer, ProjectionSelectsImageMember) {
  struct Item {
    int label;
    ImageBuf image;
  };
  const std::vector<Item> set{{0, tagged(5)}};
  const SourceBuffer buf = SourceBuffer::no_buffer();
  RngStream rng(1, 0, 0);
  EXPECT_EQ(tag_of(buf.sample(rng, set, &Item::image)), 5u);
}
