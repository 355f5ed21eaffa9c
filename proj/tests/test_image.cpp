// SPDX-License-Identifier: Apache-2.0

#include "copyaug/image.hpp"

#include <gtest/gtest.h>

#include <cstdint>
#include <vector>

using namespace copyaug;

TEST(FromBytes, DomainEndpoints) {
  const std::vector<std::uint8_t> raw{0, 255};
  const ImageBuf img = from_bytes(raw, 1, 2, 1);
  EXPECT_EQ(img(0, 0), 0.0f);
  EXPECT_EQ(img(0, 1), 1.0f);
}

TEST(FromBytes, MatchesIntegerOracleForAllBytes) {
  // Oracle: b / 255 as an exact rational n/255 compared through integer
  // cross-multiplication; the float must be the nearest float to it.
  for (unsigned b = 0; b < 256; ++b) {
    const std::uint8_t byte = static_cast<std::uint8_t>(b);
    const float v = from_bytes(std::span(&byte, 1), 1, 1, 1)(0, 0);
    const double err = static_cast<double>(v) * 255.0 - static_cast<double>(b);
    EXPECT_LE(std::abs(err), 255.0 * 0x1.0p-24) << "byte " << b;
    EXPECT_GE(v, 0.0f);
    EXPECT_LE(v, 1.0f);
  }
  const std::uint8_t mid = 128;
  EXPECT_NEAR(from_bytes(std::span(&mid, 1), 1, 1, 1)(0, 0), 0.50196, 1e-5);
}

TEST(FromBytes, LengthMismatchIsMalformed) {
  const std::vector<std::uint8_t> raw(11);
  EXPECT_THROW(from_bytes(raw, 2, 2, 3), MalformedInput);
}

TEST(FromBytes, InterleavedRowMajorLayout) {
  std::vector<std::uint8_t> raw(2 * 3 * 3);
  for (std::size_t i = 0; i < raw.size(); ++i)
    raw[i] = static_cast<std::uint8_t>(i);
  const ImageBuf img = from_bytes(raw, 2, 3, 3);
  // (row 1, col 2, ch 1) -> offset (1*3 + 2)*3 + 1 = 16
  EXPECT_EQ(to_byte(img(1, 2, 1)), 16);
}

TEST(ToBytes, RoundsHalfAwayFromZero) {
  const ImageBuf img(1, 3, 1, std::vector<float>{1.0f, 0.5f, 0.0f});
  EXPECT_EQ(to_bytes(img), (std::vector<std::uint8_t>{255, 128, 0}));
}

TEST(ToBytes, RoundTripIsIdentityForEveryByte) {
  std::vector<std::uint8_t> all(256);
  for (unsigned b = 0; b < 256; ++b)
    all[b] = static_cast<std::uint8_t>(b);
  EXPECT_EQ(to_bytes(from_bytes(all, 16, 16, 1)), all);
}

TEST(ImageBuf, RejectsBadShapesAndValues) {
  EXPECT_THROW(ImageBuf(0, 4, 3), ContractError);
  EXPECT_THROW(ImageBuf(4, 4, 2), ContractError);
  EXPECT_THROW(ImageBuf(1, 1, 1, std::vector<float>{1.5f}), MalformedInput);
  EXPECT_THROW(ImageBuf(1, 1, 1, std::vector<float>{-0.1f}), MalformedInput);
  EXPECT_THROW(ImageBuf(1, 2, 1, std::vector<float>{0.1f}), MalformedInput);
}

TEST(Rect, AreaAndContains) {
  const Rect r{8, 24, 8, 24};
  EXPECT_EQ(r.area(), 256u);
  EXPECT_TRUE(r.contains(8, 23));
  EXPECT_FALSE(r.contains(24, 8));
}
