// Copyright 2026 The LDP-FL Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "ldpfl/mnist.h"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "ldpfl/error.h"

namespace ldpfl {
namespace {

IdxImages Tiny(std::size_t count) {
  IdxImages img;
  img.count = count;
  img.rows = 2;
  img.cols = 3;
  img.pixels.resize(count * 6);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    img.pixels[i] = static_cast<std::uint8_t>((i * 37) % 256);
  }
  return img;
}

std::string WriteTemp(const std::string& name,
                      const std::vector<std::uint8_t>& bytes) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  return path.string();
}

TEST(Idx, ImagesRoundTrip) {
  const auto img = Tiny(4);
  const auto bytes = EncodeIdxImages(img);
  EXPECT_EQ(bytes.size(), 16u + 24u);
  EXPECT_EQ(bytes[2], 0x08);
  EXPECT_EQ(bytes[3], 0x03);
  const auto back = ParseIdxImages(bytes);
  EXPECT_EQ(back.count, 4u);
  EXPECT_EQ(back.rows, 2u);
  EXPECT_EQ(back.cols, 3u);
  EXPECT_EQ(back.pixels, img.pixels);
}

TEST(Idx, LabelsRoundTrip) {
  const std::vector<std::uint8_t> labels = {0, 9, 3, 3, 7};
  EXPECT_EQ(ParseIdxLabels(EncodeIdxLabels(labels)), labels);
}

TEST(Idx, BadMagicIsFormatError) {
  auto bytes = EncodeIdxLabels(std::vector<std::uint8_t>{1, 2});
  bytes[3] = 0x03;
  try {
    ParseIdxLabels(bytes);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFormat);
  }
  EXPECT_THROW(ParseIdxImages(EncodeIdxLabels(std::vector<std::uint8_t>{1})),
               Error);
}

TEST(Idx, TruncationReportsOffset) {
  auto bytes = EncodeIdxImages(Tiny(3));
  bytes.resize(bytes.size() - 5);
  try {
    ParseIdxImages(bytes);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFormat);
    const std::string msg = e.what();
    EXPECT_NE(msg.find("byte offset"), std::string::npos) << msg;
    EXPECT_NE(msg.find(std::to_string(bytes.size())), std::string::npos) << msg;
  }
  const std::vector<std::uint8_t> header_only = {0, 0, 8};
  EXPECT_THROW(ParseIdxLabels(header_only), Error);
}

TEST(StratifiedSubset, BalancedPerClass) {
  std::vector<int> labels;
  for (int i = 0; i < 6000; ++i) labels.push_back((i * 7 + i / 13) % 10);
  const auto idx = StratifiedSubset(labels, 10, 1000, 5);
  EXPECT_EQ(idx.size(), 1000u);
  EXPECT_TRUE(std::is_sorted(idx.begin(), idx.end()));
  EXPECT_EQ(std::adjacent_find(idx.begin(), idx.end()), idx.end());
  std::vector<int> per(10, 0);
  for (auto i : idx) ++per[labels[i]];
  for (int c : per) EXPECT_NEAR(c, 100, 1);
  EXPECT_EQ(StratifiedSubset(labels, 10, 1000, 5), idx);
  EXPECT_NE(StratifiedSubset(labels, 10, 1000, 6), idx);
}

TEST(LoadMnist, ScalesPixelsAndChecksCounts) {
  const auto img = Tiny(5);
  const std::vector<std::uint8_t> labels = {0, 1, 2, 3, 4};
  const auto ip = WriteTemp("ldpfl-mnist-img", EncodeIdxImages(img));
  const auto lp = WriteTemp("ldpfl-mnist-lbl", EncodeIdxLabels(labels));
  const Dataset d = LoadMnist(ip, lp);
  EXPECT_EQ(d.size(), 5u);
  EXPECT_EQ(d.dim, 6u);
  EXPECT_EQ(d.classes, 10u);
  EXPECT_DOUBLE_EQ(d.features[1], img.pixels[1] / 255.0);
  const auto short_lp =
      WriteTemp("ldpfl-mnist-lbl-short",
                EncodeIdxLabels(std::vector<std::uint8_t>{0, 1}));
  EXPECT_THROW(LoadMnist(ip, short_lp), Error);
  try {
    LoadMnist(ip + "-missing", lp);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
}

}  // namespace
}  // namespace ldpfl
