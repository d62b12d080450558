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
#include <fstream>
#include <iterator>

#include "ldpfl/error.h"
#include "ldpfl/random.h"

namespace ldpfl {
namespace {

constexpr std::size_t kMnistClasses = 10;

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint32_t U32(const char* what) {
    Need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | bytes_[pos_ + i];
    pos_ += 4;
    return v;
  }

  std::span<const std::uint8_t> Take(std::size_t n, const char* what) {
    Need(n, what);
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

 private:
  void Need(std::size_t n, const char* what) {
    if (bytes_.size() - pos_ < n) {
      throw Error(ErrorCode::kFormat,
                  std::string("truncated IDX file: ") + what + " needs " +
                      std::to_string(n) + " bytes at byte offset " +
                      std::to_string(pos_) + ", file ends at byte offset " +
                      std::to_string(bytes_.size()));
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

void CheckMagic(std::uint32_t got, std::uint32_t want) {
  if (got != want) {
    char buf[96];
    std::snprintf(buf, sizeof buf,
                  "bad IDX magic number 0x%08x (expected 0x%08x)", got, want);
    throw Error(ErrorCode::kFormat, buf);
  }
}

void PutU32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) {
    out.push_back(static_cast<std::uint8_t>(v >> shift));
  }
}

}  // namespace

IdxImages ParseIdxImages(std::span<const std::uint8_t> bytes) {
  Reader in(bytes);
  CheckMagic(in.U32("magic number"), kIdxImageMagic);
  IdxImages img;
  img.count = in.U32("image count");
  img.rows = in.U32("row count");
  img.cols = in.U32("column count");
  const auto px = in.Take(img.count * img.rows * img.cols, "pixel data");
  img.pixels.assign(px.begin(), px.end());
  return img;
}

std::vector<std::uint8_t> ParseIdxLabels(std::span<const std::uint8_t> bytes) {
  Reader in(bytes);
  CheckMagic(in.U32("magic number"), kIdxLabelMagic);
  const std::size_t count = in.U32("label count");
  const auto data = in.Take(count, "label data");
  return {data.begin(), data.end()};
}

std::vector<std::uint8_t> EncodeIdxImages(const IdxImages& images) {
  std::vector<std::uint8_t> out;
  out.reserve(16 + images.pixels.size());
  PutU32(out, kIdxImageMagic);
  PutU32(out, static_cast<std::uint32_t>(images.count));
  PutU32(out, static_cast<std::uint32_t>(images.rows));
  PutU32(out, static_cast<std::uint32_t>(images.cols));
  out.insert(out.end(), images.pixels.begin(), images.pixels.end());
  return out;
}

std::vector<std::uint8_t> EncodeIdxLabels(
    std::span<const std::uint8_t> labels) {
  std::vector<std::uint8_t> out;
  out.reserve(8 + labels.size());
  PutU32(out, kIdxLabelMagic);
  PutU32(out, static_cast<std::uint32_t>(labels.size()));
  out.insert(out.end(), labels.begin(), labels.end());
  return out;
}

std::vector<std::uint8_t> ReadFileBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::kIo, "read failed: " + path);
  return bytes;
}

std::vector<std::size_t> StratifiedSubset(std::span<const int> labels,
                                          std::size_t classes,
                                          std::size_t subset,
                                          std::uint64_t seed) {
  if (classes == 0) throw Error(ErrorCode::kInvalidArgument, "no classes");
  if (subset > labels.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "subset larger than the dataset");
  }
  std::vector<std::vector<std::size_t>> by_class(classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int y = labels[i];
    if (y < 0 || static_cast<std::size_t>(y) >= classes) {
      throw Error(ErrorCode::kFormat, "label out of range");
    }
    by_class[y].push_back(i);
  }
  RandomStream rng(seed);
  for (auto& members : by_class) {
    // Partial Fisher-Yates; only the prefix we may take matters.
    for (std::size_t i = 0; i + 1 < members.size(); ++i) {
      const std::size_t j = i + rng.UniformIndex(members.size() - i);
      std::swap(members[i], members[j]);
    }
  }
  // Round-robin over classes: counts differ by at most one unless a class
  // runs dry.
  std::vector<std::size_t> taken(classes, 0);
  std::vector<std::size_t> out;
  out.reserve(subset);
  while (out.size() < subset) {
    for (std::size_t c = 0; c < classes && out.size() < subset; ++c) {
      if (taken[c] < by_class[c].size()) out.push_back(by_class[c][taken[c]++]);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

Dataset LoadMnist(const std::string& images_path,
                  const std::string& labels_path, std::size_t subset,
                  std::uint64_t seed) {
  const IdxImages img = ParseIdxImages(ReadFileBytes(images_path));
  const std::vector<std::uint8_t> lab = ParseIdxLabels(ReadFileBytes(labels_path));
  if (lab.size() != img.count) {
    throw Error(ErrorCode::kFormat,
                "image count " + std::to_string(img.count) +
                    " != label count " + std::to_string(lab.size()));
  }
  Dataset all;
  all.dim = img.rows * img.cols;
  all.classes = kMnistClasses;
  all.features.resize(img.pixels.size());
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    all.features[i] = static_cast<double>(img.pixels[i]) / 255.0;
  }
  all.labels.assign(lab.begin(), lab.end());
  all.Validate();
  if (subset == 0 || subset == all.size()) return all;
  return all.Subset(StratifiedSubset(all.labels, all.classes, subset, seed));
}

}  // namespace ldpfl
