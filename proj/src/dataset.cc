// Copyright 2026 The shiftcert Authors
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

#include "shiftcert/dataset.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <numbers>
#include <unordered_set>

#include "shiftcert/error.h"
#include "shiftcert/io.h"
#include "shiftcert/random.h"

namespace shiftcert {
namespace {

constexpr char kMagic[4] = {'S', 'C', 'R', 'T'};
constexpr std::uint32_t kFormatVersion = 1;
constexpr std::size_t kCifarSide = 32;
constexpr std::size_t kCifarRecord = 1 + 3 * kCifarSide * kCifarSide;

void PutU32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) {
    out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
}

class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}

  std::uint32_t U32() {
    Need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(
               static_cast<unsigned char>(data_[pos_ + i]))
           << (8 * i);
    }
    pos_ += 4;
    return v;
  }
  float F32() { return std::bit_cast<float>(U32()); }
  std::string_view Bytes(std::size_t n) {
    Need(n);
    auto out = data_.substr(pos_, n);
    pos_ += n;
    return out;
  }
  bool AtEnd() const { return pos_ == data_.size(); }

 private:
  void Need(std::size_t n) const {
    if (data_.size() - pos_ < n) {
      throw Error(ErrorCode::kMalformedFile, "dataset file is truncated");
    }
  }

  std::string_view data_;
  std::size_t pos_ = 0;
};

std::string Checksum(std::string_view bytes) {
  return HexU64(Fnv1a64(bytes));
}

}  // namespace

void Dataset::Validate() const {
  std::unordered_set<std::uint32_t> ids;
  for (const Sample& s : samples) {
    if (!ids.insert(s.id).second) {
      throw Error(ErrorCode::kInvalidArgs,
                  "duplicate sample id " + std::to_string(s.id));
    }
    if (s.label < 0 || s.label >= num_classes) {
      throw Error(ErrorCode::kInvalidArgs,
                  "label " + std::to_string(s.label) + " out of range");
    }
    if (!s.image.SameShape(samples.front().image)) {
      throw Error(ErrorCode::kShapeMismatch, "mixed image shapes");
    }
  }
}

Dataset Dataset::Slice(std::size_t begin, std::size_t count) const {
  if (begin > samples.size() || count > samples.size() - begin) {
    throw Error(ErrorCode::kInvalidArgs, "slice out of range");
  }
  Dataset out;
  out.num_classes = num_classes;
  out.manifest = manifest;
  out.samples.assign(samples.begin() + static_cast<std::ptrdiff_t>(begin),
                     samples.begin() + static_cast<std::ptrdiff_t>(begin + count));
  return out;
}

Dataset Dataset::WithImages(std::vector<Image> images) const {
  if (images.size() != samples.size()) {
    throw Error(ErrorCode::kShapeMismatch, "image count differs");
  }
  Dataset out = *this;
  for (std::size_t i = 0; i < images.size(); ++i) {
    out.samples[i].image = std::move(images[i]);
  }
  return out;
}

Dataset GenerateSynthetic(std::size_t n, int classes, int size,
                          std::uint64_t seed) {
  if (classes < 2 || n < static_cast<std::size_t>(classes) || size < 2) {
    throw Error(ErrorCode::kInvalidArgs,
                "need n >= classes >= 2 and size >= 2");
  }
  const SeedPolicy seeds{seed};
  const int region = size / 2 + 1;
  Dataset ds;
  ds.num_classes = classes;
  ds.samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(seeds.ForSample(i, SeedStream::kData));
    const int label = static_cast<int>(i % static_cast<std::size_t>(classes));
    std::vector<Hsv> hsv(static_cast<std::size_t>(size) * size);
    for (Hsv& p : hsv) {
      p.h = rng.Uniform(0.0, kTwoPi);
      p.s = rng.Uniform(0.0, 0.6);
      p.v = rng.Uniform(0.2, 0.8);
    }
    const int row0 = static_cast<int>(rng.UniformInt(size - region + 1));
    const int col0 = static_cast<int>(rng.UniformInt(size - region + 1));
    const double hue = kTwoPi * label / classes + rng.Normal(0.0, 0.3);
    const double sat = rng.Uniform(0.6, 1.0);
    const double val = rng.Uniform(0.6, 1.0);
    for (int r = row0; r < row0 + region; ++r) {
      for (int c = col0; c < col0 + region; ++c) {
        Hsv& p = hsv[static_cast<std::size_t>(r) * size + c];
        p.h = WrapAngle(hue + rng.Normal(0.0, 0.15));
        p.s = sat;
        p.v = val;
      }
    }
    Image img(size, size);
    auto px = img.mutable_pixels();
    for (std::size_t k = 0; k < hsv.size(); ++k) {
      const Rgb rgb = HsvToRgbPixel(hsv[k]);
      px[3 * k] = static_cast<float>(std::clamp(rgb.r, 0.0, 1.0));
      px[3 * k + 1] = static_cast<float>(std::clamp(rgb.g, 0.0, 1.0));
      px[3 * k + 2] = static_cast<float>(std::clamp(rgb.b, 0.0, 1.0));
    }
    ds.samples.push_back(
        {static_cast<std::uint32_t>(i), MaxNormalize(img), label});
  }
  ds.manifest = {{"source", "synthetic"},
                 {"n", n},
                 {"classes", classes},
                 {"size", size},
                 {"seed", seed}};
  return ds;
}

Dataset ReadCifar10Binary(const std::string& path) {
  const std::string data = ReadFile(path);
  if (data.empty() || data.size() % kCifarRecord != 0) {
    throw Error(ErrorCode::kMalformedFile,
                path + ": length is not a multiple of " +
                    std::to_string(kCifarRecord));
  }
  const std::size_t count = data.size() / kCifarRecord;
  constexpr std::size_t plane = kCifarSide * kCifarSide;
  Dataset ds;
  ds.num_classes = 10;
  ds.samples.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto* rec =
        reinterpret_cast<const unsigned char*>(data.data() + i * kCifarRecord);
    const int label = rec[0];
    if (label >= 10) {
      throw Error(ErrorCode::kMalformedFile,
                  "record " + std::to_string(i) + " has label " +
                      std::to_string(label));
    }
    Image img(kCifarSide, kCifarSide);
    auto px = img.mutable_pixels();
    for (std::size_t c = 0; c < 3; ++c) {
      for (std::size_t p = 0; p < plane; ++p) {
        px[3 * p + c] = static_cast<float>(rec[1 + c * plane + p]) / 255.0f;
      }
    }
    // An all-black frame cannot be max-normalized; it is kept as is.
    if (img.MaxValue() > 0.0f) img = MaxNormalize(img);
    ds.samples.push_back({static_cast<std::uint32_t>(i), std::move(img), label});
  }
  ds.manifest = {{"source", "cifar10-binary"}, {"path", path}, {"n", count}};
  return ds;
}

void WriteDataset(const Dataset& dataset, const std::string& path) {
  dataset.Validate();
  std::string bin(kMagic, 4);
  PutU32(bin, kFormatVersion);
  PutU32(bin, static_cast<std::uint32_t>(dataset.size()));
  PutU32(bin, static_cast<std::uint32_t>(dataset.height()));
  PutU32(bin, static_cast<std::uint32_t>(dataset.width()));
  PutU32(bin, static_cast<std::uint32_t>(dataset.num_classes));
  for (const Sample& s : dataset.samples) {
    PutU32(bin, s.id);
    PutU32(bin, static_cast<std::uint32_t>(s.label));
    for (float x : s.image.pixels()) PutU32(bin, std::bit_cast<std::uint32_t>(x));
  }
  const nlohmann::json sidecar = {{"format", "SCRT"},
                                  {"version", kFormatVersion},
                                  {"n", dataset.size()},
                                  {"checksum", Checksum(bin)},
                                  {"provenance", dataset.manifest}};
  AtomicWriteFile(path, bin);
  AtomicWriteFile(path + ".json", sidecar.dump(2) + "\n");
}

Dataset ReadDataset(const std::string& path) {
  const std::string bin = ReadFile(path);
  nlohmann::json sidecar;
  try {
    sidecar = nlohmann::json::parse(ReadFile(path + ".json"));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kMalformedFile,
                path + ".json: " + std::string(e.what()));
  } catch (const Error&) {
    throw Error(ErrorCode::kMalformedFile, "missing manifest " + path + ".json");
  }

  Reader r(bin);
  if (r.Bytes(4) != std::string_view(kMagic, 4)) {
    throw Error(ErrorCode::kMalformedFile, path + ": bad magic");
  }
  const std::uint32_t version = r.U32();
  if (version != kFormatVersion) {
    throw Error(ErrorCode::kVersionMismatch,
                "format version " + std::to_string(version));
  }
  const std::uint32_t n = r.U32();
  const std::uint32_t h = r.U32();
  const std::uint32_t w = r.U32();
  const std::uint32_t classes = r.U32();
  if (h == 0 || w == 0 || classes < 2 || h > 1u << 15 || w > 1u << 15) {
    throw Error(ErrorCode::kMalformedFile, path + ": bad header");
  }
  const std::size_t per_sample = 8 + 12ull * h * w;
  if ((bin.size() - 24) != per_sample * n) {
    throw Error(ErrorCode::kMalformedFile,
                path + ": size does not match header");
  }
  if (sidecar.value("checksum", std::string()) != Checksum(bin) ||
      sidecar.value("version", 0u) != kFormatVersion) {
    throw Error(ErrorCode::kVersionMismatch,
                path + ": manifest does not match the data file");
  }

  Dataset ds;
  ds.num_classes = static_cast<int>(classes);
  ds.manifest = sidecar.value("provenance", nlohmann::json::object());
  ds.samples.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    Sample s;
    s.id = r.U32();
    s.label = static_cast<int>(r.U32());
    std::vector<float> px(3ull * h * w);
    for (float& x : px) x = r.F32();
    try {
      s.image = Image(static_cast<int>(h), static_cast<int>(w), std::move(px));
    } catch (const Error& e) {
      throw Error(ErrorCode::kMalformedFile, e.what());
    }
    if (s.id != i) {
      throw Error(ErrorCode::kMalformedFile, "sample ids are not dense");
    }
    ds.samples.push_back(std::move(s));
  }
  try {
    ds.Validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kMalformedFile, e.what());
  }
  return ds;
}

}  // namespace shiftcert
