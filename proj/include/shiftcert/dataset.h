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

#ifndef SHIFTCERT_DATASET_H_
#define SHIFTCERT_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "shiftcert/image.h"

namespace shiftcert {

struct Sample {
  std::uint32_t id = 0;
  Image image;
  int label = 0;

  bool operator==(const Sample&) const = default;
};

// Labelled images of a common shape. Ingested datasets have ids 0..n-1;
// slices keep the ids of their parent so per-sample seeds stay attached to
// the sample.
struct Dataset {
  std::vector<Sample> samples;
  int num_classes = 0;
  nlohmann::json manifest = nlohmann::json::object();

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  int height() const { return samples.empty() ? 0 : samples[0].image.height(); }
  int width() const { return samples.empty() ? 0 : samples[0].image.width(); }
  std::size_t feature_count() const {
    return samples.empty() ? 0 : samples[0].image.size();
  }

  // Throws Error(kInvalidArgs) for duplicate ids, labels out of range or
  // mixed shapes.
  void Validate() const;
  Dataset Slice(std::size_t begin, std::size_t count) const;
  // Copy with the same ids and labels but different images.
  Dataset WithImages(std::vector<Image> images) const;

  bool operator==(const Dataset& other) const {
    return num_classes == other.num_classes && samples == other.samples;
  }
};

// Synthetic color-classification data: class k shows a dominant square region
// whose hue is centred at 2*pi*k/classes, over a background of random
// low-saturation colors. Every image is max-normalized. Labels cycle
// 0..classes-1. Throws Error(kInvalidArgs) unless n >= classes >= 2 and
// size >= 2.
Dataset GenerateSynthetic(std::size_t n, int classes, int size,
                          std::uint64_t seed);

// Standard CIFAR-10 binary batch: records of 1 label byte + 3072 channel-major
// bytes. Pixels are scaled by 1/255, converted to HWC and max-normalized per
// image. Throws Error(kMalformedFile).
Dataset ReadCifar10Binary(const std::string& path);

// Native format: "SCRT" magic, u32 version, n, h, w, classes (little-endian),
// then per sample u32 id, u32 label and h*w*3 little-endian float32. A JSON
// sidecar at path + ".json" carries the manifest and a 64-bit checksum of the
// binary file.
void WriteDataset(const Dataset& dataset, const std::string& path);
// Throws Error(kMalformedFile) on truncation or bad fields and
// Error(kVersionMismatch) on a version or checksum mismatch.
Dataset ReadDataset(const std::string& path);

}  // namespace shiftcert

#endif  // SHIFTCERT_DATASET_H_
