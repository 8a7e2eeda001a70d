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

#ifndef SHIFTCERT_SMOOTHING_H_
#define SHIFTCERT_SMOOTHING_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "shiftcert/image.h"
#include "shiftcert/transforms.h"

namespace shiftcert {

enum class SmoothingKind {
  kGaussianParam,  // T(x, delta), delta ~ N(0, sigma^2 I) in parameter space
  kUniformParam,   // SV shift with delta ~ U[0, a]^2
  kUniformHue,     // hue rotation by delta ~ U[-pi, pi)
  kChannelSelect,  // keep one RGB channel, rescaled to max 1
  kPixelGaussian,  // x + N(0, sigma^2 I), clamped to [0, 1]
};

struct SmoothingSpec {
  SmoothingKind kind = SmoothingKind::kGaussianParam;
  // sigma for the Gaussian kinds, a for kUniformParam, unused otherwise.
  double scale = 0.0;
  // Transform the noise is applied through. kVectorTranslate denotes
  // pixel space.
  TransformKind transform = TransformKind::kColorShift;

  static SmoothingSpec GaussianParam(
      double sigma, TransformKind transform = TransformKind::kColorShift);
  static SmoothingSpec UniformParam(double a);
  static SmoothingSpec UniformHue();
  static SmoothingSpec ChannelSelect();
  static SmoothingSpec PixelGaussian(double sigma);

  // Parameter dimension of one draw; 0 for pixel-space and channel draws.
  std::size_t dim() const;
  // Throws Error(kInvalidArgs) for invalid scale or kind/transform pairings.
  void Validate() const;
  std::string Name() const;

  nlohmann::json ToJson() const;
  static SmoothingSpec FromJson(const nlohmann::json& j);
  // Parses "gaussian-cs", "gaussian-hue", "uniform-sv", "uniform-hue",
  // "channel-select" or "pixel-gaussian".
  static SmoothingSpec FromName(const std::string& name, double scale);
};

struct ChannelIndex {
  int channel = 0;
};

struct PixelNoise {
  std::vector<double> values;
};

using Noise = std::variant<ParamVector, PixelNoise, ChannelIndex>;

struct RandomizedInput {
  Image image;
  // Set when the draw produced a degenerate input (an all-zero selected
  // channel). Such draws are scored as failures.
  bool degenerate = false;
};

// One draw from the smoothing distribution's noise. Deterministic in seed.
// image_components is needed only for kPixelGaussian.
Noise SampleNoise(const SmoothingSpec& spec, std::uint64_t seed,
                  std::size_t image_components = 0);

// Applies a given noise draw: T(x, delta), channel selection or additive
// pixel noise.
RandomizedInput ApplyNoise(const Image& img, const SmoothingSpec& spec,
                           const Noise& noise);

RandomizedInput RandomizeInput(const Image& img, const SmoothingSpec& spec,
                               std::uint64_t seed);

// Expected norm of one smoothing draw: 2*sqrt(2)*sigma/sqrt(pi) for the
// 3-dimensional Gaussian and a for U[0, a]^2 under l1. Throws
// Error(kUnsupported) for other kinds.
double SmoothingShiftRadius(const SmoothingSpec& spec);

}  // namespace shiftcert

#endif  // SHIFTCERT_SMOOTHING_H_
