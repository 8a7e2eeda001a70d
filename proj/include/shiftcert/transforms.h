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

#ifndef SHIFTCERT_TRANSFORMS_H_
#define SHIFTCERT_TRANSFORMS_H_

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "shiftcert/image.h"

namespace shiftcert {

// Parameterized transformation families T(x, theta). Each family satisfies
// T(T(x, a), b) == T(x, a + b) and T(x, 0) == x.
enum class TransformKind {
  kColorShift,       // theta in R^3, l2 distance
  kHueShift,         // theta in R, minimal rotation distance
  kSvShift,          // theta in R^2_{>=0}, l1 distance
  kVectorTranslate,  // theta in R^{H*W*3}, l2 distance
};

enum class NormKind { kL1, kL2, kAbs };

std::string_view TransformKindName(TransformKind kind);
TransformKind ParseTransformKind(std::string_view name);
NormKind NormFor(TransformKind kind);
// Parameter length for the fixed-size families; 0 for kVectorTranslate,
// whose length depends on the image.
std::size_t ParamLength(TransformKind kind);

// A transformation parameter together with the family it belongs to.
struct ParamVector {
  TransformKind kind = TransformKind::kColorShift;
  std::vector<double> values;

  NormKind norm_kind() const { return NormFor(kind); }
  // Throws kShapeMismatch on a length mismatch (pass the image component
  // count for kVectorTranslate), kInvalidArgs on non-finite values and
  // kNegativeParam for negative SV components.
  void Validate(std::size_t image_components = 0) const;
};

// Requires a max-normalized image (global max within 1e-5 of 1).
Image ColorShift(const Image& img, const std::array<double, 3>& theta);
Image HueShift(const Image& img, double theta);
HsvImage HueShift(const HsvImage& img, double theta);
Image SvShift(const Image& img, const std::array<double, 2>& theta);
HsvImage SvShift(const HsvImage& img, const std::array<double, 2>& theta);
// Componentwise x + theta, clamped to [0, 1].
Image VectorTranslate(const Image& img, std::span<const double> theta);

Image ApplyTransform(const Image& img, const ParamVector& theta);

// ||theta|| under the family's norm: an upper bound on the transform distance
// between x and T(x, theta). Hue angles are reduced to the minimal rotation
// in [0, pi].
double TransformDistance(const ParamVector& theta);

}  // namespace shiftcert

#endif  // SHIFTCERT_TRANSFORMS_H_
