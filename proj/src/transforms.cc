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

#include "shiftcert/transforms.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "shiftcert/error.h"

namespace shiftcert {
namespace {

constexpr double kNormalizedTolerance = 1e-5;

float Clamp01(double x) { return static_cast<float>(std::clamp(x, 0.0, 1.0)); }

float HueToFloat(double h) {
  float hf = static_cast<float>(h);
  if (static_cast<double>(hf) >= kTwoPi) hf = 0.0f;
  return hf;
}

void RequireFinite(std::span<const double> theta) {
  for (double t : theta) {
    if (!std::isfinite(t)) {
      throw Error(ErrorCode::kInvalidArgs, "transform parameter is not finite");
    }
  }
}

// Working HSV representation in double so chained HSV-space transforms do not
// pick up float rounding between steps.
std::vector<Hsv> ToHsv(const Image& img) {
  std::vector<Hsv> out(img.pixel_count());
  const auto px = img.pixels();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = RgbToHsvPixel({px[3 * i], px[3 * i + 1], px[3 * i + 2]});
  }
  return out;
}

std::vector<Hsv> ToHsv(const HsvImage& img) {
  std::vector<Hsv> out(img.pixel_count());
  const auto px = img.pixels();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = {px[3 * i], px[3 * i + 1], px[3 * i + 2]};
  }
  return out;
}

Image FromHsv(const std::vector<Hsv>& hsv, int height, int width) {
  Image out(height, width);
  auto dst = out.mutable_pixels();
  for (std::size_t i = 0; i < hsv.size(); ++i) {
    const Rgb rgb = HsvToRgbPixel(hsv[i]);
    dst[3 * i] = Clamp01(rgb.r);
    dst[3 * i + 1] = Clamp01(rgb.g);
    dst[3 * i + 2] = Clamp01(rgb.b);
  }
  return out;
}

HsvImage FromHsvToHsvImage(const std::vector<Hsv>& hsv, int height,
                           int width) {
  HsvImage out(height, width);
  auto dst = out.mutable_pixels();
  for (std::size_t i = 0; i < hsv.size(); ++i) {
    dst[3 * i] = HueToFloat(WrapAngle(hsv[i].h));
    dst[3 * i + 1] = Clamp01(hsv[i].s);
    dst[3 * i + 2] = Clamp01(hsv[i].v);
  }
  return out;
}

void RotateHue(std::vector<Hsv>& hsv, double theta) {
  for (Hsv& p : hsv) p.h = WrapAngle(p.h + theta);
}

void ShiftSaturationValue(std::vector<Hsv>& hsv,
                          const std::array<double, 2>& theta) {
  if (theta[0] < 0.0 || theta[1] < 0.0) {
    throw Error(ErrorCode::kNegativeParam,
                "SV shift parameters must be non-negative");
  }
  RequireFinite(theta);
  double s_sum = 0.0, v_sum = 0.0, s_max = 0.0, v_max = 0.0;
  for (const Hsv& p : hsv) {
    s_sum += p.s;
    v_sum += p.v;
    s_max = std::max(s_max, p.s);
    v_max = std::max(v_max, p.v);
  }
  const double n = static_cast<double>(hsv.size());
  const double s_mean = s_sum / n;
  const double v_mean = v_sum / n;
  const double s_gain = std::exp2(theta[0]) - 1.0;
  const double v_gain = std::exp2(theta[1]) - 1.0;
  const double max_after =
      std::max(s_max + s_gain * s_mean, v_max + v_gain * v_mean);
  if (!(max_after > 0.0)) {
    throw Error(ErrorCode::kDegenerateImage,
                "SV shift normalizer is not positive");
  }
  for (Hsv& p : hsv) {
    p.s = (p.s + s_gain * s_mean) / max_after;
    p.v = (p.v + v_gain * v_mean) / max_after;
  }
}

}  // namespace

std::string_view TransformKindName(TransformKind kind) {
  switch (kind) {
    case TransformKind::kColorShift: return "color_shift";
    case TransformKind::kHueShift: return "hue_shift";
    case TransformKind::kSvShift: return "sv_shift";
    case TransformKind::kVectorTranslate: return "vector_translate";
  }
  return "unknown";
}

TransformKind ParseTransformKind(std::string_view name) {
  for (TransformKind k :
       {TransformKind::kColorShift, TransformKind::kHueShift,
        TransformKind::kSvShift, TransformKind::kVectorTranslate}) {
    if (name == TransformKindName(k)) return k;
  }
  throw Error(ErrorCode::kInvalidArgs,
              "unknown transform '" + std::string(name) + "'");
}

NormKind NormFor(TransformKind kind) {
  switch (kind) {
    case TransformKind::kColorShift:
    case TransformKind::kVectorTranslate:
      return NormKind::kL2;
    case TransformKind::kHueShift:
      return NormKind::kAbs;
    case TransformKind::kSvShift:
      return NormKind::kL1;
  }
  return NormKind::kL2;
}

std::size_t ParamLength(TransformKind kind) {
  switch (kind) {
    case TransformKind::kColorShift: return 3;
    case TransformKind::kHueShift: return 1;
    case TransformKind::kSvShift: return 2;
    case TransformKind::kVectorTranslate: return 0;
  }
  return 0;
}

void ParamVector::Validate(std::size_t image_components) const {
  const std::size_t expected = kind == TransformKind::kVectorTranslate
                                   ? image_components
                                   : ParamLength(kind);
  if (kind != TransformKind::kVectorTranslate || image_components != 0) {
    if (values.size() != expected) {
      throw Error(ErrorCode::kShapeMismatch,
                  std::string(TransformKindName(kind)) + " expects " +
                      std::to_string(expected) + " parameters, got " +
                      std::to_string(values.size()));
    }
  }
  RequireFinite(values);
  if (kind == TransformKind::kSvShift) {
    for (double v : values) {
      if (v < 0.0) {
        throw Error(ErrorCode::kNegativeParam,
                    "SV shift parameters must be non-negative");
      }
    }
  }
}

Image ColorShift(const Image& img, const std::array<double, 3>& theta) {
  RequireFinite(theta);
  const Rgb cmax = img.ChannelMax();
  const double global_max = std::max({cmax.r, cmax.g, cmax.b});
  if (global_max <= 0.0) {
    throw Error(ErrorCode::kAllZeroImage, "color shift of an all-zero image");
  }
  if (std::abs(global_max - 1.0) > kNormalizedTolerance) {
    throw Error(ErrorCode::kNotNormalized,
                "color shift requires a max-normalized image (max = " +
                    std::to_string(global_max) + ")");
  }
  const std::array<double, 3> gain = {std::exp2(theta[0]), std::exp2(theta[1]),
                                      std::exp2(theta[2])};
  const double renorm =
      std::max({gain[0] * cmax.r, gain[1] * cmax.g, gain[2] * cmax.b});
  if (!(renorm > 0.0) || !std::isfinite(renorm)) {
    throw Error(ErrorCode::kAllZeroImage, "color shift normalizer vanished");
  }
  Image out = img;
  auto px = out.mutable_pixels();
  for (std::size_t i = 0; i < px.size(); ++i) {
    px[i] = Clamp01(gain[i % 3] * static_cast<double>(px[i]) / renorm);
  }
  return out;
}

Image HueShift(const Image& img, double theta) {
  RequireFinite(std::span<const double>(&theta, 1));
  auto hsv = ToHsv(img);
  RotateHue(hsv, theta);
  return FromHsv(hsv, img.height(), img.width());
}

HsvImage HueShift(const HsvImage& img, double theta) {
  RequireFinite(std::span<const double>(&theta, 1));
  auto hsv = ToHsv(img);
  RotateHue(hsv, theta);
  return FromHsvToHsvImage(hsv, img.height(), img.width());
}

Image SvShift(const Image& img, const std::array<double, 2>& theta) {
  auto hsv = ToHsv(img);
  ShiftSaturationValue(hsv, theta);
  return FromHsv(hsv, img.height(), img.width());
}

HsvImage SvShift(const HsvImage& img, const std::array<double, 2>& theta) {
  auto hsv = ToHsv(img);
  ShiftSaturationValue(hsv, theta);
  return FromHsvToHsvImage(hsv, img.height(), img.width());
}

Image VectorTranslate(const Image& img, std::span<const double> theta) {
  if (theta.size() != img.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                "translation has " + std::to_string(theta.size()) +
                    " components, image has " + std::to_string(img.size()));
  }
  RequireFinite(theta);
  Image out = img;
  auto px = out.mutable_pixels();
  for (std::size_t i = 0; i < px.size(); ++i) {
    px[i] = Clamp01(static_cast<double>(px[i]) + theta[i]);
  }
  return out;
}

Image ApplyTransform(const Image& img, const ParamVector& theta) {
  theta.Validate(img.size());
  const auto& v = theta.values;
  switch (theta.kind) {
    case TransformKind::kColorShift:
      return ColorShift(img, {v[0], v[1], v[2]});
    case TransformKind::kHueShift:
      return HueShift(img, v[0]);
    case TransformKind::kSvShift:
      return SvShift(img, {v[0], v[1]});
    case TransformKind::kVectorTranslate:
      return VectorTranslate(img, v);
  }
  throw Error(ErrorCode::kUnsupported, "unknown transform kind");
}

double TransformDistance(const ParamVector& theta) {
  theta.Validate();
  const auto& v = theta.values;
  switch (theta.norm_kind()) {
    case NormKind::kL2: {
      double acc = 0.0;
      for (double t : v) acc += t * t;
      return std::sqrt(acc);
    }
    case NormKind::kL1: {
      double acc = 0.0;
      for (double t : v) acc += std::abs(t);
      return acc;
    }
    case NormKind::kAbs: {
      const double r = std::fmod(std::abs(v.at(0)), kTwoPi);
      return std::min(r, kTwoPi - r);
    }
  }
  return 0.0;
}

}  // namespace shiftcert
