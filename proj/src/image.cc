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

#include "shiftcert/image.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "shiftcert/error.h"

namespace shiftcert {
namespace {

constexpr double kSector = std::numbers::pi / 3.0;

// Converts a double hue to float without letting rounding land on 2*pi.
float HueToFloat(double h) {
  float hf = static_cast<float>(h);
  if (static_cast<double>(hf) >= kTwoPi) hf = 0.0f;
  return hf;
}

float Clamp01(double x) {
  return static_cast<float>(std::clamp(x, 0.0, 1.0));
}

}  // namespace

double WrapAngle(double radians) {
  double w = radians - kTwoPi * std::floor(radians / kTwoPi);
  // floor() can leave w == 2*pi for tiny negative inputs.
  if (w >= kTwoPi || w < 0.0) w = 0.0;
  return w;
}

Hsv RgbToHsvPixel(const Rgb& rgb) {
  const double mx = std::max({rgb.r, rgb.g, rgb.b});
  const double mn = std::min({rgb.r, rgb.g, rgb.b});
  const double chroma = mx - mn;
  Hsv out;
  out.v = mx;
  out.s = mx > 0.0 ? chroma / mx : 0.0;
  if (chroma <= 0.0) {
    out.h = 0.0;  // achromatic
    return out;
  }
  double sector;
  if (mx == rgb.r) {
    sector = (rgb.g - rgb.b) / chroma;
  } else if (mx == rgb.g) {
    sector = (rgb.b - rgb.r) / chroma + 2.0;
  } else {
    sector = (rgb.r - rgb.g) / chroma + 4.0;
  }
  out.h = WrapAngle(sector * kSector);
  return out;
}

Rgb HsvToRgbPixel(const Hsv& hsv) {
  const double v = hsv.v;
  const double s = hsv.s;
  if (s <= 0.0) return {v, v, v};
  const double hh = WrapAngle(hsv.h) / kSector;
  const double fl = std::floor(hh);
  const int sector = static_cast<int>(fl) % 6;
  const double f = hh - fl;
  const double p = v * (1.0 - s);
  const double q = v * (1.0 - s * f);
  const double t = v * (1.0 - s * (1.0 - f));
  switch (sector) {
    case 0: return {v, t, p};
    case 1: return {q, v, p};
    case 2: return {p, v, t};
    case 3: return {p, q, v};
    case 4: return {t, p, v};
    default: return {v, p, q};
  }
}

PixelBuffer::PixelBuffer(int height, int width)
    : height_(height), width_(width) {
  if (height <= 0 || width <= 0) {
    throw Error(ErrorCode::kInvalidImage, "image dimensions must be positive");
  }
  pixels_.assign(pixel_count() * kChannels, 0.0f);
}

PixelBuffer::PixelBuffer(int height, int width, std::vector<float> pixels)
    : height_(height), width_(width), pixels_(std::move(pixels)) {
  if (height <= 0 || width <= 0) {
    throw Error(ErrorCode::kInvalidImage, "image dimensions must be positive");
  }
  if (pixels_.size() != pixel_count() * kChannels) {
    throw Error(ErrorCode::kShapeMismatch,
                "expected " + std::to_string(pixel_count() * kChannels) +
                    " components, got " + std::to_string(pixels_.size()));
  }
}

Image::Image(int height, int width, std::vector<float> pixels)
    : PixelBuffer(height, width, std::move(pixels)) {
  Validate();
}

void Image::Validate() const {
  for (float x : pixels()) {
    if (!std::isfinite(x) || x < 0.0f || x > 1.0f) {
      throw Error(ErrorCode::kInvalidImage,
                  "component " + std::to_string(x) + " outside [0, 1]");
    }
  }
}

float Image::MaxValue() const {
  const auto px = pixels();
  return px.empty() ? 0.0f : *std::max_element(px.begin(), px.end());
}

Rgb Image::ChannelMax() const {
  Rgb m;
  const auto px = pixels();
  for (std::size_t i = 0; i < px.size(); i += kChannels) {
    m.r = std::max(m.r, static_cast<double>(px[i]));
    m.g = std::max(m.g, static_cast<double>(px[i + 1]));
    m.b = std::max(m.b, static_cast<double>(px[i + 2]));
  }
  return m;
}

HsvImage::HsvImage(int height, int width, std::vector<float> pixels)
    : PixelBuffer(height, width, std::move(pixels)) {
  Validate();
}

void HsvImage::Validate() const {
  const auto px = pixels();
  for (std::size_t i = 0; i < px.size(); i += kChannels) {
    const float h = px[i], s = px[i + 1], v = px[i + 2];
    if (!std::isfinite(h) || h < 0.0f || static_cast<double>(h) >= kTwoPi ||
        !std::isfinite(s) || s < 0.0f || s > 1.0f || !std::isfinite(v) ||
        v < 0.0f || v > 1.0f) {
      throw Error(ErrorCode::kInvalidImage, "HSV component out of range");
    }
  }
}

HsvImage RgbToHsv(const Image& img) {
  HsvImage out(img.height(), img.width());
  const auto in = img.pixels();
  auto dst = out.mutable_pixels();
  for (std::size_t i = 0; i < in.size(); i += PixelBuffer::kChannels) {
    const Hsv hsv = RgbToHsvPixel({in[i], in[i + 1], in[i + 2]});
    dst[i] = HueToFloat(hsv.h);
    dst[i + 1] = Clamp01(hsv.s);
    dst[i + 2] = Clamp01(hsv.v);
  }
  return out;
}

Image HsvToRgb(const HsvImage& img) {
  Image out(img.height(), img.width());
  const auto in = img.pixels();
  auto dst = out.mutable_pixels();
  for (std::size_t i = 0; i < in.size(); i += PixelBuffer::kChannels) {
    const Rgb rgb = HsvToRgbPixel({in[i], in[i + 1], in[i + 2]});
    dst[i] = Clamp01(rgb.r);
    dst[i + 1] = Clamp01(rgb.g);
    dst[i + 2] = Clamp01(rgb.b);
  }
  return out;
}

Image MaxNormalize(const Image& img) {
  const double mx = img.MaxValue();
  if (mx <= 0.0) {
    throw Error(ErrorCode::kAllZeroImage, "cannot normalize an all-zero image");
  }
  Image out = img;
  for (float& x : out.mutable_pixels()) {
    x = Clamp01(static_cast<double>(x) / mx);
  }
  return out;
}

double MaxAbsDiff(const PixelBuffer& a, const PixelBuffer& b) {
  if (!a.SameShape(b)) {
    throw Error(ErrorCode::kShapeMismatch, "images differ in shape");
  }
  double worst = 0.0;
  const auto pa = a.pixels();
  const auto pb = b.pixels();
  for (std::size_t i = 0; i < pa.size(); ++i) {
    worst = std::max(worst, std::abs(static_cast<double>(pa[i]) - pb[i]));
  }
  return worst;
}

double L2Distance(const PixelBuffer& a, const PixelBuffer& b) {
  if (!a.SameShape(b)) {
    throw Error(ErrorCode::kShapeMismatch, "images differ in shape");
  }
  double acc = 0.0;
  const auto pa = a.pixels();
  const auto pb = b.pixels();
  for (std::size_t i = 0; i < pa.size(); ++i) {
    const double d = static_cast<double>(pa[i]) - pb[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

}  // namespace shiftcert
