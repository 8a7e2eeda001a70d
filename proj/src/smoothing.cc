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

#include "shiftcert/smoothing.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "shiftcert/error.h"
#include "shiftcert/random.h"

namespace shiftcert {
namespace {

std::string_view KindName(SmoothingKind kind) {
  switch (kind) {
    case SmoothingKind::kGaussianParam: return "gaussian_param";
    case SmoothingKind::kUniformParam: return "uniform_param";
    case SmoothingKind::kUniformHue: return "uniform_hue";
    case SmoothingKind::kChannelSelect: return "channel_select";
    case SmoothingKind::kPixelGaussian: return "pixel_gaussian";
  }
  return "unknown";
}

SmoothingKind ParseKind(std::string_view name) {
  for (SmoothingKind k :
       {SmoothingKind::kGaussianParam, SmoothingKind::kUniformParam,
        SmoothingKind::kUniformHue, SmoothingKind::kChannelSelect,
        SmoothingKind::kPixelGaussian}) {
    if (name == KindName(k)) return k;
  }
  throw Error(ErrorCode::kInvalidArgs,
              "unknown smoothing kind '" + std::string(name) + "'");
}

Image SelectChannel(const Image& img, int channel, bool& degenerate) {
  Image out(img.height(), img.width());
  const auto in = img.pixels();
  auto dst = out.mutable_pixels();
  double cmax = 0.0;
  for (std::size_t i = channel; i < in.size(); i += 3) {
    cmax = std::max(cmax, static_cast<double>(in[i]));
  }
  if (cmax <= 0.0) {
    degenerate = true;
    return out;
  }
  for (std::size_t i = channel; i < in.size(); i += 3) {
    dst[i] = static_cast<float>(
        std::min(1.0, static_cast<double>(in[i]) / cmax));
  }
  return out;
}

}  // namespace

SmoothingSpec SmoothingSpec::GaussianParam(double sigma,
                                           TransformKind transform) {
  SmoothingSpec s{SmoothingKind::kGaussianParam, sigma, transform};
  s.Validate();
  return s;
}

SmoothingSpec SmoothingSpec::UniformParam(double a) {
  SmoothingSpec s{SmoothingKind::kUniformParam, a, TransformKind::kSvShift};
  s.Validate();
  return s;
}

SmoothingSpec SmoothingSpec::UniformHue() {
  return {SmoothingKind::kUniformHue, 0.0, TransformKind::kHueShift};
}

SmoothingSpec SmoothingSpec::ChannelSelect() {
  return {SmoothingKind::kChannelSelect, 0.0, TransformKind::kColorShift};
}

SmoothingSpec SmoothingSpec::PixelGaussian(double sigma) {
  SmoothingSpec s{SmoothingKind::kPixelGaussian, sigma,
                  TransformKind::kVectorTranslate};
  s.Validate();
  return s;
}

std::size_t SmoothingSpec::dim() const {
  switch (kind) {
    case SmoothingKind::kGaussianParam: return ParamLength(transform);
    case SmoothingKind::kUniformParam: return 2;
    case SmoothingKind::kUniformHue: return 1;
    case SmoothingKind::kChannelSelect:
    case SmoothingKind::kPixelGaussian:
      return 0;
  }
  return 0;
}

void SmoothingSpec::Validate() const {
  auto fail = [this](const std::string& why) {
    throw Error(ErrorCode::kInvalidArgs, Name() + ": " + why);
  };
  if (!std::isfinite(scale)) fail("scale must be finite");
  switch (kind) {
    case SmoothingKind::kGaussianParam:
      // sigma == 0 is the no-noise limit; it is allowed so that callers can
      // sweep down to it.
      if (scale < 0.0) fail("sigma must be non-negative");
      if (transform != TransformKind::kColorShift &&
          transform != TransformKind::kHueShift) {
        fail("parameter-space Gaussian pairs with color_shift or hue_shift");
      }
      break;
    case SmoothingKind::kUniformParam:
      if (!(scale > 0.0)) fail("a must be positive");
      if (transform != TransformKind::kSvShift) {
        fail("uniform parameter smoothing pairs with sv_shift");
      }
      break;
    case SmoothingKind::kUniformHue:
      if (transform != TransformKind::kHueShift) {
        fail("uniform hue smoothing pairs with hue_shift");
      }
      break;
    case SmoothingKind::kChannelSelect:
      if (transform != TransformKind::kColorShift) {
        fail("channel selection pairs with color_shift");
      }
      break;
    case SmoothingKind::kPixelGaussian:
      if (scale < 0.0) fail("sigma must be non-negative");
      if (transform != TransformKind::kVectorTranslate) {
        fail("pixel Gaussian smoothing lives in pixel space");
      }
      break;
  }
}

std::string SmoothingSpec::Name() const {
  return std::string(KindName(kind)) + "/" +
         std::string(TransformKindName(transform));
}

nlohmann::json SmoothingSpec::ToJson() const {
  return {{"kind", KindName(kind)},
          {"scale", scale},
          {"transform", TransformKindName(transform)}};
}

SmoothingSpec SmoothingSpec::FromJson(const nlohmann::json& j) {
  SmoothingSpec s;
  s.kind = ParseKind(j.at("kind").get<std::string>());
  s.scale = j.value("scale", 0.0);
  s.transform = ParseTransformKind(j.at("transform").get<std::string>());
  s.Validate();
  return s;
}

SmoothingSpec SmoothingSpec::FromName(const std::string& name, double scale) {
  if (name == "gaussian-cs") return GaussianParam(scale);
  if (name == "gaussian-hue") {
    return GaussianParam(scale, TransformKind::kHueShift);
  }
  if (name == "uniform-sv") return UniformParam(scale);
  if (name == "uniform-hue") return UniformHue();
  if (name == "channel-select") return ChannelSelect();
  if (name == "pixel-gaussian") return PixelGaussian(scale);
  throw Error(ErrorCode::kInvalidArgs, "unknown smoothing '" + name + "'");
}

Noise SampleNoise(const SmoothingSpec& spec, std::uint64_t seed,
                  std::size_t image_components) {
  Rng rng(seed);
  switch (spec.kind) {
    case SmoothingKind::kGaussianParam: {
      ParamVector p{spec.transform, std::vector<double>(spec.dim())};
      for (double& v : p.values) v = spec.scale * rng.Normal();
      return p;
    }
    case SmoothingKind::kUniformParam: {
      ParamVector p{TransformKind::kSvShift, std::vector<double>(2)};
      for (double& v : p.values) v = rng.Uniform(0.0, spec.scale);
      return p;
    }
    case SmoothingKind::kUniformHue:
      return ParamVector{TransformKind::kHueShift,
                         {rng.Uniform(-std::numbers::pi, std::numbers::pi)}};
    case SmoothingKind::kChannelSelect:
      return ChannelIndex{static_cast<int>(rng.UniformInt(3))};
    case SmoothingKind::kPixelGaussian: {
      PixelNoise n{std::vector<double>(image_components)};
      for (double& v : n.values) v = spec.scale * rng.Normal();
      return n;
    }
  }
  throw Error(ErrorCode::kUnsupported, "unknown smoothing kind");
}

RandomizedInput ApplyNoise(const Image& img, const SmoothingSpec& spec,
                           const Noise& noise) {
  RandomizedInput out;
  if (const auto* p = std::get_if<ParamVector>(&noise)) {
    out.image = ApplyTransform(img, *p);
  } else if (const auto* c = std::get_if<ChannelIndex>(&noise)) {
    if (c->channel < 0 || c->channel > 2) {
      throw Error(ErrorCode::kInvalidArgs, "channel index out of range");
    }
    out.image = SelectChannel(img, c->channel, out.degenerate);
  } else {
    const auto& n = std::get<PixelNoise>(noise);
    if (spec.kind != SmoothingKind::kPixelGaussian) {
      throw Error(ErrorCode::kInvalidArgs, "pixel noise for a " + spec.Name());
    }
    out.image = VectorTranslate(img, n.values);
  }
  return out;
}

RandomizedInput RandomizeInput(const Image& img, const SmoothingSpec& spec,
                               std::uint64_t seed) {
  return ApplyNoise(img, spec, SampleNoise(spec, seed, img.size()));
}

double SmoothingShiftRadius(const SmoothingSpec& spec) {
  if (spec.kind == SmoothingKind::kGaussianParam && spec.dim() == 3) {
    return 2.0 * std::numbers::sqrt2 * spec.scale /
           std::sqrt(std::numbers::pi);
  }
  if (spec.kind == SmoothingKind::kUniformParam) return spec.scale;
  throw Error(ErrorCode::kUnsupported,
              "no shift radius formula for " + spec.Name());
}

}  // namespace shiftcert
