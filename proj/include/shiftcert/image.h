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

#ifndef SHIFTCERT_IMAGE_H_
#define SHIFTCERT_IMAGE_H_

#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

namespace shiftcert {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Per-pixel colorspace helpers, evaluated in double precision. Hue is in
// radians, in [0, 2*pi).
struct Rgb {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;
};

struct Hsv {
  double h = 0.0;
  double s = 0.0;
  double v = 0.0;
};

Hsv RgbToHsvPixel(const Rgb& rgb);
Rgb HsvToRgbPixel(const Hsv& hsv);

// Wraps an angle into [0, 2*pi).
double WrapAngle(double radians);

// Row-major H x W x 3 buffer of 32-bit floats. Both Image (RGB) and HsvImage
// share this layout; only the interpretation of the channels differs.
class PixelBuffer {
 public:
  static constexpr int kChannels = 3;

  PixelBuffer() = default;
  PixelBuffer(int height, int width);
  PixelBuffer(int height, int width, std::vector<float> pixels);

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_);
  }
  std::size_t size() const { return pixels_.size(); }
  bool empty() const { return pixels_.empty(); }

  std::span<const float> pixels() const { return pixels_; }
  // Writable view. Writers are responsible for keeping values in range;
  // Validate() re-checks the type invariants.
  std::span<float> mutable_pixels() { return pixels_; }

  float at(int row, int col, int channel) const {
    return pixels_[Index(row, col, channel)];
  }
  float& at(int row, int col, int channel) {
    return pixels_[Index(row, col, channel)];
  }

  bool SameShape(const PixelBuffer& other) const {
    return height_ == other.height_ && width_ == other.width_;
  }

  bool operator==(const PixelBuffer& other) const = default;

 private:
  std::size_t Index(int row, int col, int channel) const {
    return (static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(col)) *
               kChannels +
           static_cast<std::size_t>(channel);
  }

  int height_ = 0;
  int width_ = 0;
  std::vector<float> pixels_;
};

// RGB image with every component finite and in [0, 1].
class Image : public PixelBuffer {
 public:
  Image() = default;
  Image(int height, int width) : PixelBuffer(height, width) {}
  // Throws Error(kInvalidImage) when the invariants do not hold.
  Image(int height, int width, std::vector<float> pixels);

  void Validate() const;
  float MaxValue() const;
  // Per-channel maxima (r_max, g_max, b_max).
  Rgb ChannelMax() const;
};

// HSV image: h in [0, 2*pi) radians, s and v in [0, 1].
class HsvImage : public PixelBuffer {
 public:
  HsvImage() = default;
  HsvImage(int height, int width) : PixelBuffer(height, width) {}
  HsvImage(int height, int width, std::vector<float> pixels);

  void Validate() const;
};

HsvImage RgbToHsv(const Image& img);
Image HsvToRgb(const HsvImage& img);

// Scales the image so its global maximum component is exactly 1.
// Throws Error(kAllZeroImage) if every component is 0.
Image MaxNormalize(const Image& img);

double MaxAbsDiff(const PixelBuffer& a, const PixelBuffer& b);
double L2Distance(const PixelBuffer& a, const PixelBuffer& b);

}  // namespace shiftcert

#endif  // SHIFTCERT_IMAGE_H_
