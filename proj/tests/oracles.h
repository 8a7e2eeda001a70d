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

// Independent reference computations used as test oracles. None of these
// call into the code they check.

#ifndef SHIFTCERT_TESTS_ORACLES_H_
#define SHIFTCERT_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <vector>

#include "shiftcert/image.h"
#include "shiftcert/random.h"

namespace shiftcert::oracle {

// Composite Simpson rule on [a, b] with an even number of intervals.
inline double Simpson(const std::function<double(double)>& f, double a,
                      double b, int intervals = 20000) {
  const double h = (b - a) / intervals;
  double sum = f(a) + f(b);
  for (int i = 1; i < intervals; ++i) {
    sum += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  }
  return sum * h / 3.0;
}

// erf(x) = 2/sqrt(pi) * integral_0^x exp(-t^2) dt.
inline double Erf(double x) {
  return 2.0 / std::sqrt(std::numbers::pi) *
         Simpson([](double t) { return std::exp(-t * t); }, 0.0, x);
}

// Phi(z) = 1/2 + integral_0^z of the standard normal density.
inline double NormalCdf(double z) {
  const double c = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  return 0.5 + Simpson([c](double t) { return c * std::exp(-0.5 * t * t); },
                       0.0, z);
}

// P(Bin(n, p) >= k), summing pmf terms in log space.
inline double BinomialUpperTail(std::int64_t k, std::int64_t n, double p) {
  if (k <= 0) return 1.0;
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  long double total = 0.0L;
  for (std::int64_t i = k; i <= n; ++i) {
    const long double logc = std::lgamma(static_cast<long double>(n) + 1) -
                             std::lgamma(static_cast<long double>(i) + 1) -
                             std::lgamma(static_cast<long double>(n - i) + 1);
    total += std::exp(logc + i * std::log(static_cast<long double>(p)) +
                      (n - i) * std::log1p(-static_cast<long double>(p)));
  }
  return static_cast<double>(total);
}

// Largest p with P(Bin(n, p) >= k) <= alpha, by bisection on the tail.
inline double ClopperPearsonByTail(std::int64_t k, std::int64_t n,
                                   double alpha) {
  if (k == 0) return 0.0;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (BinomialUpperTail(k, n, mid) <= alpha) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

// Textbook HSV in degrees, converted to radians at the end.
inline Hsv RgbToHsv(double r, double g, double b) {
  const double mx = std::max({r, g, b});
  const double mn = std::min({r, g, b});
  const double c = mx - mn;
  double deg = 0.0;
  if (c > 0.0) {
    if (mx == r) {
      deg = 60.0 * std::fmod((g - b) / c + 6.0, 6.0);
    } else if (mx == g) {
      deg = 60.0 * ((b - r) / c + 2.0);
    } else {
      deg = 60.0 * ((r - g) / c + 4.0);
    }
  }
  return {deg * std::numbers::pi / 180.0, mx > 0.0 ? c / mx : 0.0, mx};
}

// Central differences of f at x.
inline std::vector<double> FiniteDifferenceGradient(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> x, double h = 1e-4) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    x[i] = xi + h;
    const double up = f(x);
    x[i] = xi - h;
    const double down = f(x);
    x[i] = xi;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

// Random image with components uniform on [lo, hi].
inline Image RandomImage(Rng& rng, int h, int w, double lo = 0.0,
                         double hi = 1.0) {
  std::vector<float> px(static_cast<std::size_t>(h) * w * 3);
  for (float& p : px) p = static_cast<float>(rng.Uniform(lo, hi));
  return Image(h, w, std::move(px));
}

// Random image whose global maximum is exactly 1.
inline Image RandomNormalizedImage(Rng& rng, int h, int w, double lo = 0.0) {
  Image img = RandomImage(rng, h, w, lo, 1.0);
  img.mutable_pixels()[rng.UniformInt(img.size())] = 1.0f;
  return img;
}

}  // namespace shiftcert::oracle

#endif  // SHIFTCERT_TESTS_ORACLES_H_
