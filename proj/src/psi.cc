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

#include "shiftcert/psi.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/erf.hpp>

#include "shiftcert/error.h"
#include "shiftcert/random.h"

namespace shiftcert {
namespace {

constexpr double kTwoSqrtTwo = 2.0 * std::numbers::sqrt2;

double RoundUpProbability(double p) {
  if (p <= 0.0) return 0.0;
  return std::min(1.0, std::nextafter(p, 2.0));
}

struct MeanAccumulator {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t n = 0;

  void Add(double x) {
    sum += x;
    sum_sq += x * x;
    ++n;
  }
  double Mean() const { return n == 0 ? 0.0 : sum / static_cast<double>(n); }
  double StdErr() const {
    if (n < 2) return 0.0;
    const double m = Mean();
    const double var =
        std::max(0.0, (sum_sq - static_cast<double>(n) * m * m) /
                          static_cast<double>(n - 1));
    return std::sqrt(var / static_cast<double>(n));
  }
};

// E_{z ~ N(0, sigma^2 I)} [max(0, 1 - q(z)/p(z))] with q the density shifted
// by theta. Equals TV(N(0, sigma^2 I), N(theta, sigma^2 I)).
TvEstimate GaussianMonteCarlo(const std::vector<double>& shift, double sigma,
                              std::size_t n_samples, std::uint64_t seed) {
  double norm_sq = 0.0;
  for (double t : shift) norm_sq += t * t;
  TvEstimate est;
  if (norm_sq == 0.0) return est;
  if (sigma <= 0.0) {
    est.exact = est.mc = 1.0;
    return est;
  }
  const double inv_var = 1.0 / (sigma * sigma);
  Rng rng(seed);
  MeanAccumulator acc;
  for (std::size_t i = 0; i < n_samples; ++i) {
    double dot = 0.0;
    for (double t : shift) dot += sigma * rng.Normal() * t;
    const double log_ratio = (dot - 0.5 * norm_sq) * inv_var;
    acc.Add(std::max(0.0, 1.0 - std::exp(std::min(log_ratio, 0.0))));
  }
  est.exact = 2.0 * StandardNormalCdf(std::sqrt(norm_sq) / (2.0 * sigma)) - 1.0;
  est.mc = acc.Mean();
  est.mc_stderr = acc.StdErr();
  est.mc_samples = n_samples;
  return est;
}

}  // namespace

double StandardNormalCdf(double z) {
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

bool TvWithinPsi(const TvEstimate& tv, double psi) {
  if (!(tv.exact <= psi + 1e-9)) return false;
  double se = tv.mc_stderr;
  if (tv.mc_samples > 0) {
    se = std::max(se, std::sqrt(std::max(0.0, psi * (1.0 - psi)) /
                                static_cast<double>(tv.mc_samples)));
  }
  return tv.mc <= psi + 3.0 * se + 1e-12;
}

double PsiFn::operator()(double eps) const { return PsiEval(*this, eps); }

double PsiFn::Inverse(double p) const {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorCode::kInvalidArgs, "psi inverse needs p in (0, 1)");
  }
  switch (kind) {
    case PsiKind::kErfGaussian:
      return kTwoSqrtTwo * scale * boost::math::erf_inv(p);
    case PsiKind::kLinearUniform:
      return p * scale;
    case PsiKind::kZero:
      break;
  }
  throw Error(ErrorCode::kUnsupported, "zero psi has no inverse");
}

std::string PsiFn::Describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case PsiKind::kErfGaussian:
      os << "erf(eps/(2*sqrt(2)*" << scale << "))";
      break;
    case PsiKind::kLinearUniform:
      os << "min(eps/" << scale << ",1)";
      break;
    case PsiKind::kZero:
      os << "0";
      break;
  }
  return os.str();
}

nlohmann::json PsiFn::ToJson() const {
  static constexpr const char* kNames[] = {"erf_gaussian", "linear_uniform",
                                           "zero"};
  return {{"kind", kNames[static_cast<int>(kind)]},
          {"scale", scale},
          {"formula", Describe()}};
}

double PsiEval(const PsiFn& psi, double eps) {
  if (std::isnan(eps) || eps < 0.0) {
    throw Error(ErrorCode::kNegativeEpsilon, "psi needs eps >= 0");
  }
  switch (psi.kind) {
    case PsiKind::kErfGaussian:
      if (eps == 0.0) return 0.0;
      if (psi.scale <= 0.0) return 1.0;
      return RoundUpProbability(std::erf(eps / (kTwoSqrtTwo * psi.scale)));
    case PsiKind::kLinearUniform:
      return std::min(eps / psi.scale, 1.0);
    case PsiKind::kZero:
      return 0.0;
  }
  return 1.0;
}

PsiFn PairPsi(const SmoothingSpec& spec) {
  switch (spec.kind) {
    case SmoothingKind::kGaussianParam:
    case SmoothingKind::kPixelGaussian:
      return {PsiKind::kErfGaussian, spec.scale};
    case SmoothingKind::kUniformParam:
      return {PsiKind::kLinearUniform, spec.scale};
    case SmoothingKind::kUniformHue:
    case SmoothingKind::kChannelSelect:
      return {PsiKind::kZero, 0.0};
  }
  throw Error(ErrorCode::kUnsupported, "no psi for " + spec.Name());
}

TvEstimate TvOracle(const SmoothingSpec& spec, const ParamVector& theta,
                    std::size_t n_samples, std::uint64_t seed) {
  if (theta.kind != spec.transform) {
    throw Error(ErrorCode::kUnsupported,
                std::string(TransformKindName(theta.kind)) +
                    " parameter does not pair with " + spec.Name());
  }
  theta.Validate();
  switch (spec.kind) {
    case SmoothingKind::kGaussianParam:
    case SmoothingKind::kPixelGaussian: {
      if (theta.kind == TransformKind::kHueShift) {
        // Rotations by theta and theta - 2 pi give the same wrapped
        // distribution; the shorter one bounds the TV.
        return GaussianMonteCarlo({TransformDistance(theta)}, spec.scale,
                                  n_samples, seed);
      }
      return GaussianMonteCarlo(theta.values, spec.scale, n_samples, seed);
    }
    case SmoothingKind::kUniformParam: {
      TvEstimate est;
      double overlap = 1.0;
      for (double t : theta.values) {
        overlap *= std::max(0.0, 1.0 - std::abs(t) / spec.scale);
      }
      est.exact = 1.0 - overlap;
      // Fraction of U[0,a]^d mass outside the shifted box; the densities
      // agree on the overlap, so this is the TV.
      Rng rng(seed);
      MeanAccumulator acc;
      for (std::size_t i = 0; i < n_samples; ++i) {
        bool inside = true;
        for (double t : theta.values) {
          const double z = rng.Uniform(0.0, spec.scale);
          inside = inside && z >= t && z <= t + spec.scale;
        }
        acc.Add(inside ? 0.0 : 1.0);
      }
      est.mc = acc.Mean();
      est.mc_stderr = acc.StdErr();
      est.mc_samples = n_samples;
      return est;
    }
    case SmoothingKind::kUniformHue:
    case SmoothingKind::kChannelSelect:
      return {};
  }
  throw Error(ErrorCode::kUnsupported, "no TV oracle for " + spec.Name());
}

}  // namespace shiftcert
