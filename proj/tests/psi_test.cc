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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.h"
#include "shiftcert/error.h"
#include "shiftcert/psi.h"

namespace shiftcert {
namespace {

const PsiFn kGauss{PsiKind::kErfGaussian, 0.5};
const PsiFn kUniform{PsiKind::kLinearUniform, 2.0};
const PsiFn kZero{PsiKind::kZero, 0.0};

TEST(PsiEvalTest, Examples) {
  EXPECT_EQ(PsiEval({PsiKind::kErfGaussian, 3.0}, 0.0), 0.0);
  EXPECT_NEAR(kGauss(std::sqrt(2.0)), 0.842701, 1e-6);
  EXPECT_DOUBLE_EQ(kUniform(1.0), 0.5);
  EXPECT_DOUBLE_EQ(kUniform(5.0), 1.0);
  EXPECT_EQ(kZero(10.0), 0.0);
}

TEST(PsiEvalTest, MatchesIntegratedErf) {
  for (double eps = 0.05; eps < 4.0; eps += 0.173) {
    const double want = oracle::Erf(eps / (2.0 * std::sqrt(2.0) * 0.5));
    EXPECT_NEAR(kGauss(eps), want, 1e-12) << eps;
  }
}

TEST(PsiEvalTest, NeverBelowErf) {
  for (double eps = 0.0; eps < 5.0; eps += 0.01) {
    EXPECT_GE(kGauss(eps), std::erf(eps / (2.0 * std::sqrt(2.0) * 0.5)));
  }
}

TEST(PsiEvalTest, RejectsNegativeEpsilon) {
  try {
    kGauss(-0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNegativeEpsilon);
  }
}

TEST(PsiEvalTest, GaussianFormsAgree) {
  for (double sigma : {0.1, 0.5, 1.0, 2.5}) {
    const PsiFn psi{PsiKind::kErfGaussian, sigma};
    for (int i = 0; i < 100; ++i) {
      const double eps = 0.05 * i * sigma;
      EXPECT_NEAR(psi(eps), 2.0 * StandardNormalCdf(eps / (2.0 * sigma)) - 1.0,
                  1e-12);
    }
  }
}

TEST(PsiPropertyTest, ConcaveMonotoneBounded) {
  Rng rng(3);
  for (const PsiFn& psi : {kGauss, kUniform, kZero}) {
    for (int i = 0; i < 1000; ++i) {
      double a = rng.Uniform(0, 6), b = rng.Uniform(0, 6);
      if (a > b) std::swap(a, b);
      const double lambda = rng.Uniform();
      EXPECT_GE(psi(lambda * a + (1 - lambda) * b),
                lambda * psi(a) + (1 - lambda) * psi(b) - 1e-12);
      EXPECT_LE(psi(a), psi(b));
      EXPECT_GE(psi(a), 0.0);
      EXPECT_LE(psi(b), 1.0);
    }
  }
}

TEST(PsiFnTest, InverseHitsTarget) {
  for (double p : {0.01, 0.3, 0.5, 0.99}) {
    EXPECT_NEAR(kGauss(kGauss.Inverse(p)), p, 1e-12);
    EXPECT_NEAR(kUniform(kUniform.Inverse(p)), p, 1e-12);
  }
  EXPECT_FALSE(kZero.invertible());
  EXPECT_THROW(kGauss.Inverse(1.0), Error);
}

TEST(PairPsiTest, Pairings) {
  const PsiFn g = PairPsi(SmoothingSpec::GaussianParam(0.4));
  EXPECT_EQ(g.kind, PsiKind::kErfGaussian);
  EXPECT_EQ(g.scale, 0.4);
  EXPECT_EQ(PairPsi(SmoothingSpec::PixelGaussian(0.3)).kind,
            PsiKind::kErfGaussian);
  const PsiFn u = PairPsi(SmoothingSpec::UniformParam(0.7));
  EXPECT_EQ(u.kind, PsiKind::kLinearUniform);
  EXPECT_EQ(u.scale, 0.7);
  EXPECT_EQ(PairPsi(SmoothingSpec::UniformHue()).kind, PsiKind::kZero);
  EXPECT_EQ(PairPsi(SmoothingSpec::ChannelSelect()).kind, PsiKind::kZero);
}

TEST(TvOracleTest, Examples) {
  const auto g1 = SmoothingSpec::GaussianParam(1.0);
  const TvEstimate zero = TvOracle(g1, {TransformKind::kColorShift, {0, 0, 0}},
                                   1000, 1);
  EXPECT_EQ(zero.exact, 0.0);
  const TvEstimate two =
      TvOracle(g1, {TransformKind::kColorShift, {2, 0, 0}}, 100000, 2);
  EXPECT_NEAR(two.exact, 0.682689, 1e-6);
  EXPECT_NEAR(two.exact, 2 * oracle::NormalCdf(1.0) - 1, 1e-10);
  EXPECT_NEAR(two.mc, two.exact, 4 * two.mc_stderr);

  const TvEstimate box = TvOracle(SmoothingSpec::UniformParam(1.0),
                                  {TransformKind::kSvShift, {0.3, 0}}, 100000, 3);
  EXPECT_NEAR(box.exact, 0.3, 1e-12);
  EXPECT_NEAR(box.mc, 0.3, 4 * box.mc_stderr);

  const TvEstimate hue = TvOracle(SmoothingSpec::UniformHue(),
                                  {TransformKind::kHueShift, {1.0}}, 10, 4);
  EXPECT_EQ(hue.exact, 0.0);
  EXPECT_EQ(hue.mc, 0.0);
}

TEST(TvOracleTest, RejectsMismatchedParameter) {
  try {
    TvOracle(SmoothingSpec::GaussianParam(1.0),
             {TransformKind::kSvShift, {0.1, 0.1}}, 10, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnsupported);
  }
}

TEST(TvOracleTest, HueUsesMinimalRotation) {
  const auto spec = SmoothingSpec::GaussianParam(0.5, TransformKind::kHueShift);
  const TvEstimate a = TvOracle(spec, {TransformKind::kHueShift, {0.3}}, 10, 1);
  const TvEstimate b =
      TvOracle(spec, {TransformKind::kHueShift, {0.3 - kTwoPi}}, 10, 1);
  EXPECT_NEAR(a.exact, b.exact, 1e-12);
}

TEST(TvOracleTest, BoundedByPsiOnRandomParameters) {
  Rng rng(7);
  const auto gauss = SmoothingSpec::GaussianParam(0.7);
  const auto unif = SmoothingSpec::UniformParam(0.8);
  for (int i = 0; i < 50; ++i) {
    const ParamVector cs{TransformKind::kColorShift,
                         {rng.Normal(), rng.Normal(), rng.Normal()}};
    const TvEstimate g = TvOracle(gauss, cs, 20000, Mix64(i));
    const double pg = PairPsi(gauss)(TransformDistance(cs));
    EXPECT_LE(g.exact, pg + 1e-9);
    EXPECT_TRUE(TvWithinPsi(g, pg)) << g.mc << " vs " << pg;

    const ParamVector sv{TransformKind::kSvShift,
                         {rng.Uniform(0, 1.2), rng.Uniform(0, 1.2)}};
    const TvEstimate u = TvOracle(unif, sv, 20000, Mix64(i + 100));
    const double pu = PairPsi(unif)(TransformDistance(sv));
    EXPECT_LE(u.exact, pu + 1e-9);
    EXPECT_TRUE(TvWithinPsi(u, pu)) << u.mc << " vs " << pu;
  }
}

TEST(TvWithinPsiTest, SaturatedMonteCarloIsNotAFalseAlarm) {
  // Rare draws below 1 are missing at this size, so the empirical error is
  // far too small; the floored error still accepts.
  const auto spec = SmoothingSpec::GaussianParam(1.0);
  const ParamVector theta{TransformKind::kColorShift, {7.455, 0, 0}};
  const TvEstimate tv = TvOracle(spec, theta, 2000, 11);
  EXPECT_EQ(tv.mc_samples, 2000u);
  EXPECT_TRUE(TvWithinPsi(tv, PairPsi(spec)(7.455)));
}

TEST(TvWithinPsiTest, RejectsClearViolations) {
  TvEstimate tv;
  tv.exact = 0.5;
  tv.mc = 0.5;
  tv.mc_stderr = 0.001;
  tv.mc_samples = 100000;
  EXPECT_TRUE(TvWithinPsi(tv, 0.5));
  EXPECT_FALSE(TvWithinPsi(tv, 0.45));
  tv.exact = 0.3;
  EXPECT_FALSE(TvWithinPsi(tv, 0.45));
  tv.exact = 0.0;
  tv.mc = 0.02;
  tv.mc_stderr = 0.0;
  EXPECT_FALSE(TvWithinPsi(tv, 0.0));
}

}  // namespace
}  // namespace shiftcert
