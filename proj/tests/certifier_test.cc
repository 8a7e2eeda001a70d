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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "shiftcert/certifier.h"
#include "shiftcert/classifier.h"
#include "shiftcert/error.h"

namespace shiftcert {
namespace {

// Always predicts class 0.
class ConstantClassifier final : public Classifier {
 public:
  int num_classes() const override { return 2; }
  double Score(const Image&, int label) const override {
    return label == 0 ? 1.0 : 0.0;
  }
  nlohmann::json ToJson() const override { return {{"kind", "constant"}}; }
};

class AlwaysRight final : public Classifier {
 public:
  int num_classes() const override { return 2; }
  double Score(const Image&, int) const override { return 1.0; }
  nlohmann::json ToJson() const override { return {{"kind", "right"}}; }
};

class HalfScore final : public Classifier {
 public:
  int num_classes() const override { return 2; }
  double Score(const Image&, int) const override { return 0.5; }
  nlohmann::json ToJson() const override { return {{"kind", "half"}}; }
};

class BadScore final : public Classifier {
 public:
  int num_classes() const override { return 2; }
  double Score(const Image&, int) const override { return 2.0; }
  nlohmann::json ToJson() const override { return {{"kind", "bad"}}; }
};

Dataset FortyPercentZero() {
  Dataset ds = GenerateSynthetic(100, 2, 4, 3);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    ds.samples[i].label = i % 5 < 2 ? 0 : 1;
  }
  return ds;
}

std::vector<ScoreRecord> Records(int ones, int n) {
  std::vector<ScoreRecord> out(n);
  for (int i = 0; i < n; ++i) {
    out[i].sample_id = i;
    out[i].score = i < ones ? 1.0 : 0.0;
  }
  return out;
}

TEST(EvaluateSmoothedTest, ConstantClassifierMean) {
  const Dataset ds = FortyPercentZero();
  const auto recs = EvaluateSmoothed(ds, ConstantClassifier(),
                                     SmoothingSpec::GaussianParam(0.5),
                                     SeedPolicy{1});
  EXPECT_DOUBLE_EQ(MeanScore(recs), 0.40);
}

TEST(EvaluateSmoothedTest, ZeroSigmaEqualsPlain) {
  const Dataset ds = GenerateSynthetic(200, 3, 6, 4);
  TrainConfig cfg;
  cfg.epochs = 3;
  const LogisticModel m = TrainLogistic(ds, cfg);
  const auto smooth = EvaluateSmoothed(ds, m, SmoothingSpec::PixelGaussian(0.0),
                                       SeedPolicy{5});
  const auto plain = EvaluatePlain(ds, m);
  ASSERT_EQ(smooth.size(), plain.size());
  for (std::size_t i = 0; i < plain.size(); ++i) {
    EXPECT_EQ(smooth[i].score, plain[i].score);
  }
}

TEST(EvaluateSmoothedTest, DeterministicAndThreadInvariant) {
  const Dataset ds = GenerateSynthetic(300, 3, 6, 4);
  const LogisticModel m = TrainLogistic(ds, TrainConfig{});
  const auto spec = SmoothingSpec::GaussianParam(0.8);
  const auto a = EvaluateSmoothed(ds, m, spec, SeedPolicy{7}, 1);
  const auto b = EvaluateSmoothed(ds, m, spec, SeedPolicy{7}, 1);
  const auto c = EvaluateSmoothed(ds, m, spec, SeedPolicy{7}, 4);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
  const auto d = EvaluateSmoothed(ds, m, spec, SeedPolicy{8}, 1);
  EXPECT_NE(a, d);
}

TEST(EvaluateSmoothedTest, OneCallPerSample) {
  const Dataset ds = GenerateSynthetic(123, 2, 4, 4);
  const AlwaysRight inner;
  for (const auto& spec :
       {SmoothingSpec::GaussianParam(0.5), SmoothingSpec::UniformHue(),
        SmoothingSpec::ChannelSelect(), SmoothingSpec::PixelGaussian(0.3)}) {
    const CountingClassifier counter(inner);
    EvaluateSmoothed(ds, counter, spec, SeedPolicy{1}, 3);
    EXPECT_EQ(counter.calls(), ds.size());
  }
}

TEST(EvaluateSmoothedTest, DegenerateDrawsScoreZero) {
  Dataset ds = GenerateSynthetic(600, 2, 2, 1);
  std::vector<Image> red;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    red.push_back(Image(2, 2, {1, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0, 0}));
  }
  ds = ds.WithImages(red);
  const auto recs = EvaluateSmoothed(ds, AlwaysRight(),
                                     SmoothingSpec::ChannelSelect(), SeedPolicy{2});
  int degenerate = 0;
  for (const auto& r : recs) {
    if (r.degenerate) {
      ++degenerate;
      EXPECT_EQ(r.score, 0.0);
    }
  }
  EXPECT_NEAR(degenerate / 600.0, 2.0 / 3.0, 0.06);
  EXPECT_NEAR(MeanScore(recs), 1.0 / 3.0, 0.06);
}

TEST(EvaluateSmoothedTest, OutOfRangeScoreFails) {
  const Dataset ds = GenerateSynthetic(5, 2, 4, 4);
  try {
    EvaluateSmoothed(ds, BadScore(), SmoothingSpec::GaussianParam(0.5),
                     SeedPolicy{1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kScorerFailure);
  }
  EXPECT_THROW(MeanScore(std::vector<ScoreRecord>{}), Error);
}

TEST(CertifyTest, ZeroPsiGivesFlatCurve) {
  const auto recs = Records(950, 1000);
  const auto curve = Certify(recs, PsiFn{PsiKind::kZero, 0.0}, 0.001,
                             {0.0, 0.5, 1.0, 10.0});
  EXPECT_DOUBLE_EQ(curve.p_lower, ClopperPearsonLower(950, 1000, 0.001));
  for (double v : curve.lower_bounds) EXPECT_EQ(v, curve.p_lower);
  EXPECT_EQ(curve.bound_kind, BoundKind::kClopperPearson);
}

TEST(CertifyTest, GaussianSubtractsPsi) {
  const auto recs = Records(950, 1000);
  const PsiFn psi{PsiKind::kErfGaussian, 0.5};
  const auto curve = Certify(recs, psi, 0.001, {0.0, std::sqrt(2.0), 5.0});
  EXPECT_NEAR(curve.lower_bounds[1], curve.p_lower - 0.842701, 1e-6);
  EXPECT_EQ(curve.At(std::sqrt(2.0)), curve.lower_bounds[1]);
  EXPECT_EQ(curve.lower_bounds[0], curve.p_lower);
  EXPECT_EQ(curve.lower_bounds[2], 0.0);
}

TEST(CertifyTest, FloorsAtZero) {
  const auto recs = Records(25, 100);
  const PsiFn psi{PsiKind::kLinearUniform, 2.0};
  const auto curve = Certify(recs, psi, 0.05, {1.0});
  ASSERT_LT(curve.p_lower, 0.5);
  EXPECT_EQ(curve.lower_bounds[0], 0.0);
}

TEST(CertifyTest, RealScoresUseHoeffding) {
  std::vector<ScoreRecord> recs(200);
  for (auto& r : recs) r.score = 0.5;
  const auto curve =
      Certify(recs, PsiFn{PsiKind::kZero, 0.0}, 0.01, {0.0});
  EXPECT_EQ(curve.bound_kind, BoundKind::kHoeffding);
  EXPECT_DOUBLE_EQ(curve.p_lower, HoeffdingLower(0.5, 200, 0.01));
  EXPECT_EQ(curve.Metadata()["bound"], "hoeffding");
}

TEST(CertifyTest, CurveInvariants) {
  const auto recs = Records(800, 1000);
  for (const PsiFn& psi : {PsiFn{PsiKind::kErfGaussian, 0.3},
                           PsiFn{PsiKind::kLinearUniform, 0.7},
                           PsiFn{PsiKind::kZero, 0.0}}) {
    const auto grid = DefaultEpsilonGrid(psi);
    EXPECT_EQ(grid.size(), 64u);
    const auto curve = Certify(recs, psi, kDefaultAlpha, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      EXPECT_GE(curve.lower_bounds[i], 0.0);
      EXPECT_LE(curve.lower_bounds[i], 1.0);
      if (i > 0) {
        EXPECT_GT(grid[i], grid[i - 1]);
        EXPECT_LE(curve.lower_bounds[i], curve.lower_bounds[i - 1]);
      }
    }
    if (psi.invertible()) {
      EXPECT_NEAR(psi(grid.front()), 0.01, 1e-9);
      EXPECT_NEAR(psi(grid.back()), 0.99, 1e-9);
    }
  }
}

TEST(CertifyTest, CsvAndErrors) {
  const auto recs = Records(9, 10);
  const auto curve =
      Certify(recs, PsiFn{PsiKind::kZero, 0.0}, 0.05, {0.0, 1.0});
  const std::string csv = curve.ToCsv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "epsilon,lower_bound");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  EXPECT_THROW(Certify(std::vector<ScoreRecord>{}, PsiFn{}, 0.05, {0.0}),
               Error);
  EXPECT_THROW(Certify(recs, PsiFn{}, 0.05, {1.0, 0.5}), Error);
  EXPECT_THROW(Certify(recs, PsiFn{}, 0.05, {-1.0}), Error);
}

ShiftPair Pair(std::uint32_t id, double dist, int a = 0, int b = 0) {
  return {id, Image(1, 1), a, b, dist};
}

TEST(WassersteinTest, Examples) {
  EXPECT_EQ(WassersteinUpperBound(std::vector<ShiftPair>{Pair(0, 0), Pair(1, 0)}),
            0.0);
  EXPECT_DOUBLE_EQ(WassersteinUpperBound(std::vector<ShiftPair>{
                       Pair(0, 0), Pair(1, 0), Pair(2, 3)}),
                   1.0);
  std::vector<ShiftPair> attacked;
  for (std::uint32_t i = 0; i < 100; ++i) attacked.push_back(Pair(i, i < 30 ? 2.0 : 0.0));
  EXPECT_NEAR(WassersteinUpperBound(attacked), 0.6, 1e-12);
  try {
    WassersteinUpperBound(std::vector<ShiftPair>{Pair(0, 1, 0, 1)});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kLabelMismatch);
  }
  EXPECT_THROW(WassersteinUpperBound(std::vector<ShiftPair>{}), Error);
  EXPECT_THROW(WassersteinUpperBound(std::vector<ShiftPair>{Pair(0, -1)}),
               Error);
}

TEST(TransformShiftTest, MeanDistanceAndLabels) {
  const Dataset ds = GenerateSynthetic(200, 3, 4, 1);
  for (TransformKind kind : {TransformKind::kColorShift, TransformKind::kSvShift,
                             TransformKind::kHueShift}) {
    const ShiftedData sh = BuildTransformShift(ds, kind, 0.5, 9);
    ASSERT_EQ(sh.data.size(), ds.size());
    const auto pairs = MakeShiftPairs(ds, sh.data, sh.distances);
    EXPECT_NEAR(WassersteinUpperBound(pairs), 0.5, 1e-9);
    for (std::size_t i = 0; i < ds.size(); ++i) {
      EXPECT_EQ(sh.data.samples[i].label, ds.samples[i].label);
    }
  }
}

TEST(GapCheckTest, IdenticalDataPasses) {
  const Dataset ds = GenerateSynthetic(1000, 3, 6, 4);
  const LogisticModel m = TrainLogistic(ds, TrainConfig{});
  const auto spec = SmoothingSpec::GaussianParam(0.5);
  const auto a = EvaluateSmoothed(ds, m, spec, SeedPolicy{1});
  const auto b = EvaluateSmoothed(ds, m, spec, SeedPolicy{2});
  const GapReport r = GapCheck(a, b, PairPsi(spec), 0.0);
  EXPECT_NEAR(r.slack, 3.0 * std::sqrt(std::log(200.0) / 2000.0), 1e-12);
  EXPECT_EQ(r.psi, 0.0);
  EXPECT_TRUE(r.pass);
}

TEST(GapCheckTest, HueShiftUnderHueSmoothing) {
  const Dataset ds = GenerateSynthetic(1000, 3, 6, 4);
  TrainConfig cfg;
  cfg.noise = SmoothingSpec::UniformHue();
  const LogisticModel m = TrainLogistic(ds, cfg);
  const auto spec = SmoothingSpec::UniformHue();
  const auto clean = EvaluateSmoothed(ds, m, spec, SeedPolicy{1});
  for (double angle : {0.5, 2.0, 3.0}) {
    const ShiftedData sh =
        BuildTransformShift(ds, TransformKind::kHueShift, angle, 3);
    const auto shifted = EvaluateSmoothed(sh.data, m, spec, SeedPolicy{2});
    const GapReport r = GapCheck(clean, shifted, PairPsi(spec), angle);
    EXPECT_TRUE(r.pass) << angle << " gap " << r.gap;
  }
}

TEST(GapCheckTest, GaussianColorShift) {
  const Dataset ds = GenerateSynthetic(1000, 3, 6, 4);
  const auto spec = SmoothingSpec::GaussianParam(0.5);
  TrainConfig cfg;
  cfg.noise = spec;
  const LogisticModel m = TrainLogistic(ds, cfg);
  const PsiFn psi = PairPsi(spec);
  const double eps = psi.Inverse(0.3);
  const auto clean = EvaluateSmoothed(ds, m, spec, SeedPolicy{1});
  const ShiftedData sh =
      BuildTransformShift(ds, TransformKind::kColorShift, eps, 5);
  const auto shifted = EvaluateSmoothed(sh.data, m, spec, SeedPolicy{2});
  const GapReport r = GapCheck(clean, shifted, psi, eps);
  EXPECT_NEAR(r.psi, 0.3, 1e-9);
  EXPECT_TRUE(r.pass) << r.gap;
}

}  // namespace
}  // namespace shiftcert
