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
#include <limits>
#include <vector>

#include "shiftcert/adversary.h"
#include "shiftcert/certifier.h"
#include "shiftcert/error.h"
#include "shiftcert/random.h"

namespace shiftcert {
namespace {

constexpr std::size_t kFeatures = 12;

// Class 1 iff w . x + b > 0.
LogisticModel Binary(const std::vector<double>& w, double b) {
  std::vector<double> weights(2 * kFeatures, 0.0);
  std::copy(w.begin(), w.end(), weights.begin() + kFeatures);
  return LogisticModel(2, kFeatures, weights, {0.0, b});
}

Image Fill(const std::vector<float>& px) { return Image(2, 2, px); }

Image RandomInterior(Rng& rng, double lo = 0.3, double hi = 0.7) {
  std::vector<float> px(kFeatures);
  for (float& v : px) v = static_cast<float>(rng.Uniform(lo, hi));
  return Fill(px);
}

double Distance(const Image& a, const Image& b) { return L2Distance(a, b); }

// Labels follow the first pixel; pixels stay away from the clamp.
Dataset InteriorDataset(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Dataset ds;
  ds.num_classes = 2;
  for (std::size_t i = 0; i < n; ++i) {
    Image img = RandomInterior(rng);
    const int label = img.pixels()[0] > 0.5f ? 1 : 0;
    ds.samples.push_back({static_cast<std::uint32_t>(i), img, label});
  }
  return ds;
}

std::vector<double> FirstAxis() {
  std::vector<double> w(kFeatures, 0.0);
  w[0] = 1.0;
  return w;
}

TEST(MinL2AttackTest, MisclassifiedIsUntouched) {
  const LogisticModel m = Binary(FirstAxis(), 0.0);
  const Image img = Fill(std::vector<float>(kFeatures, 0.3f));
  const LinearAttack a = MinL2AttackLinear(m, img, 0);
  EXPECT_EQ(a.required_norm, 0.0);
  EXPECT_EQ(a.actual_norm, 0.0);
  EXPECT_EQ(a.adversarial, img);
}

TEST(MinL2AttackTest, AnalyticMargin) {
  const LogisticModel m = Binary(FirstAxis(), 0.0);
  const Image img = Fill(std::vector<float>(kFeatures, 0.3f));
  const LinearAttack a = MinL2AttackLinear(m, img, 1);
  EXPECT_NEAR(a.required_norm, static_cast<double>(0.3f) + kAttackOvershoot, 1e-12);
  EXPECT_EQ(m.Predict(a.adversarial), 0);
}

TEST(MinL2AttackTest, FlipsUnclampedInstances) {
  Rng rng(12);
  int checked = 0;
  while (checked < 100) {
    std::vector<double> w(kFeatures);
    for (double& v : w) v = rng.Normal();
    const LogisticModel m = Binary(w, rng.Normal(0.0, 0.3));
    const Image img = RandomInterior(rng);
    const int label = m.Predict(img);
    const LinearAttack a = MinL2AttackLinear(m, img, label);
    if (std::abs(a.actual_norm - a.required_norm) > 1e-5) continue;
    ++checked;
    EXPECT_NE(m.Predict(a.adversarial), label);
    EXPECT_NEAR(Distance(a.adversarial, img), a.required_norm, 1e-5);
  }
}

TEST(MinL2AttackTest, RejectsMulticlass) {
  const LogisticModel m(3, kFeatures);
  try {
    MinL2AttackLinear(m, Fill(std::vector<float>(kFeatures, 0.5f)), 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnsupportedKind);
  }
}

TEST(StrategicAttackTest, ZeroGammaAttacksNothing) {
  const Dataset ds = InteriorDataset(200, 1);
  const LogisticModel m = Binary(FirstAxis(), -0.52);
  const AttackOutcome out = StrategicAttack(ds, m, 0.0);
  EXPECT_EQ(out.wasserstein_bound, 0.0);
  EXPECT_EQ(out.attacked_fraction, 0.0);
  EXPECT_DOUBLE_EQ(out.accuracy, Accuracy(m, ds));
  EXPECT_EQ(out.shifted, ds);
}

TEST(StrategicAttackTest, InfiniteGammaAttacksAllCorrect) {
  const Dataset ds = InteriorDataset(200, 2);
  const LogisticModel m = Binary(FirstAxis(), -0.52);
  const double clean = Accuracy(m, ds);
  ASSERT_GT(clean, 0.8);
  const AttackOutcome out =
      StrategicAttack(ds, m, std::numeric_limits<double>::infinity());
  EXPECT_EQ(out.accuracy, 0.0);
  EXPECT_NEAR(out.attacked_fraction, clean, 1e-12);
  double sum = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    sum += out.norms[i];
    EXPECT_NEAR(out.norms[i],
                Distance(out.shifted.samples[i].image, ds.samples[i].image),
                1e-5);
  }
  EXPECT_NEAR(out.wasserstein_bound, sum / ds.size(), 1e-12);
}

TEST(StrategicAttackTest, GammaBetweenTwoSamples) {
  Dataset ds;
  ds.num_classes = 2;
  std::vector<float> near(kFeatures, 0.5f), far(kFeatures, 0.5f);
  near[0] = 0.6f;  // margin 0.1
  far[0] = 0.9f;   // margin 0.4
  ds.samples = {{0, Fill(near), 1}, {1, Fill(far), 1}};
  const LogisticModel m = Binary(FirstAxis(), -0.5);
  const AttackOutcome out = StrategicAttack(ds, m, 0.25);
  EXPECT_EQ(out.attacked[0], 1);
  EXPECT_EQ(out.attacked[1], 0);
  EXPECT_EQ(out.accuracy, 0.5);
}

TEST(StrategicAttackTest, TradeoffIsMonotone) {
  const Dataset ds = GenerateSynthetic(300, 2, 4, 3);
  const LogisticModel m = TrainLogistic(ds, TrainConfig{});
  double prev_bound = -1.0, prev_miss = -1.0;
  for (double gamma : {0.0, 0.1, 0.25, 0.5, 1.0, 2.0, 4.0}) {
    const AttackOutcome out = StrategicAttack(ds, m, gamma, 2);
    EXPECT_GE(out.wasserstein_bound, prev_bound);
    EXPECT_GE(out.misclassification_rate, prev_miss);
    prev_bound = out.wasserstein_bound;
    prev_miss = out.misclassification_rate;
  }
}

TEST(StrategicAttackTest, MulticlassUsesPgdAndStaysAccounted) {
  const Dataset ds = GenerateSynthetic(60, 3, 4, 3);
  const LogisticModel m = TrainLogistic(ds, TrainConfig{});
  const AttackOutcome out = StrategicAttack(ds, m, 1.0, 2);
  EXPECT_GT(out.attacked_fraction, 0.0);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const double d = Distance(out.shifted.samples[i].image, ds.samples[i].image);
    EXPECT_NEAR(out.norms[i], d, 1e-5);
    EXPECT_LT(out.norms[i], 1.0 + 1e-6);
    if (out.attacked[i]) {
      EXPECT_NE(m.Predict(out.shifted.samples[i].image), ds.samples[i].label);
    }
  }
}

TEST(PgdTest, ZeroStepsIsIdentity) {
  Rng rng(1);
  const LogisticModel m = Binary(FirstAxis(), -0.5);
  const Image img = RandomInterior(rng);
  EXPECT_EQ(PgdAttack(m, img, 1, 0.5, 0, PgdLoss::Plain()), img);
}

TEST(PgdTest, StaysInBallAndBox) {
  Rng rng(2);
  const Dataset ds = GenerateSynthetic(20, 3, 4, 3);
  const LogisticModel m = TrainLogistic(ds, TrainConfig{});
  for (const Sample& s : ds.samples) {
    for (double e : {0.05, 0.5, 3.0}) {
      for (const PgdLoss& loss :
           {PgdLoss::Plain(),
            PgdLoss::Smoothed(SmoothingSpec::PixelGaussian(0.25), 4,
                              SeedPolicy{3}, s.id, s.image.size())}) {
        const Image adv = PgdAttack(m, s.image, s.label, e, 20, loss);
        EXPECT_LE(Distance(adv, s.image), e + 1e-6);
        for (float v : adv.pixels()) {
          EXPECT_GE(v, 0.0f);
          EXPECT_LE(v, 1.0f);
        }
      }
    }
  }
}

TEST(PgdTest, MatchesAnalyticAttackOnLinearModel) {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> w(kFeatures);
    for (double& v : w) v = rng.Normal();
    const LogisticModel m = Binary(w, 0.0);
    const Image img = RandomInterior(rng, 0.4, 0.6);
    const int label = trial % 2;
    const double e = 0.05;
    const Image adv = PgdAttack(m, img, label, e, 200, PgdLoss::Plain());
    // Analytic optimum: move along the sign-adjusted weight direction.
    double norm = 0.0;
    for (double v : w) norm += v * v;
    norm = std::sqrt(norm);
    std::vector<double> x(img.pixels().begin(), img.pixels().end());
    const double sign = label == 1 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < kFeatures; ++i) x[i] += sign * e * w[i] / norm;
    EXPECT_GE(m.Loss(ToFeatures(adv), label), m.Loss(x, label) - 1e-3);
  }
}

TEST(PgdTest, SmoothedLossRequiresPixelNoise) {
  EXPECT_THROW(PgdLoss::Smoothed(SmoothingSpec::GaussianParam(0.5), 4,
                                 SeedPolicy{1}, 0, kFeatures),
               Error);
}

AttackBudget SmallBudget() {
  AttackBudget b;
  b.magnitude_grid = {0.25, 0.5, 1.0, 2.0};
  b.steps = 10;
  b.gradient_draws = 4;
  b.selection_draws = 30;
  b.evaluation_draws = 30;
  return b;
}

TEST(AttackBudgetTest, Validation) {
  AttackBudget b;
  EXPECT_EQ(b.magnitude_grid.size(), 16u);
  EXPECT_EQ(b.magnitude_grid.front(), 0.125);
  EXPECT_EQ(b.magnitude_grid.back(), 2.0);
  b.Validate();
  b.magnitude_grid = {0.5, 0.25};
  EXPECT_THROW(b.Validate(), Error);
  b = AttackBudget{};
  b.steps = 0;
  EXPECT_THROW(b.Validate(), Error);
}

TEST(AdaptiveAttackTest, InfiniteGammaMatchesClean) {
  const Dataset ds = GenerateSynthetic(40, 2, 4, 5);
  const auto spec = SmoothingSpec::PixelGaussian(0.5);
  TrainConfig cfg;
  cfg.noise = spec;
  const LogisticModel m = TrainLogistic(ds, cfg);
  const AdaptiveTable table =
      PrepareAdaptiveAttack(ds, m, spec, SmallBudget(), SeedPolicy{4}, 2);
  const AttackOutcome out =
      SelectAdaptiveAttack(table, std::numeric_limits<double>::infinity());
  EXPECT_EQ(out.attacked_fraction, 0.0);
  EXPECT_EQ(out.wasserstein_bound, 0.0);
  EXPECT_EQ(out.scores, table.clean_score);
  EXPECT_EQ(out.shifted, ds);
}

TEST(AdaptiveAttackTest, SelectionMonotoneInGamma) {
  const Dataset ds = GenerateSynthetic(40, 2, 4, 6);
  const auto spec = SmoothingSpec::PixelGaussian(0.5);
  const LogisticModel m = TrainLogistic(ds, TrainConfig{});
  const AdaptiveTable table =
      PrepareAdaptiveAttack(ds, m, spec, SmallBudget(), SeedPolicy{4}, 2);
  std::vector<std::uint8_t> prev(ds.size(), 0);
  for (double gamma : {2.0, 1.0, 0.5, 0.25, 0.1, 0.0}) {
    const AttackOutcome out = SelectAdaptiveAttack(table, gamma);
    for (std::size_t i = 0; i < ds.size(); ++i) {
      EXPECT_GE(out.attacked[i], prev[i]);
      if (out.attacked[i]) {
        EXPECT_TRUE(std::find(table.grid.begin(), table.grid.end(),
                              out.norms[i]) != table.grid.end());
      }
    }
    prev = out.attacked;
  }
}

TEST(AdaptiveAttackTest, DeterministicAcrossThreads) {
  const Dataset ds = GenerateSynthetic(20, 2, 4, 6);
  const auto spec = SmoothingSpec::PixelGaussian(0.5);
  const LogisticModel m = TrainLogistic(ds, TrainConfig{});
  const AttackOutcome a =
      AdaptiveSmoothedAttack(ds, m, spec, SmallBudget(), 0.1, SeedPolicy{9}, 1);
  const AttackOutcome b =
      AdaptiveSmoothedAttack(ds, m, spec, SmallBudget(), 0.1, SeedPolicy{9}, 3);
  EXPECT_EQ(a.scores, b.scores);
  EXPECT_EQ(a.norms, b.norms);
  EXPECT_EQ(a.shifted, b.shifted);
}

TEST(AdaptiveAttackTest, AccuracyAboveCertificate) {
  const Dataset ds = GenerateSynthetic(300, 2, 4, 7);
  const auto spec = SmoothingSpec::PixelGaussian(0.75);
  TrainConfig cfg;
  cfg.noise = spec;
  const LogisticModel m = TrainLogistic(ds, cfg);
  const auto clean = EvaluateSmoothed(ds, m, spec, SeedPolicy{11});
  const AdaptiveTable table =
      PrepareAdaptiveAttack(ds, m, spec, SmallBudget(), SeedPolicy{12}, 2);
  for (double gamma : {0.0, 0.05, 0.1, 0.2, 0.4}) {
    const AttackOutcome out = SelectAdaptiveAttack(table, gamma);
    const auto curve = Certify(clean, PairPsi(spec), kDefaultAlpha,
                               {out.wasserstein_bound});
    EXPECT_GE(out.accuracy, curve.lower_bounds[0]) << gamma;
  }
}

}  // namespace
}  // namespace shiftcert
