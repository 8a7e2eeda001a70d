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

#include "shiftcert/adversary.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <variant>

#include "shiftcert/error.h"
#include "shiftcert/parallel.h"

namespace shiftcert {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double Norm(std::span<const double> v) {
  return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
}

Image FromFeatures(const Image& like, std::span<const double> x) {
  std::vector<float> px(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    px[i] = static_cast<float>(std::clamp(x[i], 0.0, 1.0));
  }
  return Image(like.height(), like.width(), std::move(px));
}

void Summarize(AttackOutcome& out) {
  const double n = static_cast<double>(out.scores.size());
  out.accuracy = std::accumulate(out.scores.begin(), out.scores.end(), 0.0) / n;
  out.misclassification_rate = 1.0 - out.accuracy;
  out.attacked_fraction =
      std::accumulate(out.attacked.begin(), out.attacked.end(), 0.0) / n;
  out.wasserstein_bound =
      std::accumulate(out.norms.begin(), out.norms.end(), 0.0) / n;
}

// Cross-entropy gradient w.r.t. the clean input, averaged over the fixed
// noise draws. Pixels pushed outside [0, 1] by the noise are clamped and so
// contribute no gradient.
std::vector<double> LossGradient(const LogisticModel& model,
                                 std::span<const double> x, int label,
                                 const PgdLoss& loss) {
  if (!loss.spec) return model.LogitsAndGrad(x, label).gradient;
  std::vector<double> total(x.size(), 0.0);
  std::vector<double> noisy(x.size());
  for (const Noise& n : loss.noise) {
    const auto& delta = std::get<PixelNoise>(n).values;
    std::vector<char> inside(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double v = x[i] + delta[i];
      inside[i] = v >= 0.0 && v <= 1.0;
      noisy[i] = std::clamp(v, 0.0, 1.0);
    }
    const auto g = model.LogitsAndGrad(noisy, label).gradient;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (inside[i]) total[i] += g[i];
    }
  }
  const double m = static_cast<double>(loss.noise.size());
  for (double& g : total) g /= m;
  return total;
}

// Smallest PGD magnitude that flips the model's prediction, by bisection.
LinearAttack MinNormPgd(const LogisticModel& model, const Image& img,
                        int label) {
  constexpr double kTolerance = 1e-2;
  LinearAttack out{img, 0.0, 0.0};
  if (model.Predict(img) != label) return out;
  const double cap = std::sqrt(static_cast<double>(img.size())) + 1.0;
  auto flips = [&](double e, Image* adv) {
    *adv = PgdAttack(model, img, label, e, 50, PgdLoss::Plain());
    return model.Predict(*adv) != label;
  };
  Image best;
  double hi = 0.125;
  while (!flips(hi, &best)) {
    hi *= 2.0;
    if (hi > cap) {
      out.required_norm = kInf;
      return out;
    }
  }
  double lo = hi / 2.0;
  if (hi == 0.125) lo = 0.0;
  while (hi - lo > kTolerance) {
    const double mid = 0.5 * (lo + hi);
    Image adv;
    if (flips(mid, &adv)) {
      hi = mid;
      best = std::move(adv);
    } else {
      lo = mid;
    }
  }
  out.adversarial = std::move(best);
  out.required_norm = hi;
  out.actual_norm = L2Distance(out.adversarial, img);
  return out;
}

double SmoothedCorrectRate(const Classifier& model, const Image& img,
                           int label, const SmoothingSpec& spec,
                           const SeedPolicy& seeds, std::uint32_t id,
                           SeedStream stream, int draws) {
  double correct = 0.0;
  for (int j = 0; j < draws; ++j) {
    RandomizedInput r = RandomizeInput(
        img, spec, seeds.ForSample(id, stream, static_cast<std::uint64_t>(j)));
    if (!r.degenerate) correct += model.Score(r.image, label);
  }
  return correct / static_cast<double>(draws);
}

}  // namespace

std::vector<double> AttackBudget::DefaultMagnitudeGrid() {
  std::vector<double> grid;
  for (int i = 1; i <= 16; ++i) grid.push_back(i / 8.0);
  return grid;
}

void AttackBudget::Validate() const {
  if (magnitude_grid.empty()) {
    throw Error(ErrorCode::kInvalidArgs, "empty magnitude grid");
  }
  for (std::size_t i = 0; i < magnitude_grid.size(); ++i) {
    if (!(magnitude_grid[i] > 0.0) ||
        (i > 0 && magnitude_grid[i] <= magnitude_grid[i - 1])) {
      throw Error(ErrorCode::kInvalidArgs,
                  "magnitude grid must be positive and ascending");
    }
  }
  if (steps <= 0 || !(step_factor > 0.0) || gradient_draws <= 0 ||
      selection_draws <= 0 || evaluation_draws <= 0) {
    throw Error(ErrorCode::kInvalidArgs, "attack budget values must be > 0");
  }
}

nlohmann::json AttackBudget::ToJson() const {
  return {{"magnitude_grid", magnitude_grid},
          {"steps", steps},
          {"step_factor", step_factor},
          {"gradient_draws", gradient_draws},
          {"selection_draws", selection_draws},
          {"evaluation_draws", evaluation_draws}};
}

LinearAttack MinL2AttackLinear(const LogisticModel& model, const Image& img,
                               int label) {
  if (model.num_classes() != 2) {
    throw Error(ErrorCode::kUnsupportedKind,
                "closed-form attack needs a binary logistic model");
  }
  if (label < 0 || label > 1) {
    throw Error(ErrorCode::kInvalidArgs, "label out of range");
  }
  LinearAttack out{img, 0.0, 0.0};
  const auto x = ToFeatures(img);
  const auto z = model.Logits(x);
  const double margin = z[label] - z[1 - label];
  // Ties go to class 0.
  const bool correct = label == 0 ? margin >= 0.0 : margin > 0.0;
  if (!correct) return out;

  const std::size_t f = model.features();
  const auto w = model.weights();
  std::vector<double> v(f);
  for (std::size_t i = 0; i < f; ++i) {
    v[i] = w[label * f + i] - w[(1 - label) * f + i];
  }
  const double vnorm = Norm(v);
  if (vnorm == 0.0) {
    out.required_norm = kInf;
    return out;
  }
  out.required_norm = margin / vnorm + kAttackOvershoot;
  std::vector<double> adv(x);
  for (std::size_t i = 0; i < f; ++i) adv[i] -= out.required_norm * v[i] / vnorm;
  out.adversarial = FromFeatures(img, adv);
  out.actual_norm = L2Distance(out.adversarial, img);
  return out;
}

PgdLoss PgdLoss::Smoothed(const SmoothingSpec& spec, int draws,
                          const SeedPolicy& seeds, std::uint32_t sample_id,
                          std::size_t image_components) {
  if (spec.kind != SmoothingKind::kPixelGaussian) {
    throw Error(ErrorCode::kUnsupported,
                "smoothed PGD supports pixel-Gaussian smoothing only");
  }
  if (draws <= 0) throw Error(ErrorCode::kInvalidArgs, "draws must be > 0");
  PgdLoss loss;
  loss.spec = spec;
  loss.noise.reserve(static_cast<std::size_t>(draws));
  for (int j = 0; j < draws; ++j) {
    loss.noise.push_back(SampleNoise(
        spec,
        seeds.ForSample(sample_id, SeedStream::kGradient,
                        static_cast<std::uint64_t>(j)),
        image_components));
  }
  return loss;
}

Image PgdAttack(const LogisticModel& model, const Image& img, int label,
                double e, int steps, const PgdLoss& loss, double step_factor) {
  if (!(e > 0.0)) throw Error(ErrorCode::kInvalidArgs, "magnitude must be > 0");
  if (steps < 0) throw Error(ErrorCode::kInvalidArgs, "steps must be >= 0");
  if (loss.spec && loss.noise.empty()) {
    throw Error(ErrorCode::kInvalidArgs, "smoothed loss without noise draws");
  }
  const auto x0 = ToFeatures(img);
  std::vector<double> x = x0;
  const double step = step_factor * e;
  for (int t = 0; t < steps; ++t) {
    const auto g = LossGradient(model, x, label, loss);
    const double gnorm = Norm(g);
    if (gnorm == 0.0) break;
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += step * g[i] / gnorm;
    std::vector<double> d(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) d[i] = x[i] - x0[i];
    const double dnorm = Norm(d);
    if (dnorm > e) {
      for (std::size_t i = 0; i < x.size(); ++i) x[i] = x0[i] + d[i] * e / dnorm;
    }
    for (double& v : x) v = std::clamp(v, 0.0, 1.0);
  }
  if (steps == 0) return img;
  Image adv = FromFeatures(img, x);
  // Float rounding can push the norm a hair over e; pull back toward img.
  const double n = L2Distance(adv, img);
  if (n > e) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = x0[i] + (x[i] - x0[i]) * (e / n) * (1.0 - 1e-9);
    }
    adv = FromFeatures(img, x);
  }
  return adv;
}

AttackOutcome StrategicAttack(const Dataset& data, const Classifier& model,
                              double gamma, int threads) {
  if (data.empty()) throw Error(ErrorCode::kEmptyRecords, "empty dataset");
  if (std::isnan(gamma) || gamma < 0.0) {
    throw Error(ErrorCode::kInvalidArgs, "gamma must be >= 0");
  }
  const auto* logistic = dynamic_cast<const LogisticModel*>(&model);
  if (logistic == nullptr) {
    throw Error(ErrorCode::kUnsupportedKind,
                "strategic attack needs a logistic model");
  }
  const std::size_t n = data.size();
  AttackOutcome out;
  out.norms.assign(n, 0.0);
  out.attacked.assign(n, 0);
  out.scores.assign(n, 0.0);
  std::vector<Image> images(n);
  ParallelFor(n, threads, [&](std::size_t i) {
    const Sample& s = data.samples[i];
    images[i] = s.image;
    if (gamma > 0.0) {
      LinearAttack a = logistic->num_classes() == 2
                           ? MinL2AttackLinear(*logistic, s.image, s.label)
                           : MinNormPgd(*logistic, s.image, s.label);
      if (a.required_norm > 0.0 && a.required_norm < gamma) {
        images[i] = std::move(a.adversarial);
        out.norms[i] = a.actual_norm;
        out.attacked[i] = 1;
      }
    }
    out.scores[i] = model.Score(images[i], s.label);
  });
  out.shifted = data.WithImages(std::move(images));
  Summarize(out);
  return out;
}

AdaptiveTable PrepareAdaptiveAttack(const Dataset& data,
                                    const LogisticModel& model,
                                    const SmoothingSpec& spec,
                                    const AttackBudget& budget,
                                    const SeedPolicy& seeds, int threads) {
  if (data.empty()) throw Error(ErrorCode::kEmptyRecords, "empty dataset");
  budget.Validate();
  spec.Validate();
  const std::size_t n = data.size();
  const std::size_t g = budget.magnitude_grid.size();
  AdaptiveTable t;
  t.grid = budget.magnitude_grid;
  t.clean_rate.assign(n, 0.0);
  t.clean_score.assign(n, 0.0);
  t.rates.assign(n, std::vector<double>(g, 0.0));
  t.scores.assign(n, std::vector<double>(g, 0.0));
  t.adversarial.assign(n, std::vector<Image>(g));
  t.data = &data;
  ParallelFor(n, threads, [&](std::size_t i) {
    const Sample& s = data.samples[i];
    const PgdLoss loss = PgdLoss::Smoothed(spec, budget.gradient_draws, seeds,
                                           s.id, s.image.size());
    auto correct = [&](const Image& img, SeedStream stream, int draws) {
      return SmoothedCorrectRate(model, img, s.label, spec, seeds, s.id, stream,
                                 draws);
    };
    t.clean_rate[i] =
        1.0 - correct(s.image, SeedStream::kSelection, budget.selection_draws);
    t.clean_score[i] =
        correct(s.image, SeedStream::kEvaluation, budget.evaluation_draws);
    for (std::size_t k = 0; k < g; ++k) {
      Image adv = PgdAttack(model, s.image, s.label, t.grid[k], budget.steps,
                            loss, budget.step_factor);
      t.rates[i][k] =
          1.0 - correct(adv, SeedStream::kSelection, budget.selection_draws);
      t.scores[i][k] =
          correct(adv, SeedStream::kEvaluation, budget.evaluation_draws);
      t.adversarial[i][k] = std::move(adv);
    }
  });
  return t;
}

AttackOutcome SelectAdaptiveAttack(const AdaptiveTable& table, double gamma) {
  if (table.data == nullptr || table.clean_rate.empty()) {
    throw Error(ErrorCode::kInvalidArgs, "adaptive table not prepared");
  }
  if (std::isnan(gamma)) throw Error(ErrorCode::kInvalidArgs, "gamma is NaN");
  const Dataset& data = *table.data;
  const std::size_t n = data.size();
  AttackOutcome out;
  out.norms.assign(n, 0.0);
  out.attacked.assign(n, 0);
  out.scores.assign(n, 0.0);
  std::vector<Image> images(n);
  for (std::size_t i = 0; i < n; ++i) {
    int chosen = -1;
    for (std::size_t k = 0; k < table.grid.size(); ++k) {
      const double gain =
          (table.rates[i][k] - table.clean_rate[i]) / table.grid[k];
      if (gain > gamma) chosen = static_cast<int>(k);
    }
    if (chosen < 0) {
      images[i] = data.samples[i].image;
      out.scores[i] = table.clean_score[i];
    } else {
      images[i] = table.adversarial[i][chosen];
      out.scores[i] = table.scores[i][chosen];
      out.norms[i] = table.grid[chosen];
      out.attacked[i] = 1;
    }
  }
  out.shifted = data.WithImages(std::move(images));
  Summarize(out);
  return out;
}

AttackOutcome AdaptiveSmoothedAttack(const Dataset& data,
                                     const LogisticModel& model,
                                     const SmoothingSpec& spec,
                                     const AttackBudget& budget, double gamma,
                                     const SeedPolicy& seeds, int threads) {
  return SelectAdaptiveAttack(
      PrepareAdaptiveAttack(data, model, spec, budget, seeds, threads), gamma);
}

}  // namespace shiftcert
