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

#include "shiftcert/unlearnable.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <variant>

#include "shiftcert/certifier.h"
#include "shiftcert/error.h"
#include "shiftcert/parallel.h"
#include "shiftcert/psi.h"
#include "shiftcert/random.h"

namespace shiftcert {
namespace {

double Norm(std::span<const double> v) {
  return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
}

// Gradient of the (optionally noise-averaged) loss at x + delta.
std::vector<double> PoisonGradient(const LogisticModel& proxy,
                                   std::span<const double> xp, int label,
                                   const std::vector<Noise>& noise) {
  if (noise.empty()) return proxy.LogitsAndGrad(xp, label).gradient;
  std::vector<double> total(xp.size(), 0.0);
  std::vector<double> noisy(xp.size());
  for (const Noise& n : noise) {
    const auto& d = std::get<PixelNoise>(n).values;
    for (std::size_t i = 0; i < xp.size(); ++i) {
      noisy[i] = std::clamp(xp[i] + d[i], 0.0, 1.0);
    }
    const auto g = proxy.LogitsAndGrad(noisy, label).gradient;
    for (std::size_t i = 0; i < xp.size(); ++i) total[i] += g[i];
  }
  for (double& g : total) g /= static_cast<double>(noise.size());
  return total;
}

std::vector<Noise> AdaptiveNoise(const PoisonConfig& config,
                                 std::uint32_t sample_id,
                                 std::size_t components) {
  std::vector<Noise> noise;
  if (!config.adaptive_spec) return noise;
  const SeedPolicy seeds{config.seed};
  for (int j = 0; j < config.adaptive_draws; ++j) {
    noise.push_back(SampleNoise(
        *config.adaptive_spec,
        seeds.ForSample(sample_id, SeedStream::kPoison,
                        static_cast<std::uint64_t>(j)),
        components));
  }
  return noise;
}

void PerturbOne(const LogisticModel& proxy, const Sample& s,
                const PoisonConfig& config, std::vector<double>& delta) {
  const auto x = ToFeatures(s.image);
  delta.resize(x.size(), 0.0);
  if (config.l2_radius == 0.0) return;
  const auto noise = AdaptiveNoise(config, s.id, x.size());
  const double tau = config.step_size();
  std::vector<double> xp(x.size());
  for (int t = 0; t < config.steps; ++t) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      xp[i] = std::clamp(x[i] + delta[i], 0.0, 1.0);
    }
    const auto g = PoisonGradient(proxy, xp, s.label, noise);
    const double gn = Norm(g);
    if (gn == 0.0) break;
    for (std::size_t i = 0; i < x.size(); ++i) delta[i] -= tau * g[i] / gn;
    const double dn = Norm(delta);
    if (dn > config.l2_radius) {
      for (double& d : delta) d *= config.l2_radius / dn;
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
      delta[i] = std::clamp(x[i] + delta[i], 0.0, 1.0) - x[i];
    }
  }
}

Image PerturbedImage(const Image& img, std::span<const double> delta) {
  const auto px = img.pixels();
  std::vector<float> out(px.size());
  for (std::size_t j = 0; j < px.size(); ++j) {
    out[j] = static_cast<float>(std::clamp(px[j] + delta[j], 0.0, 1.0));
  }
  return Image(img.height(), img.width(), std::move(out));
}

Dataset ApplyPerturbations(const Dataset& data,
                           const std::vector<std::vector<double>>& deltas,
                           double radius) {
  std::vector<Image> images(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Image& img = data.samples[i].image;
    Image out = PerturbedImage(img, deltas[i]);
    // Rounding to float can step just outside the ball; shrink slightly.
    if (const double n = L2Distance(out, img); n > radius) {
      std::vector<double> d(deltas[i]);
      for (double& v : d) v *= radius / n * (1.0 - 1e-6);
      out = PerturbedImage(img, d);
    }
    images[i] = std::move(out);
  }
  return data.WithImages(std::move(images));
}

}  // namespace

void PoisonConfig::Validate() const {
  if (!(l2_radius >= 0.0) || !std::isfinite(l2_radius)) {
    throw Error(ErrorCode::kInvalidArgs, "l2 radius must be >= 0");
  }
  if (steps < 0 || !(step_factor > 0.0) || outer_cap < 0 ||
      !(proxy_learning_rate > 0.0) || proxy_batch_size <= 0 ||
      !(stop_accuracy > 0.0 && stop_accuracy <= 1.0) || adaptive_draws <= 0 ||
      threads <= 0) {
    throw Error(ErrorCode::kInvalidArgs, "poison config values out of range");
  }
  if (proxy_size == 0 || train_size == 0 || val_size == 0 || test_size == 0) {
    throw Error(ErrorCode::kInvalidArgs, "split sizes must be positive");
  }
  if (adaptive_spec) {
    adaptive_spec->Validate();
    if (adaptive_spec->kind != SmoothingKind::kPixelGaussian) {
      throw Error(ErrorCode::kUnsupported,
                  "adaptive poisoning supports pixel-Gaussian smoothing only");
    }
  }
}

nlohmann::json PoisonConfig::ToJson() const {
  return {{"l2_radius", l2_radius},
          {"steps", steps},
          {"step_factor", step_factor},
          {"outer_cap", outer_cap},
          {"proxy_learning_rate", proxy_learning_rate},
          {"proxy_batch_size", proxy_batch_size},
          {"stop_accuracy", stop_accuracy},
          {"splits", {proxy_size, train_size, val_size, test_size}},
          {"adaptive", adaptive_spec ? adaptive_spec->ToJson() : nullptr},
          {"adaptive_draws", adaptive_draws},
          {"seed", seed}};
}

nlohmann::json PoisonReport::ToJson() const {
  return {{"train_accuracy", train_accuracy},
          {"val_accuracy", val_accuracy},
          {"test_accuracy", test_accuracy},
          {"val_lower", val_lower},
          {"psi", psi},
          {"certified_bound", certified_bound},
          {"bound", BoundKindName(bound_kind)},
          {"l2_radius", l2_radius},
          {"smoothing", smoothing ? smoothing->ToJson() : nullptr},
          {"proxy_outer_steps", proxy_outer_steps},
          {"proxy_converged", proxy_converged}};
}

void MinimizePerturbations(const LogisticModel& proxy, const Dataset& data,
                           const PoisonConfig& config,
                           std::vector<std::vector<double>>& perturbations) {
  perturbations.resize(data.size());
  ParallelFor(data.size(), config.threads, [&](std::size_t i) {
    PerturbOne(proxy, data.samples[i], config, perturbations[i]);
  });
}

ProxyResult TrainProxyMinMin(const Dataset& proxy_split,
                             const PoisonConfig& config) {
  config.Validate();
  if (proxy_split.empty()) {
    throw Error(ErrorCode::kEmptyRecords, "empty proxy split");
  }
  ProxyResult result{
      LogisticModel(proxy_split.num_classes, proxy_split.feature_count()), 0,
      false};
  LogisticModel& model = result.model;
  std::vector<std::vector<double>> deltas;
  const std::size_t n = proxy_split.size();
  const std::size_t batch =
      std::min(n, static_cast<std::size_t>(config.proxy_batch_size));
  Rng rng(SeedPolicy{config.seed}.ForSample(0, SeedStream::kPoison,
                                            ~std::uint64_t{0}));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::vector<double>> inputs;
  std::vector<int> labels;

  for (int t = 0; t < config.outer_cap; ++t) {
    MinimizePerturbations(model, proxy_split, config, deltas);
    // Partial Fisher-Yates: the first `batch` entries form the mini-batch.
    for (std::size_t i = 0; i < batch; ++i) {
      std::swap(order[i], order[i + rng.UniformInt(n - i)]);
    }
    inputs.clear();
    labels.clear();
    for (std::size_t j = 0; j < batch; ++j) {
      const Sample& s = proxy_split.samples[order[j]];
      auto x = ToFeatures(s.image);
      for (std::size_t k = 0; k < x.size(); ++k) {
        x[k] = std::clamp(x[k] + deltas[order[j]][k], 0.0, 1.0);
      }
      inputs.push_back(std::move(x));
      labels.push_back(s.label);
    }
    model.GradientStep(inputs, labels, config.proxy_learning_rate);
    result.outer_steps = t + 1;

    const Dataset perturbed = ApplyPerturbations(proxy_split, deltas, config.l2_radius);
    if (Accuracy(model, perturbed) >= config.stop_accuracy) {
      result.converged = true;
      break;
    }
  }
  return result;
}

Dataset PoisonOffline(const Dataset& samples, const LogisticModel& proxy,
                      const PoisonConfig& config) {
  config.Validate();
  std::vector<std::vector<double>> deltas(samples.size());
  MinimizePerturbations(proxy, samples, config, deltas);
  return ApplyPerturbations(samples, deltas, config.l2_radius);
}

PoisonReport RunUnlearnabilityExperiment(
    const Dataset& data, const PoisonConfig& poison, TrainConfig victim,
    const std::optional<SmoothingSpec>& spec, double alpha) {
  poison.Validate();
  const std::size_t need =
      poison.proxy_size + poison.train_size + poison.val_size + poison.test_size;
  if (data.size() < need) {
    throw Error(ErrorCode::kInvalidArgs,
                "dataset has " + std::to_string(data.size()) +
                    " samples, splits need " + std::to_string(need));
  }
  std::size_t at = 0;
  const Dataset proxy_split = data.Slice(at, poison.proxy_size);
  at += poison.proxy_size;
  const Dataset train = data.Slice(at, poison.train_size);
  at += poison.train_size;
  const Dataset val = data.Slice(at, poison.val_size);
  at += poison.val_size;
  const Dataset test = data.Slice(at, poison.test_size);

  const ProxyResult proxy = TrainProxyMinMin(proxy_split, poison);
  const Dataset poisoned_train = PoisonOffline(train, proxy.model, poison);
  const Dataset poisoned_val = PoisonOffline(val, proxy.model, poison);

  victim.noise = spec;
  const LogisticModel model = TrainLogistic(poisoned_train, victim);

  PoisonReport report;
  report.l2_radius = poison.l2_radius;
  report.smoothing = spec;
  report.proxy_outer_steps = proxy.outer_steps;
  report.proxy_converged = proxy.converged;

  std::vector<ScoreRecord> train_rec, val_rec, test_rec;
  PsiFn psi;
  if (spec) {
    const SeedPolicy seeds{Mix64(poison.seed ^ 0x5eed0f5a1dULL)};
    train_rec = EvaluateSmoothed(poisoned_train, model, *spec, seeds,
                                 poison.threads);
    val_rec = EvaluateSmoothed(poisoned_val, model, *spec, seeds,
                               poison.threads);
    test_rec = EvaluateSmoothed(test, model, *spec, seeds, poison.threads);
    psi = PairPsi(*spec);
  } else {
    train_rec = EvaluatePlain(poisoned_train, model, poison.threads);
    val_rec = EvaluatePlain(poisoned_val, model, poison.threads);
    test_rec = EvaluatePlain(test, model, poison.threads);
    // No smoothing is the sigma = 0 limit: psi jumps to 1 at any radius.
    psi = {PsiKind::kErfGaussian, 0.0};
  }
  report.train_accuracy = MeanScore(train_rec);
  report.val_accuracy = MeanScore(val_rec);
  report.test_accuracy = MeanScore(test_rec);

  std::vector<double> scores;
  for (const auto& r : val_rec) scores.push_back(r.score);
  const LowerBound lb = LowerConfidenceBound(scores, alpha);
  report.val_lower = lb.value;
  report.bound_kind = lb.kind;
  report.psi = psi(poison.l2_radius);
  report.certified_bound = std::max(0.0, lb.value - report.psi);
  return report;
}

}  // namespace shiftcert
