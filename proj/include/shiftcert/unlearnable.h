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

#ifndef SHIFTCERT_UNLEARNABLE_H_
#define SHIFTCERT_UNLEARNABLE_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "json.hpp"
#include "shiftcert/classifier.h"
#include "shiftcert/dataset.h"
#include "shiftcert/smoothing.h"
#include "shiftcert/statbounds.h"

namespace shiftcert {

struct PoisonConfig {
  double l2_radius = 0.5;
  int steps = 20;
  // Inner step size tau = step_factor * l2_radius.
  double step_factor = 0.1;
  int outer_cap = 50;
  double proxy_learning_rate = 0.5;
  int proxy_batch_size = 64;
  double stop_accuracy = 0.99;
  std::size_t proxy_size = 2000;
  std::size_t train_size = 2000;
  std::size_t val_size = 1000;
  std::size_t test_size = 1000;
  // When set, perturbations minimize the loss averaged over fixed draws of
  // this (pixel-Gaussian) smoothing.
  std::optional<SmoothingSpec> adaptive_spec;
  int adaptive_draws = 8;
  std::uint64_t seed = 0;
  int threads = 1;

  double step_size() const { return step_factor * l2_radius; }
  void Validate() const;
  nlohmann::json ToJson() const;
};

struct ProxyResult {
  LogisticModel model;
  int outer_steps = 0;
  bool converged = false;  // reached stop_accuracy before the cap
};

struct PoisonReport {
  double train_accuracy = 0.0;  // victim on its poisoned training split
  double val_accuracy = 0.0;    // poisoned validation split
  double test_accuracy = 0.0;   // clean test split
  double val_lower = 0.0;
  double psi = 0.0;
  double certified_bound = 0.0;  // max(0, val_lower - psi)
  BoundKind bound_kind = BoundKind::kClopperPearson;
  double l2_radius = 0.0;
  std::optional<SmoothingSpec> smoothing;
  int proxy_outer_steps = 0;
  bool proxy_converged = false;

  nlohmann::json ToJson() const;
};

// One pass of `steps` normalized descent steps on every sample's
// perturbation. `perturbations` is updated in place and stays inside the
// l2 ball with x + delta in [0, 1].
void MinimizePerturbations(const LogisticModel& proxy, const Dataset& data,
                           const PoisonConfig& config,
                           std::vector<std::vector<double>>& perturbations);

// Alternates a full inner perturbation pass with one mini-batch update of the
// proxy until it fits the perturbed split or outer_cap is reached.
ProxyResult TrainProxyMinMin(const Dataset& proxy_split,
                             const PoisonConfig& config);

// Perturbs each sample independently against the frozen proxy.
Dataset PoisonOffline(const Dataset& samples, const LogisticModel& proxy,
                      const PoisonConfig& config);

// Splits `data` into proxy/train/val/test, poisons train and val, trains the
// victim (under `spec` noise if given) and bounds its clean accuracy from the
// poisoned validation score. Without a spec psi is 1 for any radius > 0.
PoisonReport RunUnlearnabilityExperiment(const Dataset& data,
                                         const PoisonConfig& poison,
                                         TrainConfig victim,
                                         const std::optional<SmoothingSpec>& spec,
                                         double alpha = 0.001);

}  // namespace shiftcert

#endif  // SHIFTCERT_UNLEARNABLE_H_
