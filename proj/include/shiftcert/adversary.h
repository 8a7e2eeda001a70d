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

#ifndef SHIFTCERT_ADVERSARY_H_
#define SHIFTCERT_ADVERSARY_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "json.hpp"
#include "shiftcert/classifier.h"
#include "shiftcert/dataset.h"
#include "shiftcert/image.h"
#include "shiftcert/random.h"
#include "shiftcert/smoothing.h"

namespace shiftcert {

inline constexpr double kAttackOvershoot = 1e-4;

struct AttackBudget {
  // Candidate attack magnitudes, ascending and positive.
  std::vector<double> magnitude_grid = DefaultMagnitudeGrid();
  int steps = 20;
  // PGD step size as a fraction of the magnitude.
  double step_factor = 0.1;
  // Fixed noise draws averaged in the smoothed PGD loss.
  int gradient_draws = 16;
  // Draws used to pick e*; disjoint from the evaluation draws.
  int selection_draws = 100;
  int evaluation_draws = 100;

  static std::vector<double> DefaultMagnitudeGrid();  // {i/8 : i = 1..16}
  void Validate() const;
  nlohmann::json ToJson() const;
};

struct AttackOutcome {
  std::vector<double> norms;         // 0 for unattacked samples
  std::vector<std::uint8_t> attacked;
  std::vector<double> scores;        // post-attack score per sample
  Dataset shifted;
  double accuracy = 0.0;
  double misclassification_rate = 0.0;
  double attacked_fraction = 0.0;
  double wasserstein_bound = 0.0;    // mean of norms
};

struct LinearAttack {
  Image adversarial;
  // margin / ||w|| + overshoot; infinity when no direction flips the label.
  double required_norm = 0.0;
  // ||adversarial - img||_2 after clamping to [0, 1].
  double actual_norm = 0.0;
};

// Closed-form minimal l2 attack on a binary logistic model. Already
// misclassified inputs are returned unchanged with norm 0. Throws
// Error(kUnsupportedKind) unless the model has exactly two classes.
LinearAttack MinL2AttackLinear(const LogisticModel& model, const Image& img,
                               int label);

// Loss for PgdAttack: plain cross-entropy, or its average over fixed noise
// draws (pixel-Gaussian smoothing only).
struct PgdLoss {
  std::optional<SmoothingSpec> spec;
  std::vector<Noise> noise;

  static PgdLoss Plain() { return {}; }
  static PgdLoss Smoothed(const SmoothingSpec& spec, int draws,
                          const SeedPolicy& seeds, std::uint32_t sample_id,
                          std::size_t image_components);
};

// Projected gradient ascent on the loss inside the l2 ball of radius e,
// clamped to [0, 1] after each step. Stops early on a zero gradient.
Image PgdAttack(const LogisticModel& model, const Image& img, int label,
                double e, int steps, const PgdLoss& loss,
                double step_factor = 0.1);

// Attacks a sample iff its minimal flipping norm is below gamma. Binary
// logistic models use the closed form; multiclass ones use PGD with bisection
// on the norm (tolerance 1e-2). Scores are those of `model` itself.
AttackOutcome StrategicAttack(const Dataset& data, const Classifier& model,
                              double gamma, int threads = 1);

// Per-sample rates precomputed for the adaptive attack so a gamma sweep
// reuses them.
struct AdaptiveTable {
  std::vector<double> grid;
  std::vector<double> clean_rate;               // rate(0)
  std::vector<std::vector<double>> rates;       // [sample][grid index]
  std::vector<std::vector<Image>> adversarial;  // [sample][grid index]
  std::vector<double> clean_score;              // evaluation draws on x
  std::vector<std::vector<double>> scores;      // evaluation draws on x_e
  const Dataset* data = nullptr;
};

AdaptiveTable PrepareAdaptiveAttack(const Dataset& data,
                                    const LogisticModel& model,
                                    const SmoothingSpec& spec,
                                    const AttackBudget& budget,
                                    const SeedPolicy& seeds, int threads = 1);

// e* = max{e : (rate(e) - rate(0)) / e > gamma}; samples without such e are
// left alone. Norms are accounted as e*.
AttackOutcome SelectAdaptiveAttack(const AdaptiveTable& table, double gamma);

AttackOutcome AdaptiveSmoothedAttack(const Dataset& data,
                                     const LogisticModel& model,
                                     const SmoothingSpec& spec,
                                     const AttackBudget& budget, double gamma,
                                     const SeedPolicy& seeds, int threads = 1);

}  // namespace shiftcert

#endif  // SHIFTCERT_ADVERSARY_H_
