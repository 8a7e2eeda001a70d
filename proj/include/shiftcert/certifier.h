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

#ifndef SHIFTCERT_CERTIFIER_H_
#define SHIFTCERT_CERTIFIER_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "shiftcert/classifier.h"
#include "shiftcert/dataset.h"
#include "shiftcert/psi.h"
#include "shiftcert/random.h"
#include "shiftcert/smoothing.h"
#include "shiftcert/statbounds.h"

namespace shiftcert {

inline constexpr double kDefaultAlpha = 0.001;

// One Monte-Carlo draw of the smoothed score for one sample.
struct ScoreRecord {
  std::uint32_t sample_id = 0;
  int label = 0;
  double score = 0.0;
  std::uint64_t noise_seed = 0;
  bool degenerate = false;

  bool operator==(const ScoreRecord&) const = default;
};

// Scores every sample on exactly one smoothing draw, seeded by
// seeds.ForSample(sample_id). Degenerate draws score 0. The output is in
// dataset order and identical for any thread count. Scorer errors abort the
// run with Error(kScorerFailure) naming the sample.
std::vector<ScoreRecord> EvaluateSmoothed(const Dataset& data,
                                          const Classifier& model,
                                          const SmoothingSpec& spec,
                                          const SeedPolicy& seeds,
                                          int threads = 1);

// Same as EvaluateSmoothed without randomization.
std::vector<ScoreRecord> EvaluatePlain(const Dataset& data,
                                       const Classifier& model,
                                       int threads = 1);

double MeanScore(std::span<const ScoreRecord> records);

// eps -> max(0, p_lower - psi(eps)).
struct CertificateCurve {
  std::vector<double> epsilons;
  std::vector<double> lower_bounds;
  double p_lower = 0.0;
  double successes = 0.0;
  std::int64_t n = 0;
  double alpha = kDefaultAlpha;
  BoundKind bound_kind = BoundKind::kClopperPearson;
  PsiFn psi;
  nlohmann::json smoothing;
  std::string manifest_hash;

  // Certified accuracy at an arbitrary radius (not interpolated).
  double At(double eps) const;
  // "epsilon,lower_bound" rows with 17 significant digits.
  std::string ToCsv() const;
  nlohmann::json Metadata() const;
};

// Lower-bounds the mean score (Clopper-Pearson for 0/1 scores, Hoeffding
// otherwise) and subtracts psi over the grid. Throws Error(kEmptyRecords) and
// Error(kInvalidArgs) for a grid that is not ascending and non-negative.
CertificateCurve Certify(std::span<const ScoreRecord> records, const PsiFn& psi,
                         double alpha, std::vector<double> eps_grid);

// 64 points spaced geometrically from psi^-1(0.01) to psi^-1(0.99), or
// linearly over [0, 1] when psi is identically zero.
std::vector<double> DefaultEpsilonGrid(const PsiFn& psi,
                                       std::size_t points = 64);

// A clean sample paired with its shifted counterpart and the declared
// distance between them.
struct ShiftPair {
  std::uint32_t sample_id = 0;
  Image shifted;
  int clean_label = 0;
  int shifted_label = 0;
  double distance = 0.0;
};

// Mean declared distance: an upper bound on the Wasserstein distance between
// the clean and shifted empirical distributions under the identity coupling.
// Throws Error(kLabelMismatch) for pairs whose labels differ and
// Error(kInvalidArgs) for negative distances or an empty list.
double WassersteinUpperBound(std::span<const ShiftPair> pairs);

std::vector<ShiftPair> MakeShiftPairs(const Dataset& clean,
                                      const Dataset& shifted,
                                      std::span<const double> distances);

struct ShiftedData {
  Dataset data;
  std::vector<double> distances;
};

// Shifts every sample by its own parameter theta_i of the given family.
// Color and SV shifts draw random directions and magnitudes rescaled so the
// mean distance is exactly `mean_distance`; hue shifts rotate every image by
// the angle `mean_distance`.
ShiftedData BuildTransformShift(const Dataset& clean, TransformKind kind,
                                double mean_distance, std::uint64_t seed);

struct GapReport {
  double clean_mean = 0.0;
  double shifted_mean = 0.0;
  double gap = 0.0;
  double psi = 0.0;
  double slack = 0.0;
  bool pass = false;
  std::size_t n = 0;

  nlohmann::json ToJson() const;
};

// Compares |mean(clean) - mean(shifted)| against psi(eps) plus the sampling
// slack 3 * sqrt(ln(2 / 0.01) / (2n)).
GapReport GapCheck(std::span<const ScoreRecord> clean,
                   std::span<const ScoreRecord> shifted, const PsiFn& psi,
                   double eps);

}  // namespace shiftcert

#endif  // SHIFTCERT_CERTIFIER_H_
