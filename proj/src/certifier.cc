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

#include "shiftcert/certifier.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>

#include "shiftcert/error.h"
#include "shiftcert/io.h"
#include "shiftcert/parallel.h"

namespace shiftcert {
namespace {

double CheckedScore(const Classifier& model, const Image& img, int label,
                    std::uint32_t sample_id) {
  double score = 0.0;
  try {
    score = model.Score(img, label);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kScorerFailure) throw;
    throw Error(ErrorCode::kScorerFailure,
                "sample " + std::to_string(sample_id) + ": " + e.what());
  }
  if (!std::isfinite(score) || score < 0.0 || score > 1.0) {
    throw Error(ErrorCode::kScorerFailure,
                "sample " + std::to_string(sample_id) +
                    ": score outside [0, 1]");
  }
  return score;
}

void RequireNonEmpty(const Dataset& data) {
  if (data.empty()) throw Error(ErrorCode::kEmptyRecords, "empty dataset");
}

std::string FormatDouble(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::vector<ScoreRecord> EvaluateSmoothed(const Dataset& data,
                                          const Classifier& model,
                                          const SmoothingSpec& spec,
                                          const SeedPolicy& seeds,
                                          int threads) {
  RequireNonEmpty(data);
  spec.Validate();
  std::vector<ScoreRecord> out(data.size());
  ParallelFor(data.size(), threads, [&](std::size_t i) {
    const Sample& s = data.samples[i];
    ScoreRecord& rec = out[i];
    rec.sample_id = s.id;
    rec.label = s.label;
    rec.noise_seed = seeds.ForSample(s.id, SeedStream::kSmoothing);
    RandomizedInput r = RandomizeInput(s.image, spec, rec.noise_seed);
    // The classifier is invoked once even for degenerate draws so the call
    // count is exactly one per sample.
    double score = CheckedScore(model, r.image, s.label, s.id);
    rec.degenerate = r.degenerate;
    rec.score = r.degenerate ? 0.0 : score;
  });
  return out;
}

std::vector<ScoreRecord> EvaluatePlain(const Dataset& data,
                                       const Classifier& model, int threads) {
  RequireNonEmpty(data);
  std::vector<ScoreRecord> out(data.size());
  ParallelFor(data.size(), threads, [&](std::size_t i) {
    const Sample& s = data.samples[i];
    out[i].sample_id = s.id;
    out[i].label = s.label;
    out[i].score = CheckedScore(model, s.image, s.label, s.id);
  });
  return out;
}

double MeanScore(std::span<const ScoreRecord> records) {
  if (records.empty()) throw Error(ErrorCode::kEmptyRecords, "no records");
  double sum = 0.0;
  for (const auto& r : records) sum += r.score;
  return sum / static_cast<double>(records.size());
}

double CertificateCurve::At(double eps) const {
  return std::max(0.0, p_lower - psi(eps));
}

std::string CertificateCurve::ToCsv() const {
  std::string out = "epsilon,lower_bound\n";
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    out += FormatDouble(epsilons[i]) + "," + FormatDouble(lower_bounds[i]) +
           "\n";
  }
  return out;
}

nlohmann::json CertificateCurve::Metadata() const {
  return {{"p_lower", p_lower},
          {"k", successes},
          {"n", n},
          {"alpha", alpha},
          {"bound", BoundKindName(bound_kind)},
          {"psi", psi.ToJson()},
          {"smoothing", smoothing},
          {"manifest_hash", manifest_hash}};
}

CertificateCurve Certify(std::span<const ScoreRecord> records, const PsiFn& psi,
                         double alpha, std::vector<double> eps_grid) {
  if (records.empty()) throw Error(ErrorCode::kEmptyRecords, "no records");
  for (std::size_t i = 0; i < eps_grid.size(); ++i) {
    if (!(eps_grid[i] >= 0.0) || (i > 0 && eps_grid[i] < eps_grid[i - 1])) {
      throw Error(ErrorCode::kInvalidArgs,
                  "epsilon grid must be ascending and non-negative");
    }
  }
  std::vector<double> scores;
  scores.reserve(records.size());
  for (const auto& r : records) scores.push_back(r.degenerate ? 0.0 : r.score);
  LowerBound lb = LowerConfidenceBound(scores, alpha);

  CertificateCurve curve;
  curve.p_lower = lb.value;
  curve.successes = lb.successes;
  curve.n = lb.n;
  curve.alpha = alpha;
  curve.bound_kind = lb.kind;
  curve.psi = psi;
  curve.epsilons = std::move(eps_grid);
  curve.lower_bounds.reserve(curve.epsilons.size());
  for (double eps : curve.epsilons) curve.lower_bounds.push_back(curve.At(eps));
  return curve;
}

std::vector<double> DefaultEpsilonGrid(const PsiFn& psi, std::size_t points) {
  if (points < 2) throw Error(ErrorCode::kInvalidArgs, "grid needs 2 points");
  std::vector<double> grid(points);
  if (!psi.invertible() || !(psi.scale > 0.0)) {
    for (std::size_t i = 0; i < points; ++i) {
      grid[i] = static_cast<double>(i) / static_cast<double>(points - 1);
    }
    return grid;
  }
  const double lo = psi.Inverse(0.01);
  const double hi = psi.Inverse(0.99);
  const double ratio = std::log(hi / lo);
  for (std::size_t i = 0; i < points; ++i) {
    grid[i] = lo * std::exp(ratio * static_cast<double>(i) /
                            static_cast<double>(points - 1));
  }
  grid.back() = hi;
  return grid;
}

double WassersteinUpperBound(std::span<const ShiftPair> pairs) {
  if (pairs.empty()) throw Error(ErrorCode::kInvalidArgs, "no shift pairs");
  double sum = 0.0;
  for (const auto& p : pairs) {
    if (p.clean_label != p.shifted_label) {
      throw Error(ErrorCode::kLabelMismatch,
                  "pair for sample " + std::to_string(p.sample_id) +
                      " changes its label");
    }
    if (!(p.distance >= 0.0) || !std::isfinite(p.distance)) {
      throw Error(ErrorCode::kInvalidArgs, "pair distance must be >= 0");
    }
    sum += p.distance;
  }
  return sum / static_cast<double>(pairs.size());
}

std::vector<ShiftPair> MakeShiftPairs(const Dataset& clean,
                                      const Dataset& shifted,
                                      std::span<const double> distances) {
  if (clean.size() != shifted.size() || clean.size() != distances.size()) {
    throw Error(ErrorCode::kShapeMismatch, "pair inputs differ in length");
  }
  std::vector<ShiftPair> pairs(clean.size());
  for (std::size_t i = 0; i < clean.size(); ++i) {
    const Sample& a = clean.samples[i];
    const Sample& b = shifted.samples[i];
    if (a.id != b.id) {
      throw Error(ErrorCode::kShapeMismatch, "pair sample ids differ");
    }
    pairs[i] = {a.id, b.image, a.label, b.label, distances[i]};
  }
  return pairs;
}

ShiftedData BuildTransformShift(const Dataset& clean, TransformKind kind,
                                double mean_distance, std::uint64_t seed) {
  if (!(mean_distance >= 0.0) || !std::isfinite(mean_distance)) {
    throw Error(ErrorCode::kNegativeEpsilon, "shift size must be >= 0");
  }
  RequireNonEmpty(clean);
  const std::size_t n = clean.size();
  const SeedPolicy seeds{seed};
  std::vector<ParamVector> thetas(n);

  if (kind == TransformKind::kHueShift) {
    for (auto& t : thetas) t = {kind, {mean_distance}};
  } else if (kind == TransformKind::kColorShift ||
             kind == TransformKind::kSvShift) {
    const std::size_t dim = ParamLength(kind);
    std::vector<double> radii(n);
    for (std::size_t i = 0; i < n; ++i) {
      Rng rng(seeds.ForSample(clean.samples[i].id, SeedStream::kShift));
      std::vector<double> dir(dim);
      double norm = 0.0;
      do {
        norm = 0.0;
        for (double& d : dir) {
          d = rng.Normal();
          if (kind == TransformKind::kSvShift) d = std::abs(d);
          norm += kind == TransformKind::kSvShift ? d : d * d;
        }
        if (kind == TransformKind::kColorShift) norm = std::sqrt(norm);
      } while (!(norm > 0.0));
      for (double& d : dir) d /= norm;
      radii[i] = rng.Uniform(0.0, 2.0);
      thetas[i] = {kind, std::move(dir)};
    }
    const double mean_r =
        std::accumulate(radii.begin(), radii.end(), 0.0) / static_cast<double>(n);
    const double factor = mean_r > 0.0 ? mean_distance / mean_r : 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (double& d : thetas[i].values) d *= radii[i] * factor;
    }
  } else {
    throw Error(ErrorCode::kUnsupported,
                "shift builder supports color, hue and sv shifts");
  }

  ShiftedData out;
  std::vector<Image> images(n);
  out.distances.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    images[i] = ApplyTransform(clean.samples[i].image, thetas[i]);
    out.distances[i] = TransformDistance(thetas[i]);
  }
  out.data = clean.WithImages(std::move(images));
  return out;
}

nlohmann::json GapReport::ToJson() const {
  return {{"clean_mean", clean_mean}, {"shifted_mean", shifted_mean},
          {"gap", gap},               {"psi", psi},
          {"slack", slack},           {"pass", pass},
          {"n", n}};
}

GapReport GapCheck(std::span<const ScoreRecord> clean,
                   std::span<const ScoreRecord> shifted, const PsiFn& psi,
                   double eps) {
  GapReport r;
  r.clean_mean = MeanScore(clean);
  r.shifted_mean = MeanScore(shifted);
  r.gap = std::abs(r.clean_mean - r.shifted_mean);
  r.psi = psi(eps);
  r.n = std::min(clean.size(), shifted.size());
  r.slack = 3.0 * std::sqrt(std::log(2.0 / 0.01) /
                            (2.0 * static_cast<double>(r.n)));
  r.pass = r.gap <= r.psi + r.slack;
  return r;
}

}  // namespace shiftcert
