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

#ifndef SHIFTCERT_STATBOUNDS_H_
#define SHIFTCERT_STATBOUNDS_H_

#include <cstdint>
#include <span>
#include <string_view>

namespace shiftcert {

enum class BoundKind { kClopperPearson, kHoeffding };

std::string_view BoundKindName(BoundKind kind);

// One-sided exact binomial lower confidence bound: the alpha-quantile of
// Beta(k, n - k + 1), found by bisection on the regularized incomplete beta
// and rounded down. Returns 0 for k == 0. Throws Error(kInvalidArgs) unless
// 0 <= k <= n, n > 0 and 0 < alpha < 1.
double ClopperPearsonLower(std::int64_t k, std::int64_t n, double alpha);

// mean - sqrt(ln(1/alpha) / (2n)), floored at 0. Valid for scores in [0, 1].
double HoeffdingLower(double mean_score, std::int64_t n, double alpha);

struct LowerBound {
  double value = 0.0;
  BoundKind kind = BoundKind::kClopperPearson;
  double successes = 0.0;  // k, or the sum of scores for real-valued h
  std::int64_t n = 0;
};

// Picks Clopper-Pearson when every score is exactly 0 or 1 and Hoeffding
// otherwise.
LowerBound LowerConfidenceBound(std::span<const double> scores, double alpha);

}  // namespace shiftcert

#endif  // SHIFTCERT_STATBOUNDS_H_
