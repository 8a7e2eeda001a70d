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

#include "shiftcert/statbounds.h"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/special_functions/beta.hpp>

#include "shiftcert/error.h"

namespace shiftcert {
namespace {

constexpr double kBisectionTolerance = 1e-10;

void CheckAlpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::kInvalidArgs,
                "alpha must lie in (0, 1), got " + std::to_string(alpha));
  }
}

}  // namespace

std::string_view BoundKindName(BoundKind kind) {
  return kind == BoundKind::kClopperPearson ? "clopper_pearson" : "hoeffding";
}

double ClopperPearsonLower(std::int64_t k, std::int64_t n, double alpha) {
  CheckAlpha(alpha);
  if (n <= 0 || k < 0 || k > n) {
    throw Error(ErrorCode::kInvalidArgs,
                "need 0 <= k <= n and n > 0 (k=" + std::to_string(k) +
                    ", n=" + std::to_string(n) + ")");
  }
  if (k == 0) return 0.0;
  const double a = static_cast<double>(k);
  const double b = static_cast<double>(n - k + 1);
  // I_p(k, n-k+1) = P(Bin(n, p) >= k) is increasing in p; keep lo on the
  // side where the tail is still <= alpha.
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > kBisectionTolerance) {
    const double mid = 0.5 * (lo + hi);
    if (boost::math::ibeta(a, b, mid) <= alpha) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

double HoeffdingLower(double mean_score, std::int64_t n, double alpha) {
  CheckAlpha(alpha);
  if (n <= 0 || !(mean_score >= 0.0 && mean_score <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgs,
                "need n > 0 and a mean score in [0, 1]");
  }
  const double slack =
      std::sqrt(std::log(1.0 / alpha) / (2.0 * static_cast<double>(n)));
  return std::max(0.0, mean_score - slack);
}

LowerBound LowerConfidenceBound(std::span<const double> scores, double alpha) {
  if (scores.empty()) {
    throw Error(ErrorCode::kEmptyRecords, "no scores to bound");
  }
  LowerBound out;
  out.n = static_cast<std::int64_t>(scores.size());
  bool binary = true;
  for (double s : scores) {
    out.successes += s;
    binary = binary && (s == 0.0 || s == 1.0);
  }
  if (binary) {
    out.kind = BoundKind::kClopperPearson;
    out.value = ClopperPearsonLower(
        static_cast<std::int64_t>(std::llround(out.successes)), out.n, alpha);
  } else {
    out.kind = BoundKind::kHoeffding;
    const double mean =
        std::clamp(out.successes / static_cast<double>(out.n), 0.0, 1.0);
    out.value = HoeffdingLower(mean, out.n, alpha);
  }
  return out;
}

}  // namespace shiftcert
