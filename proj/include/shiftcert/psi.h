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

#ifndef SHIFTCERT_PSI_H_
#define SHIFTCERT_PSI_H_

#include <cstddef>
#include <cstdint>
#include <string>

#include "json.hpp"
#include "shiftcert/smoothing.h"
#include "shiftcert/transforms.h"

namespace shiftcert {

enum class PsiKind {
  kErfGaussian,    // erf(eps / (2 sqrt(2) sigma))
  kLinearUniform,  // min(eps / a, 1)
  kZero,           // smoothing invariant under the transform
};

// Concave, nondecreasing bound psi(d) >= TV(S(x1), S(x2)) for inputs at
// transform distance d, with psi(0) = 0 and values in [0, 1].
struct PsiFn {
  PsiKind kind = PsiKind::kZero;
  double scale = 0.0;

  double operator()(double eps) const;
  bool invertible() const { return kind != PsiKind::kZero; }
  // Smallest eps with psi(eps) >= p, for p in (0, 1).
  double Inverse(double p) const;
  std::string Describe() const;
  nlohmann::json ToJson() const;
};

// Throws Error(kNegativeEpsilon) for eps < 0. The Gaussian branch is rounded
// up by one ulp so the bound never under-states the total variation.
double PsiEval(const PsiFn& psi, double eps);

// The psi paired with a smoothing distribution; the pairing is fixed and
// cannot be overridden.
PsiFn PairPsi(const SmoothingSpec& spec);

// Phi(z) via erfc, accurate in both tails.
double StandardNormalCdf(double z);

struct TvEstimate {
  double exact = 0.0;
  double mc = 0.0;
  double mc_stderr = 0.0;
  std::size_t mc_samples = 0;
};

// exact <= psi + 1e-9 and mc <= psi + 3 standard errors. The MC standard
// error is floored at sqrt(psi (1 - psi) / n), the spread of a [0, 1]
// integrand whose mean sits exactly at psi: near saturation the rare
// draws that pull the mean below 1 may not appear at all, leaving the
// empirical error near zero.
bool TvWithinPsi(const TvEstimate& tv, double psi);

// Total variation between S(x) and S(T(x, theta)) computed two ways: a closed
// form (Gaussian: 2 Phi(||theta|| / 2 sigma) - 1; uniform: box overlap) and a
// Monte-Carlo estimate that never touches the closed form. Invariant
// smoothings return zero for both. Throws Error(kUnsupported) if theta does
// not belong to the spec's transform.
TvEstimate TvOracle(const SmoothingSpec& spec, const ParamVector& theta,
                    std::size_t n_samples, std::uint64_t seed);

}  // namespace shiftcert

#endif  // SHIFTCERT_PSI_H_
