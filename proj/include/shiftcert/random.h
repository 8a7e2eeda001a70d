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

#ifndef SHIFTCERT_RANDOM_H_
#define SHIFTCERT_RANDOM_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace shiftcert {

// Name and version of the pseudo-random scheme. Recorded in every run
// manifest; changing any sampling code below requires bumping it.
inline constexpr std::string_view kGeneratorName =
    "mt19937_64+splitmix64/box-muller";
inline constexpr int kGeneratorVersion = 1;

// Stream tags keep independent consumers of one master seed disjoint.
enum class SeedStream : std::uint64_t {
  kSmoothing = 1,
  kTraining = 2,
  kSelection = 3,
  kEvaluation = 4,
  kGradient = 5,
  kPoison = 6,
  kData = 7,
  kShift = 8,
  kOracle = 9,
};

// splitmix64 finalizer.
std::uint64_t Mix64(std::uint64_t x);

// Derives per-sample seeds from a master seed. Seeds depend only on
// (master_seed, stream, sample_id), never on evaluation order.
struct SeedPolicy {
  std::uint64_t master_seed = 0;

  std::uint64_t ForSample(std::uint64_t sample_id,
                          SeedStream stream = SeedStream::kSmoothing) const;
  std::uint64_t ForSample(std::uint64_t sample_id, SeedStream stream,
                          std::uint64_t sub_index) const;
};

// Deterministic generator. Uniform and normal variates are derived from the
// raw 64-bit engine output here rather than through <random> distributions,
// whose algorithms are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t NextU64() { return engine_(); }
  // Uniform on [0, 1).
  double Uniform();
  // Uniform on [lo, hi).
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  // Uniform integer in [0, n).
  std::uint64_t UniformInt(std::uint64_t n);
  double Normal();
  double Normal(double mean, double stddev) { return mean + stddev * Normal(); }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace shiftcert

#endif  // SHIFTCERT_RANDOM_H_
