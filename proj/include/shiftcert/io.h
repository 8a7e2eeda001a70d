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

#ifndef SHIFTCERT_IO_H_
#define SHIFTCERT_IO_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "json.hpp"

namespace shiftcert {

inline constexpr std::string_view kToolName = "shiftcert";
inline constexpr std::string_view kToolVersion = "0.1.0";

// 64-bit FNV-1a.
std::uint64_t Fnv1a64(std::span<const std::uint8_t> bytes);
std::uint64_t Fnv1a64(std::string_view text);
std::string HexU64(std::uint64_t value);

// Writes to a temporary sibling and renames it into place, so readers never
// observe a partially written file. Throws Error(kIoError).
void AtomicWriteFile(const std::string& path, std::string_view contents);
std::string ReadFile(const std::string& path);

// Manifest shared by every output: tool, generator and seed, plus the
// effective configuration.
nlohmann::json RunManifest(std::uint64_t master_seed,
                           const nlohmann::json& config);
std::string ManifestHash(const nlohmann::json& manifest);

}  // namespace shiftcert

#endif  // SHIFTCERT_IO_H_
