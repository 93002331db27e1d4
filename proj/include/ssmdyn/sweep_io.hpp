// Copyright 2026 The ssm-dyn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ssmdyn/evolution.hpp"

// Sweep file formats.
//
// CSV: header `T,inv_T,distance,leakage,projector_drift,wall_time`, one row
// per grid point in ascending T, numbers printed with 17 significant digits.
// projector_drift is empty when it was not computed; failed points carry
// `nan` in the numeric columns.
//
// JSON: an object with "schema": "ssm-dyn/sweep", "schema_version": 1, the
// scenario and label, free-form string parameters, the records (NaN written
// as null) and, when present, the fit.
namespace ssmdyn {

inline constexpr const char* kSweepCsvHeader = "T,inv_T,distance,leakage,projector_drift,wall_time";
inline constexpr const char* kSweepJsonSchema = "ssm-dyn/sweep";
inline constexpr int kSweepJsonSchemaVersion = 1;

struct SweepMetadata {
  std::string scenario;
  std::string label;
  PerturbationScaling scaling = PerturbationScaling::inverse;
  std::map<std::string, std::string> parameters;
  std::optional<FitResult> fit;
};

void write_sweep_csv(std::ostream& out, std::span<const SweepRecord> records);
std::string sweep_csv(std::span<const SweepRecord> records);

/// Throws ModelError naming the source, row and column of the first problem.
std::vector<SweepRecord> read_sweep_csv(std::istream& in, const std::string& source = "<stream>");
std::vector<SweepRecord> load_sweep_csv(const std::filesystem::path& path);

std::string sweep_json(std::span<const SweepRecord> records, const SweepMetadata& meta);

/// Writes through a temporary file in the same directory and renames it.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

}  // namespace ssmdyn
