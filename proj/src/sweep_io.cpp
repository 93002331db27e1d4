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

#include "ssmdyn/sweep_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include <openssl/evp.h>

#include "json.hpp"

namespace ssmdyn {

namespace {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cell);
      cell.clear();
    } else if (c != '\r') {
      cell.push_back(c);
    }
  }
  out.push_back(cell);
  return out;
}

double parse_cell(const std::string& cell, const std::string& source, int row, const char* column) {
  auto fail = [&](const std::string& why) {
    std::ostringstream msg;
    msg << source << ": row " << row << ", column " << column << ": " << why;
    return ModelError(msg.str());
  };
  if (cell == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (cell.empty()) throw fail("empty value");
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    throw fail("not a number: '" + cell + "'");
  }
  if (used != cell.size()) throw fail("trailing characters in '" + cell + "'");
  return v;
}

nlohmann::json number_or_null(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

}  // namespace

void write_sweep_csv(std::ostream& out, std::span<const SweepRecord> records) {
  out << kSweepCsvHeader << '\n';
  for (const auto& r : records) {
    out << format_number(r.t_scale) << ',' << format_number(1.0 / r.t_scale) << ','
        << format_number(r.distance) << ',' << format_number(r.leakage) << ','
        << (r.projector_drift ? format_number(*r.projector_drift) : std::string()) << ','
        << format_number(r.wall_time) << '\n';
  }
}

std::string sweep_csv(std::span<const SweepRecord> records) {
  std::ostringstream out;
  write_sweep_csv(out, records);
  return out.str();
}

std::vector<SweepRecord> read_sweep_csv(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw ModelError(source + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kSweepCsvHeader) {
    throw ModelError(source + ": row 1: expected header '" + std::string(kSweepCsvHeader) + "'");
  }
  static constexpr const char* kColumns[] = {"T", "inv_T", "distance", "leakage",
                                             "projector_drift", "wall_time"};
  std::vector<SweepRecord> out;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 6) {
      std::ostringstream msg;
      msg << source << ": row " << row << ": expected 6 columns, found " << cells.size();
      throw ModelError(msg.str());
    }
    SweepRecord r;
    r.t_scale = parse_cell(cells[0], source, row, kColumns[0]);
    if (!(r.t_scale > 0.0)) {
      std::ostringstream msg;
      msg << source << ": row " << row << ", column T: must be positive";
      throw ModelError(msg.str());
    }
    parse_cell(cells[1], source, row, kColumns[1]);
    r.distance = parse_cell(cells[2], source, row, kColumns[2]);
    r.leakage = parse_cell(cells[3], source, row, kColumns[3]);
    if (!cells[4].empty()) r.projector_drift = parse_cell(cells[4], source, row, kColumns[4]);
    r.wall_time = parse_cell(cells[5], source, row, kColumns[5]);
    if (std::isnan(r.distance)) r.error = "failed point";
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<SweepRecord> load_sweep_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open " + path.string());
  return read_sweep_csv(in, path.string());
}

std::string sweep_json(std::span<const SweepRecord> records, const SweepMetadata& meta) {
  nlohmann::ordered_json j;
  j["schema"] = kSweepJsonSchema;
  j["schema_version"] = kSweepJsonSchemaVersion;
  j["scenario"] = meta.scenario;
  j["label"] = meta.label;
  j["scaling"] = meta.scaling == PerturbationScaling::inverse ? "inverse" : "inverse_sqrt";
  j["parameters"] = meta.parameters;
  auto& rows = j["records"] = nlohmann::ordered_json::array();
  for (const auto& r : records) {
    nlohmann::ordered_json row;
    row["T"] = r.t_scale;
    row["inv_T"] = 1.0 / r.t_scale;
    row["distance"] = number_or_null(r.distance);
    row["leakage"] = number_or_null(r.leakage);
    row["projector_drift"] = r.projector_drift ? number_or_null(*r.projector_drift) : nullptr;
    row["wall_time"] = r.wall_time;
    row["error"] = r.error ? nlohmann::ordered_json(*r.error) : nullptr;
    rows.push_back(std::move(row));
  }
  if (meta.fit) {
    j["fit"] = {{"slope", meta.fit->slope},
                {"intercept", meta.fit->intercept},
                {"points_used", meta.fit->points_used},
                {"residual", meta.fit->residual},
                {"warnings", meta.fit->warnings}};
  } else {
    j["fit"] = nullptr;
  }
  return j.dump(2) + "\n";
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ModelError("cannot write " + tmp.string());
    out << contents;
    if (!out.flush()) throw ModelError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw NumericalError("sha256 failed");
  }
  std::ostringstream out;
  out << std::hex << std::setfill('0');
  for (unsigned int i = 0; i < len; ++i) out << std::setw(2) << static_cast<int>(digest[i]);
  return out.str();
}

}  // namespace ssmdyn
