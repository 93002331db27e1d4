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

#include "ssmdyn/keyvalue.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ssmdyn/tensor.hpp"

namespace ssmdyn {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_plain(std::string_view text) {
  const std::string s(trim(text));
  if (s.empty()) throw ModelError("expected a number, got an empty string");
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v)) {
    throw ModelError("not a finite number: '" + s + "'");
  }
  return v;
}

}  // namespace

double parse_number(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return parse_plain(text);
  const double num = parse_plain(text.substr(0, slash));
  const double den = parse_plain(text.substr(slash + 1));
  if (den == 0.0) throw ModelError("division by zero in '" + std::string(text) + "'");
  return num / den;
}

KeyValueFile KeyValueFile::parse(std::string_view text, std::string source) {
  KeyValueFile out;
  out.source_ = std::move(source);
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view sv = raw;
    if (const auto hash = sv.find('#'); hash != std::string_view::npos) sv = sv.substr(0, hash);
    sv = trim(sv);
    if (sv.empty()) continue;
    const auto eq = sv.find('=');
    if (eq == std::string_view::npos) {
      throw ModelError(out.source_ + ":" + std::to_string(line) + ": expected 'key = value'");
    }
    const auto key = trim(sv.substr(0, eq));
    if (key.empty()) {
      throw ModelError(out.source_ + ":" + std::to_string(line) + ": empty key");
    }
    out.entries_.push_back({std::string(key), std::string(trim(sv.substr(eq + 1))), line});
  }
  return out;
}

KeyValueFile KeyValueFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path.string());
}

std::optional<std::string> KeyValueFile::get(std::string_view key) const {
  std::optional<std::string> out;
  for (const auto& e : entries_) {
    if (e.key == key) out = e.value;
  }
  return out;
}

std::vector<KeyValueFile::Entry> KeyValueFile::all(std::string_view key) const {
  std::vector<Entry> out;
  for (const auto& e : entries_) {
    if (e.key == key) out.push_back(e);
  }
  return out;
}

std::optional<double> KeyValueFile::get_double(std::string_view key) const {
  const auto v = get(key);
  if (!v) return std::nullopt;
  try {
    return parse_number(*v);
  } catch (const ModelError& e) {
    throw ModelError(source_ + ": key '" + std::string(key) + "': " + e.what());
  }
}

std::optional<long> KeyValueFile::get_int(std::string_view key) const {
  const auto v = get_double(key);
  if (!v) return std::nullopt;
  if (std::floor(*v) != *v) {
    throw ModelError(source_ + ": key '" + std::string(key) + "' must be an integer");
  }
  return static_cast<long>(*v);
}

std::optional<bool> KeyValueFile::get_bool(std::string_view key) const {
  const auto v = get(key);
  if (!v) return std::nullopt;
  if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
  if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
  throw ModelError(source_ + ": key '" + std::string(key) + "' must be a boolean");
}

void KeyValueFile::set(std::string key, std::string value) {
  entries_.push_back({std::move(key), std::move(value), 0});
}

}  // namespace ssmdyn
