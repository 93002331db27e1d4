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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ssmdyn {

/// `key = value` text: one entry per line, `#` starts a comment, blank lines
/// ignored, keys may repeat. Entry order is preserved.
class KeyValueFile {
 public:
  struct Entry {
    std::string key;
    std::string value;
    int line = 0;
  };

  static KeyValueFile parse(std::string_view text, std::string source = "<string>");
  static KeyValueFile load(const std::filesystem::path& path);

  const std::vector<Entry>& entries() const { return entries_; }
  const std::string& source() const { return source_; }

  /// Last value for `key`, if any.
  std::optional<std::string> get(std::string_view key) const;
  std::vector<Entry> all(std::string_view key) const;

  std::optional<double> get_double(std::string_view key) const;
  std::optional<long> get_int(std::string_view key) const;
  std::optional<bool> get_bool(std::string_view key) const;

  void set(std::string key, std::string value);

 private:
  std::vector<Entry> entries_;
  std::string source_;
};

/// Parses a real number, accepting a simple ratio such as `1/3`.
double parse_number(std::string_view text);

}  // namespace ssmdyn
