// Copyright 2026 The PAPO Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PAPO_CONFIG_FILE_HPP_
#define PAPO_CONFIG_FILE_HPP_

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace papo {

// Flat key-value configuration grouped in [sections]:
//
//   # comment
//   [env]
//   kind = taxi
//   grid_size = 5
//
// Keys are addressed as "section.key". Serialization is canonical (sections
// and keys sorted), so two equal configs always produce identical text.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(const std::string& text);
  static KeyValueConfig load(const std::string& path);

  bool has(const std::string& key) const;
  std::optional<std::string> find(const std::string& key) const;
  // Throws ConfigError when the key is missing.
  const std::string& get(const std::string& key) const;

  std::string get_string(const std::string& key,
                         const std::string& fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<int> get_int_list(const std::string& key,
                                const std::vector<int>& fallback) const;

  void set(const std::string& key, const std::string& value);
  void merge(const KeyValueConfig& overrides);

  const std::map<std::string, std::string>& entries() const {
    return entries_;
  }
  std::string to_string() const;
  void save(const std::string& path) const;

 private:
  std::map<std::string, std::string> entries_;
};

// Parses "a,b,c" or "lo:hi[:step]" (inclusive) into integers.
std::vector<int> parse_int_list(const std::string& text);
std::string format_int_list(const std::vector<int>& values);

// Shortest round-trippable decimal representation.
std::string format_double(double value);

}  // namespace papo

#endif  // PAPO_CONFIG_FILE_HPP_
