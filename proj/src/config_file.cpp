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

#include "papo/config_file.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "papo/errors.hpp"

namespace papo {
namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

int parse_int(const std::string& text, const std::string& context) {
  int value = 0;
  const std::string t = trim(text);
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    throw ConfigError("expected an integer for " + context + ", got '" + text +
                      "'");
  }
  return value;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(const std::string& text) {
  KeyValueConfig config;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("line " + std::to_string(line_number) +
                          ": unterminated section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_number) +
                        ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) {
      throw ConfigError("line " + std::to_string(line_number) + ": empty key");
    }
    config.set(section.empty() ? key : section + "." + key,
               trim(line.substr(eq + 1)));
  }
  return config;
}

KeyValueConfig KeyValueConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

bool KeyValueConfig::has(const std::string& key) const {
  return entries_.count(key) > 0;
}

std::optional<std::string> KeyValueConfig::find(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

const std::string& KeyValueConfig::get(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError("missing config key '" + key + "'");
  return it->second;
}

std::string KeyValueConfig::get_string(const std::string& key,
                                       const std::string& fallback) const {
  return find(key).value_or(fallback);
}

long long KeyValueConfig::get_int(const std::string& key,
                                  long long fallback) const {
  const auto value = find(key);
  if (!value) return fallback;
  // Accept "2e5"-style literals for episode budgets.
  std::size_t used = 0;
  double parsed = 0.0;
  try {
    parsed = std::stod(*value, &used);
  } catch (const std::exception&) {
    throw ConfigError("expected an integer for " + key + ", got '" + *value +
                      "'");
  }
  if (used != value->size() || parsed != static_cast<long long>(parsed)) {
    throw ConfigError("expected an integer for " + key + ", got '" + *value +
                      "'");
  }
  return static_cast<long long>(parsed);
}

double KeyValueConfig::get_double(const std::string& key,
                                  double fallback) const {
  const auto value = find(key);
  if (!value) return fallback;
  std::size_t used = 0;
  double parsed = 0.0;
  try {
    parsed = std::stod(*value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value->size()) {
    throw ConfigError("expected a number for " + key + ", got '" + *value +
                      "'");
  }
  return parsed;
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  const auto value = find(key);
  if (!value) return fallback;
  if (*value == "true" || *value == "1" || *value == "yes") return true;
  if (*value == "false" || *value == "0" || *value == "no") return false;
  throw ConfigError("expected a boolean for " + key + ", got '" + *value + "'");
}

std::vector<int> KeyValueConfig::get_int_list(
    const std::string& key, const std::vector<int>& fallback) const {
  const auto value = find(key);
  if (!value) return fallback;
  return parse_int_list(*value);
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
  entries_[key] = value;
}

void KeyValueConfig::merge(const KeyValueConfig& overrides) {
  for (const auto& [key, value] : overrides.entries_) entries_[key] = value;
}

std::string KeyValueConfig::to_string() const {
  std::ostringstream out;
  std::string current;
  bool first = true;
  for (const auto& [key, value] : entries_) {
    const auto dot = key.find('.');
    const std::string section =
        dot == std::string::npos ? "" : key.substr(0, dot);
    const std::string name = dot == std::string::npos ? key : key.substr(dot + 1);
    if (first || section != current) {
      if (!first) out << "\n";
      if (!section.empty()) out << "[" << section << "]\n";
      current = section;
      first = false;
    }
    out << name << " = " << value << "\n";
  }
  return out.str();
}

void KeyValueConfig::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write config file '" + path + "'");
  out << to_string();
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> values;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      values.push_back(parse_int(item, "list item"));
      continue;
    }
    const auto colon2 = item.find(':', colon + 1);
    const int lo = parse_int(item.substr(0, colon), "range start");
    const int hi = parse_int(
        item.substr(colon + 1, colon2 == std::string::npos
                                   ? std::string::npos
                                   : colon2 - colon - 1),
        "range end");
    const int step = colon2 == std::string::npos
                         ? 1
                         : parse_int(item.substr(colon2 + 1), "range step");
    if (step <= 0) throw ConfigError("range step must be positive in '" + item + "'");
    for (int v = lo; v <= hi; v += step) values.push_back(v);
  }
  return values;
}

std::string format_int_list(const std::vector<int>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(values[i]);
  }
  return out;
}

std::string format_double(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

}  // namespace papo
