// Copyright 2026 The mayek-tts Authors
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

// key=value configuration files. `#` starts a comment line; keys are unique;
// values are trimmed. Relative paths in values resolve against the directory
// containing the config file.

#pragma once

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <string>

#include "mayektts/common.hpp"
#include "mayektts/textio.hpp"

namespace mayektts {

class Config {
 public:
  static Config parse(const std::string& text, const std::string& base_dir) {
    Config cfg;
    cfg.base_dir_ = base_dir;
    const auto lines = split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const auto line = trim_view(lines[i]);
      if (line.empty() || line.front() == '#') continue;
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) {
        throw Error(ErrorCode::BadConfig,
                    "config line " + std::to_string(i + 1) + ": expected key=value");
      }
      const std::string key(trim_view(line.substr(0, eq)));
      const std::string value(trim_view(line.substr(eq + 1)));
      if (key.empty()) {
        throw Error(ErrorCode::BadConfig, "config line " + std::to_string(i + 1) + ": empty key");
      }
      if (!cfg.values_.emplace(key, value).second) {
        throw Error(ErrorCode::BadConfig, "config: duplicate key " + key);
      }
    }
    return cfg;
  }

  static Config load(const std::string& path) {
    return parse(read_text_file(path), std::filesystem::path(path).parent_path().string());
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string str(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  std::string require(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw Error(ErrorCode::BadConfig, "config: missing key " + key);
    return it->second;
  }

  uint64_t u64(const std::string& key, uint64_t fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(it->second.c_str(), &end, 10);
    if (end == it->second.c_str() || *end != '\0') {
      throw Error(ErrorCode::BadConfig, "config: bad integer for " + key);
    }
    return v;
  }

  double f64(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    char* end = nullptr;
    const double v = std::strtod(it->second.c_str(), &end);
    if (end == it->second.c_str() || *end != '\0') {
      throw Error(ErrorCode::BadConfig, "config: bad number for " + key);
    }
    return v;
  }

  // Required path value, resolved against the config file's directory.
  std::string path(const std::string& key) const { return resolve(require(key)); }

  std::string resolve(const std::string& value) const {
    const std::filesystem::path p(value);
    if (p.is_absolute() || base_dir_.empty()) return value;
    return (std::filesystem::path(base_dir_) / p).string();
  }

  const std::string& base_dir() const { return base_dir_; }

 private:
  std::map<std::string, std::string> values_;
  std::string base_dir_;
};

}  // namespace mayektts
