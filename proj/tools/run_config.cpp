// Copyright 2026  The govern-distill Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "run_config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "govern/core.hpp"

namespace govern::cli {

namespace {

// Options that steer the run itself rather than its results.
const std::set<std::string> kNotInManifest = {"help", "config", "manifest"};

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

}  // namespace

ConfigEntries read_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file: " + path.string());
  ConfigEntries entries;
  std::string line;
  for (int line_no = 1; std::getline(in, line); ++line_no) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path.string() + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    std::string key = trim(line.substr(0, eq));
    while (!key.empty() && key.front() == '-') key.erase(0, 1);
    if (key.empty()) throw UsageError(path.string() + ":" + std::to_string(line_no) + ": empty key");
    entries.emplace_back(key, unquote(trim(line.substr(eq + 1))));
  }
  return entries;
}

std::vector<std::string> config_tokens(const CLI::App& command, const ConfigEntries& entries) {
  std::vector<std::string> tokens;
  for (const auto& [key, value] : entries) {
    if (kNotInManifest.count(key) || command.get_option_no_throw("--" + key) == nullptr) {
      throw UsageError("unknown config key '" + key + "' for command '" + command.get_name() + "'");
    }
    tokens.push_back("--" + key + "=" + value);
  }
  return tokens;
}

std::string render_manifest(const CLI::App& command, const std::string& command_path) {
  std::ostringstream out;
  out << "# govern " << command_path << '\n';
  for (const CLI::Option* opt : command.get_options()) {
    const std::string name = opt->get_single_name();
    if (kNotInManifest.count(name) || opt->get_lnames().empty()) continue;
    std::string value;
    if (opt->count() > 0) {
      value = opt->results().back();
    } else {
      value = opt->get_default_str();
      if (value.empty() && opt->get_expected_min() == 0) value = "false";
    }
    if (value.empty()) continue;
    out << name << " = " << value << '\n';
  }
  return out.str();
}

}  // namespace govern::cli
