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

// Plain-text run configuration: `key = value` per line, `#` comments.
// Keys are the long option names of the subcommand without the dashes.

#ifndef GOVERN_TOOLS_RUN_CONFIG_HPP_
#define GOVERN_TOOLS_RUN_CONFIG_HPP_

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

namespace govern::cli {

using ConfigEntries = std::vector<std::pair<std::string, std::string>>;

/// Reads a config file. Throws UsageError on malformed lines.
ConfigEntries read_run_config(const std::filesystem::path& path);

/// Turns entries into `--key=value` tokens after checking every key names
/// an option of `command`. Unknown keys are usage errors.
std::vector<std::string> config_tokens(const CLI::App& command, const ConfigEntries& entries);

/// Fully resolved settings of `command` in config-file syntax, preceded by
/// a comment naming the command path. Options without a value are left out.
std::string render_manifest(const CLI::App& command, const std::string& command_path);

}  // namespace govern::cli

#endif  // GOVERN_TOOLS_RUN_CONFIG_HPP_
