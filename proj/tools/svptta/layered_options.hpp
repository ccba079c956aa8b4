// Copyright 2026 The svptta Authors
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

#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"

namespace svptta::cli {

inline constexpr const char* kEnvPrefix = "SVPTTA_";

// Reads a flat `key = value` file. Blank lines and lines starting with '#'
// are ignored. Throws ConfigError on malformed lines or duplicate keys.
std::map<std::string, std::string> read_flat_config(const std::string& path);

// Rewrites argv so that, for the selected subcommand, values come from
// flags first, then SVPTTA_<KEY> environment variables, then the --config
// file, then built-in defaults. Config and environment keys are the long
// option names (e.g. batch_size). Unknown config keys are a ConfigError.
std::vector<std::string> layer_arguments(const CLI::App& app,
                                         const std::vector<std::string>& argv);

}  // namespace svptta::cli
