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

#include "layered_options.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>

#include "svptta/error.hpp"

namespace svptta::cli {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string env_name(const std::string& key) {
  std::string out = kEnvPrefix;
  for (char c : key) out += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

// Scalar options of `sub` that may be layered, by long name.
std::vector<std::string> layerable(const CLI::App& sub) {
  std::vector<std::string> names;
  for (const CLI::Option* opt : sub.get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string& name = opt->get_lnames().front();
    if (name == "help" || name == "config") continue;
    if (opt->get_expected_max() > 1) continue;
    names.push_back(name);
  }
  return names;
}

}  // namespace

std::map<std::string, std::string> read_flat_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(number) + ": expected key = value");
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) throw ConfigError(path + ":" + std::to_string(number) + ": empty key");
    if (!out.emplace(key, value).second) {
      throw ConfigError(path + ":" + std::to_string(number) + ": duplicate key '" + key + "'");
    }
  }
  return out;
}

std::vector<std::string> layer_arguments(const CLI::App& app,
                                         const std::vector<std::string>& argv) {
  if (argv.size() < 2) return argv;
  const CLI::App* sub = nullptr;
  for (const CLI::App* s : app.get_subcommands({}))
    if (s->get_name() == argv[1]) sub = s;
  if (sub == nullptr) return argv;

  std::map<std::string, std::string> config;
  for (std::size_t i = 2; i < argv.size(); ++i) {
    if (argv[i] == "--config" && i + 1 < argv.size()) {
      config = read_flat_config(argv[i + 1]);
    } else if (argv[i].rfind("--config=", 0) == 0) {
      config = read_flat_config(argv[i].substr(9));
    }
  }
  const std::vector<std::string> names = layerable(*sub);
  for (const auto& [key, value] : config) {
    if (std::find(names.begin(), names.end(), key) == names.end()) {
      throw ConfigError("config key '" + key + "' is not an option of '" + sub->get_name() + "'");
    }
  }

  // Later occurrences win, so defaults from the file go first.
  std::vector<std::string> out(argv.begin(), argv.begin() + 2);
  for (const std::string& name : names) {
    if (auto it = config.find(name); it != config.end()) out.push_back("--" + name + "=" + it->second);
  }
  for (const std::string& name : names) {
    if (const char* v = std::getenv(env_name(name).c_str())) out.push_back("--" + name + "=" + v);
  }
  out.insert(out.end(), argv.begin() + 2, argv.end());
  return out;
}

}  // namespace svptta::cli
