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

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"
#include "layered_options.hpp"
#include "svptta/error.hpp"

namespace {

int fail(svptta::ErrorCategory category, const std::string& message) {
  std::fprintf(stderr, "error[%s]: %s\n", std::string(svptta::category_name(category)).c_str(),
               message.c_str());
  return static_cast<int>(category);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app("Test-time adaptation with singular-value penalization and online "
               "semantic augmentation",
               "svptta");
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  svptta::cli::add_commands(app);

  try {
    const std::vector<std::string> layered =
        svptta::cli::layer_arguments(app, std::vector<std::string>(argv, argv + argc));
    std::vector<std::string> rest(layered.rbegin(), layered.rend() - 1);
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return fail(svptta::ErrorCategory::kConfig, e.what());
  } catch (const svptta::Error& e) {
    return fail(e.category(), e.what());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error[internal]: %s\n", e.what());
    return 1;
  }
  return svptta::cli::command_status();
}
