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

#include "CLI11.hpp"

namespace svptta::cli {

// Registers gen, train, adapt, sweep, ablate, diag and gradcheck on `app`.
// Subcommand callbacks throw svptta::Error subclasses on failure.
void add_commands(CLI::App& app);

// Process exit status of the last command that ran (0 unless a check failed).
int command_status();

}  // namespace svptta::cli
