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

#include "svptta/error.hpp"

namespace svptta {

std::string_view category_name(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kContract: return "contract";
    case ErrorCategory::kConvergence: return "convergence";
    case ErrorCategory::kNotPositiveDefinite: return "not_positive_definite";
    case ErrorCategory::kFormat: return "format";
    case ErrorCategory::kConfig: return "config";
    case ErrorCategory::kTraining: return "training";
    case ErrorCategory::kIo: return "io";
  }
  return "unknown";
}

}  // namespace svptta
