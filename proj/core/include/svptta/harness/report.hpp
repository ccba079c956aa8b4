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

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "svptta/adapt.hpp"
#include "svptta/stats.hpp"

namespace svptta {

using Json = nlohmann::ordered_json;

inline constexpr const char* kReportSchema = "svptta.report/1";
inline constexpr const char* kCheckpointSchema = "svptta.checkpoint/1";

Json to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);
Json to_json(const AdaptConfig& c);
AdaptConfig adapt_config_from_json(const Json& j);

Json to_json(const StreamReport& r);
// Pretty-printed document with a trailing newline. Byte-stable for equal input.
std::string dump_document(const Json& doc);
void write_document(const std::filesystem::path& path, const Json& doc);
Json read_document(const std::filesystem::path& path);

Json to_json(const ClassStats& s);
ClassStats class_stats_from_json(const Json& j);

// Full adaptation state (parameters, optimizer moments, class statistics,
// batch counter and random stream) for resumable runs.
Json checkpoint_to_json(const AdaptState& state, const AdaptConfig& config);
AdaptState checkpoint_from_json(const Json& j, AdaptConfig* config = nullptr);

}  // namespace svptta
