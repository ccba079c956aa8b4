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

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace svptta {

// Machine-readable failure categories. The CLI maps each to a distinct exit
// code and prints the category name on stderr.
enum class ErrorCategory {
  kContract = 2,
  kConvergence = 3,
  kNotPositiveDefinite = 4,
  kFormat = 5,
  kConfig = 6,
  kTraining = 7,
  kIo = 8,
};

std::string_view category_name(ErrorCategory category);

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class ContractViolation : public Error {
 public:
  explicit ContractViolation(const std::string& message)
      : Error(ErrorCategory::kContract, message) {}
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& message, double residual)
      : Error(ErrorCategory::kConvergence, message), residual_(residual) {}

  // Largest normalized off-diagonal Gram term at the time of giving up.
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class NotPositiveDefinite : public Error {
 public:
  NotPositiveDefinite(const std::string& message, std::size_t pivot)
      : Error(ErrorCategory::kNotPositiveDefinite, message), pivot_(pivot) {}

  std::size_t pivot() const noexcept { return pivot_; }

 private:
  std::size_t pivot_;
};

class FormatError : public Error {
 public:
  FormatError(const std::string& message, std::size_t offset)
      : Error(ErrorCategory::kFormat, message), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message)
      : Error(ErrorCategory::kConfig, message) {}
};

class TrainingError : public Error {
 public:
  TrainingError(const std::string& message, std::size_t epoch)
      : Error(ErrorCategory::kTraining, message), epoch_(epoch) {}

  std::size_t epoch() const noexcept { return epoch_; }

 private:
  std::size_t epoch_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message)
      : Error(ErrorCategory::kIo, message) {}
};

// Throws ContractViolation with `message` when `condition` is false.
inline void require(bool condition, const char* message) {
  if (!condition) throw ContractViolation(message);
}

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ContractViolation(message);
}

}  // namespace svptta
