// Copyright 2026 the soiq authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace soiq {

// Stable error categories. The C API and the CLI exit codes are derived
// from these, so the numeric values must not be reordered.
enum class ErrorCode {
  Usage = 1,
  Config = 2,
  Extraction = 3,
  Provider = 4,
  Validation = 5,
  Io = 6,
  Internal = 7,
  Schema = 8,
  Cycle = 9,
  NotFound = 10,
  Parse = 11,
  Budget = 12,
  Scheduling = 13,
  Script = 14,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

struct UsageError : Error {
  explicit UsageError(std::string m) : Error(ErrorCode::Usage, std::move(m)) {}
};
struct ConfigError : Error {
  explicit ConfigError(std::string m) : Error(ErrorCode::Config, std::move(m)) {}
};
struct ExtractionError : Error {
  ExtractionError(std::string m, std::string raw_output = {})
      : Error(ErrorCode::Extraction, std::move(m)), raw(std::move(raw_output)) {}
  // Last raw provider output, kept for inspection when parsing failed.
  std::string raw;
};
struct ValidationError : Error {
  explicit ValidationError(std::string m) : Error(ErrorCode::Validation, std::move(m)) {}
};
struct IoError : Error {
  explicit IoError(std::string m) : Error(ErrorCode::Io, std::move(m)) {}
};
struct SchemaError : Error {
  explicit SchemaError(std::string m) : Error(ErrorCode::Schema, std::move(m)) {}
};
struct CycleError : Error {
  explicit CycleError(std::string m) : Error(ErrorCode::Cycle, std::move(m)) {}
};
struct NotFoundError : Error {
  explicit NotFoundError(std::string m) : Error(ErrorCode::NotFound, std::move(m)) {}
};
struct ParseError : Error {
  explicit ParseError(std::string m) : Error(ErrorCode::Parse, std::move(m)) {}
};
// Remote provider failure. `retryable` marks transient conditions the
// gateway may retry with backoff.
struct TransportError : Error {
  explicit TransportError(std::string m, bool transient = true)
      : Error(ErrorCode::Provider, std::move(m)), retryable(transient) {}
  bool retryable;
};
struct BudgetError : Error {
  explicit BudgetError(std::string m) : Error(ErrorCode::Budget, std::move(m)) {}
};
struct SchedulingError : Error {
  explicit SchedulingError(std::string m) : Error(ErrorCode::Scheduling, std::move(m)) {}
};
// Raised when a scripted test provider runs out of replies. Never retried:
// an exhausted script is a defect in the test fixture, not a transient fault.
struct ScriptError : Error {
  explicit ScriptError(std::string m) : Error(ErrorCode::Script, std::move(m)) {}
};
// The exploration loop ran out of tool-call budget before an idea emerged.
struct ExplorationError : Error {
  explicit ExplorationError(std::string m) : Error(ErrorCode::Validation, std::move(m)) {}
};

}  // namespace soiq
