// Copyright 2026 The screenrep Authors.
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

namespace screenrep {

enum class ErrorCode {
  // records
  kSyntax,
  kSchema,
  kRange,
  kUnknownVideo,
  kDuplicateVideo,
  kDuplicateFrame,
  kNonIncreasingFrame,
  // pose_solver
  kBehindCamera,
  kDegenerateInput,
  kArity,
  kInvalidDirection,
  // color_analysis
  kEmptyInput,
  kInfeasibleK,
  kUndefinedSilhouette,
  // representation_metrics
  kIncompatibleSummaries,
  // report_cli
  kConfig,
  kIo,
};

std::string_view to_string(ErrorCode code);

// Broad classes used to pick a process exit status.
enum class ErrorClass { kData, kIo, kConfig };

ErrorClass classify(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised while reading a JSONL stream. `line` is 1-based; `path` is the
// JSON path of the offending field (e.g. "faces[0].landmarks").
class ParseError : public Error {
 public:
  ParseError(ErrorCode code, std::size_t line, std::string path,
             std::string detail);

  std::size_t line() const noexcept { return line_; }
  const std::string& path() const noexcept { return path_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t line_;
  std::string path_;
  std::string detail_;
};

}  // namespace screenrep
