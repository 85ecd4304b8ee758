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

#include "screenrep/error.hpp"

#include <utility>

namespace screenrep {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSyntax: return "syntax";
    case ErrorCode::kSchema: return "schema";
    case ErrorCode::kRange: return "range";
    case ErrorCode::kUnknownVideo: return "unknown-video";
    case ErrorCode::kDuplicateVideo: return "duplicate-video";
    case ErrorCode::kDuplicateFrame: return "duplicate-frame";
    case ErrorCode::kNonIncreasingFrame: return "non-increasing-frame";
    case ErrorCode::kBehindCamera: return "behind-camera";
    case ErrorCode::kDegenerateInput: return "degenerate-input";
    case ErrorCode::kArity: return "arity";
    case ErrorCode::kInvalidDirection: return "invalid-direction";
    case ErrorCode::kEmptyInput: return "empty-input";
    case ErrorCode::kInfeasibleK: return "infeasible-k";
    case ErrorCode::kUndefinedSilhouette: return "undefined-silhouette";
    case ErrorCode::kIncompatibleSummaries: return "incompatible-summaries";
    case ErrorCode::kConfig: return "config";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

ErrorClass classify(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfig: return ErrorClass::kConfig;
    case ErrorCode::kIo: return ErrorClass::kIo;
    default: return ErrorClass::kData;
  }
}

namespace {

std::string format_parse_message(std::size_t line, const std::string& path,
                                 const std::string& detail) {
  std::string msg = "line " + std::to_string(line) + ": ";
  if (!path.empty()) msg += path + ": ";
  return msg + detail;
}

}  // namespace

ParseError::ParseError(ErrorCode code, std::size_t line, std::string path,
                       std::string detail)
    : Error(code, format_parse_message(line, path, detail)),
      line_(line),
      path_(std::move(path)),
      detail_(std::move(detail)) {}

}  // namespace screenrep
