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

// The screenrep command line: validate, analyze and fixture.
//
// Exit codes: 0 ok, 1 data error, 2 I/O error, 3 config error. Every error
// is a single stderr line starting with "error[data]", "error[io]" or
// "error[config]".

#pragma once

#include <ostream>

namespace screenrep::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitData = 1;
inline constexpr int kExitIo = 2;
inline constexpr int kExitConfig = 3;

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace screenrep::cli
