// Copyright 2026 The nsgame Authors.
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

// Entry point of the nsgame command-line tool, callable in-process so tests
// can pin exit codes and report bytes.

#ifndef NSGAME_TOOLS_CLI_H_
#define NSGAME_TOOLS_CLI_H_

#include <ostream>

namespace nsgame {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;      // config, flag or input errors
inline constexpr int kExitSignaling = 2;  // simulate: quarantined trials
inline constexpr int kExitNsViolation = 3;

// Reports go to `out` unless --out or NSGAME_OUTPUT_DIR redirect them;
// diagnostics and verdict lines go to `err`.
int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nsgame

#endif  // NSGAME_TOOLS_CLI_H_
