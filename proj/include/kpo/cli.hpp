// Copyright 2026 The kpo-aqec Authors
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

// Command-line front end. Lives in the library so tests can drive it without
// spawning processes.

#include <ostream>
#include <string>
#include <vector>

namespace kpo::cli {

inline constexpr const char* kToolName = "kpo-aqec";
inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int {
    ok = 0,
    failure = 1,   // anything unexpected (I/O, internal)
    usage = 2,     // bad flags, unknown experiment
    config = 3,    // unreadable or invalid configuration
    physics = 4,   // truncation, missing degeneracy, step underflow, fit failure
};

/// Experiment subcommands in the order they are listed by --help.
const std::vector<std::string>& experiment_names();

/// Parse argv, run the experiment and write its artifacts. The run directory
/// and a one-line JSON status go to `out`; errors go to `err` as a JSON record
/// {"error": {"kind", "message", "exit_code"}}.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace kpo::cli
