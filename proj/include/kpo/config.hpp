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

// Run configuration as a JSON document with nested sections.
//
// User-facing units follow the lab notation: frequencies are f/2pi in MHz,
// times in microseconds, and dephasing rates in 1/us. Conversion to the
// internal rad/s and seconds happens in to_experiment() and the accessors
// below, nowhere else.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "kpo/experiments.hpp"

namespace kpo::config {

using Json = nlohmann::ordered_json;

/// Every recognised key with its default value. Keys appear in this order in
/// resolved configs and manifests.
Json defaults();

/// Overlay `user` onto the defaults. Unknown keys and type mismatches are
/// collected in `issues` (dotted paths) and skipped.
Json merge(const Json& user, std::vector<std::string>& issues);

/// Read a config file, or the "config" member of a run manifest. Throws
/// kpo::Error(config) when the file is missing or not valid JSON.
Json read_file(const std::filesystem::path& path);

/// Apply one "dotted.key=value" override. The value is parsed as JSON and
/// falls back to a plain string. Throws kpo::Error(config) on unknown keys or
/// a type that does not match the default.
void apply_override(Json& cfg, std::string_view assignment);

/// All invariant violations of a resolved config; empty when valid.
std::vector<std::string> violations(const Json& cfg);

/// Physical parameters and run controls in internal units.
experiments::ExperimentConfig to_experiment(const Json& cfg);

/// Helpers for the experiment sections.
double mhz_at(const Json& cfg, std::string_view section, std::string_view key);
double us_at(const Json& cfg, std::string_view section, std::string_view key);
std::vector<double> mhz_list(const Json& cfg, std::string_view section, std::string_view key);

}  // namespace kpo::config
