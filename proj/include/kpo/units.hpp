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

// Conversions between the lab notation used in configs (f/2pi in MHz, times in
// microseconds) and the internal SI angular units (rad/s, s).

#include <numbers>

namespace kpo::units {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

constexpr double mhz(double f_over_2pi_mhz) { return two_pi * f_over_2pi_mhz * 1e6; }
constexpr double khz(double f_over_2pi_khz) { return two_pi * f_over_2pi_khz * 1e3; }
constexpr double to_mhz(double omega) { return omega / (two_pi * 1e6); }

constexpr double us(double t_us) { return t_us * 1e-6; }
constexpr double to_us(double t) { return t * 1e6; }

/// Rate from a lifetime given in microseconds.
constexpr double rate_from_us(double lifetime_us) { return 1.0 / us(lifetime_us); }

}  // namespace kpo::units
