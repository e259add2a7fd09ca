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

// Three-parameter exponential fit y(t) = A e^{-t/T} + c.
//
// Seeded from a three-point estimate of the offset followed by a log-linear
// regression, then refined with damped Gauss-Newton (Levenberg-Marquardt) in
// a rescaled time variable.

#include <limits>
#include <span>
#include <string_view>

#include "kpo/lindblad.hpp"

namespace kpo::fit {

struct FitOptions {
    int max_iterations = 200;
    double step_tolerance = 1e-13;  // relative parameter change at convergence
};

struct ExponentialFit {
    double amplitude = 0.0;  // A, referenced to t = 0
    double rate = 0.0;       // 1/T in 1/s; 0 when the data are flat
    double offset = 0.0;     // c
    double residual = 0.0;   // RMS of the residuals
    int iterations = 0;
    bool converged = false;  // false: the seed estimate is returned

    /// T = 1/rate; +inf for flat data.
    double time() const {
        return rate > 0.0 ? 1.0 / rate : std::numeric_limits<double>::infinity();
    }
};

/// Throws kpo::Error(invalid_argument) with fewer than 8 samples, mismatched
/// lengths, non-finite values or non-increasing times.
ExponentialFit fit_exponential(std::span<const double> t, std::span<const double> y,
                               const FitOptions& options = {});

/// Fit one channel of a time series, skipping samples with t < t_min.
ExponentialFit fit_exponential(const lindblad::TimeSeries& series, std::string_view channel,
                               double t_min = 0.0, const FitOptions& options = {});

}  // namespace kpo::fit
