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

// Time-dependent Lindblad master-equation integration with observable
// sampling.
//
// Two propagation schemes share the same DOPRI5 stepper:
//
//  * direct: the density matrix is integrated in the Fock basis of the chosen
//    frame. Step sizes are bounded by the spectral width of the truncated
//    Hamiltonian and by the ~GHz ancilla detuning. Serial reference path.
//
//  * interaction_picture: H0 (the time-independent part of the generator in
//    the static frame, exchange coupling included) is diagonalised once and
//    the integrated variable is rho_I = e^{iH0 t} rho e^{-iH0 t} in its
//    eigenbasis. Only the tones and the dissipators drive rho_I, so steps
//    follow the slow dynamics. Exact change of variables; default.
//
// The interaction-picture path also splits the Hilbert space into sectors
// that H0 and the tones do not connect (total excitation parity for the
// KPO-ancilla system). When every collapse operator maps a sector onto a
// single sector and the initial state has no inter-sector coherence, rho
// stays block diagonal and only the diagonal blocks are integrated.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "kpo/dopri5.hpp"
#include "kpo/fock.hpp"
#include "kpo/model.hpp"

namespace kpo::lindblad {

enum class Propagation { interaction_picture, direct };
enum class KernelChoice { fast, reference };

std::string_view to_string(Propagation p);

struct Tolerances {
    double rel = 1e-8;
    double abs = 1e-10;
};

/// Either a Hermitian operator (expectation value) or a state whose
/// projective population is recorded. KPO-only states are lifted with the
/// ancilla identity.
struct Observable {
    std::string name;
    std::variant<Operator, StateVector> what;
};

struct EvolveSpec {
    DensityState initial;
    double t_final = 0.0;
    std::vector<double> sample_times;  // sorted, within [0, t_final]
    std::vector<model::ToneParams> tones;
    model::Frame frame = model::Frame::ancilla_rwa;
    Tolerances tolerances;
    std::vector<Observable> observables;

    Propagation propagation = Propagation::interaction_picture;
    KernelChoice kernel = KernelChoice::fast;
    bool monitor_positivity = false;
    bool keep_final_state = false;
};

struct Diagnostics {
    std::vector<double> trace_deviation;  // |Tr rho - 1| per sample
    std::vector<double> hermiticity;      // ||rho - rho^dag||_F per sample (bounds the entrywise max)
    std::vector<double> min_eigenvalue;   // only when monitored
    StepStats steps;
    int sectors = 1;  // diagonal blocks integrated
    double wall_seconds = 0.0;
    double max_trace_drift = 0.0;
    bool trace_flagged = false;  // drift exceeded 1e-6
};

struct TimeSeries {
    std::vector<double> times;
    std::vector<std::pair<std::string, std::vector<double>>> channels;
    Diagnostics diagnostics;
    std::optional<DensityState> final_state;

    const std::vector<double>& channel(std::string_view name) const;
    std::vector<double>& add_channel(std::string name);
    bool has_channel(std::string_view name) const;
};

/// Uniform sample grid 0, dt, 2dt, ... up to t_final (inclusive within rounding).
std::vector<double> uniform_samples(double t_final, double dt);

/// Integrate the KPO (x) ancilla system with the given tones in spec.frame.
/// Channels are reported in spec.frame.
TimeSeries evolve(const model::FullSystem& sys, std::span<const Operator> collapse,
                  const EvolveSpec& spec);

/// Integrate an explicit generator as given (spec.tones and spec.frame are
/// ignored).
TimeSeries evolve(const model::TimeDependentHamiltonian& h, std::span<const Operator> collapse,
                  const EvolveSpec& spec);

}  // namespace kpo::lindblad
