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

// Hamiltonians, drives and collapse operators of the pumped KPO coupled to a
// lossy ancilla. hbar = 1; every frequency and rate is an angular quantity in
// rad/s and every time is in seconds.

#include <span>
#include <string_view>
#include <vector>

#include "kpo/fock.hpp"

namespace kpo::model {

struct SystemParams {
    double delta_kpo = 0.0;  // omega_KPO - omega_p/4
    double kerr = 0.0;       // K
    double pump = 0.0;       // four-photon pump amplitude P
    double delta_an = 0.0;   // omega_an - omega_p/4
    double g = 0.0;          // KPO-ancilla exchange coupling
    // Lab-frame bookkeeping only.
    double omega_kpo = 0.0;
    double omega_an = 0.0;
    double omega_p = 0.0;

    /// The parameter block used throughout the correction study:
    /// omega_KPO/2pi = 2.98 GHz, K/2pi = 20 MHz, Delta_KPO/2pi = 30 MHz,
    /// P/2pi = 5.5405 MHz, omega_an/2pi = 4 GHz, g/2pi = 7 MHz.
    static SystemParams reference();

    /// Fill the lab-frame fields and delta_an from omega_kpo, delta_kpo and omega_an.
    static SystemParams from_lab(double omega_kpo, double kerr, double delta_kpo, double pump,
                                 double omega_an, double g);

    /// Throws kpo::Error(invalid_argument) when kerr <= 0 or pump < 0.
    void validate() const;
};

enum class ToneKind { correction, reset };

struct ToneParams {
    double amplitude = 0.0;  // A_cor or A_reset
    double frequency = 0.0;  // omega_cor or omega_reset (pump frame)
    ToneKind kind = ToneKind::correction;
};

struct NoiseParams {
    double gamma_kpo = 0.0;  // single-photon loss
    double n_th = 0.0;       // thermal photon number of the KPO
    double gamma_phi = 0.0;  // KPO dephasing
    double gamma_an = 0.0;   // ancilla single-photon loss

    /// gamma_KPO = 1/(50 us), gamma_an/2pi = 0.557 MHz, no gain, no dephasing.
    static NoiseParams reference();
    void validate() const;
};

enum class Frame { full_cosine, ancilla_rwa };

std::string_view to_string(Frame frame);
Frame frame_from_string(std::string_view name);

/// H(t) = H0 + sum_j amplitude_j (X_j e^{-i w_j t} + X_j^dag e^{+i w_j t}).
struct Drive {
    Operator op;
    double amplitude = 0.0;
    double frequency = 0.0;
};

struct TimeDependentHamiltonian {
    Operator static_part;
    std::vector<Drive> drives;

    Operator at(double t) const;
    /// Writes H(t) into `out` (sized to the operator dimension).
    void evaluate(double t, Matrix& out) const;
};

/// Static Hamiltonian and pair-creation drive operator of the KPO (x) ancilla system.
struct FullSystem {
    Operator h_static;  // H_KPO (x) I + Delta_an b^dag b + g (a^dag b + a b^dag)
    Operator drive_op;  // a^dag b^dag + a b
    double delta_an = 0.0;

    const Dims& dims() const { return h_static.dims(); }
};

/// Delta a^dag a - (K/2) a^dag a^dag a a + (P/2)(a^dag^4 + a^4).
Operator build_kpo_hamiltonian(const SystemParams& p, int dim_a);

FullSystem build_full_system(const SystemParams& p, int dim_a, int dim_b);

/// Time-dependent generator of the requested frame.
///
/// full_cosine: H_static + sum A cos(w t) drive_op.
/// ancilla_rwa: the frame rotating the ancilla at Delta_an. The exchange term
/// keeps its e^{-i Delta_an t} oscillation; each tone keeps only its
/// co-rotating half (A/2)(a^dag b^dag e^{-i(w - Delta_an) t} + h.c.).
TimeDependentHamiltonian frame_hamiltonian(const FullSystem& sys, std::span<const ToneParams> tones,
                                           Frame frame);

/// Generator in the frame where H_static is time independent, with tones
/// expressed according to `frame` (full cosine, or co-rotating half only).
/// Unitarily equivalent to frame_hamiltonian(); used for interaction-picture
/// propagation.
TimeDependentHamiltonian static_frame_hamiltonian(const FullSystem& sys,
                                                  std::span<const ToneParams> tones, Frame frame);

Operator hamiltonian_at(double t, const FullSystem& sys, std::span<const ToneParams> tones,
                        Frame frame);

/// a^dag^2 + a^2 on the KPO mode.
Operator build_two_photon_drive(int dim_a);

/// [sqrt(gK (1+nth)) a, sqrt(gK nth) a^dag, sqrt(gphi) a^dag a, sqrt(gan) b], zero rates omitted.
std::vector<Operator> collapse_operators(const NoiseParams& noise, int dim_a, int dim_b);

}  // namespace kpo::model
