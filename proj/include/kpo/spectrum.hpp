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

// Quasienergy structure of the pumped KPO. The four-photon pump only couples
// Fock states n and n +- 4, so H_KPO is block diagonal in n mod 4 and each
// block is diagonalised on its own.

#include <array>
#include <optional>
#include <vector>

#include "kpo/fock.hpp"
#include "kpo/model.hpp"

namespace kpo::spectrum {

/// All eigenpairs of one mod-4 block, ordered by decreasing quasienergy.
struct BlockSpectrum {
    int k = 0;
    std::vector<double> energies;       // rad/s
    std::vector<StateVector> vectors;   // full KPO space, phase fixed
};

struct ModEigenstate {
    int k = 0;
    double quasienergy = 0.0;  // rad/s
    double energy = 0.0;       // (E_k - E_0mod) / K
    StateVector vector;
    std::vector<cplx> coeffs;  // C_n^(k): amplitude of |4n+k>
    double mean_photon = 0.0;
    double tail_weight = 0.0;  // weight in the last three Fock levels
    bool bare_fock = false;  // P == 0: states are Fock states, classification is trivial
};

using InformationSpace = std::array<ModEigenstate, 4>;

/// Diagonalise block k of H_KPO. Eigenvectors are phase fixed so the
/// largest-magnitude coefficient is real positive (ties: lowest n).
BlockSpectrum block_spectrum(const model::SystemParams& p, int dim_a, int k);

/// Highest-quasienergy eigenstate of every mod-4 block.
///
inline constexpr double kDefaultTailWeight = 1e-6;

/// Throws kpo::Error(truncation) when any of the four states keeps more than
/// `max_tail_weight` of its weight in the last three Fock levels.
InformationSpace information_space(const model::SystemParams& p, int dim_a,
                                   double max_tail_weight = kDefaultTailWeight);

struct PumpSearch {
    double min_ratio = 0.05;  // P/K scan window
    double max_ratio = 0.35;
    int points = 31;
    double rel_tol = 1e-6;
};

/// Pump amplitude where |0_mod> and |1_mod> are degenerate. Coarse scan for a
/// sign change of E_0mod - E_1mod, then bisection.
double find_degenerate_pump(const model::SystemParams& p, int dim_a, const PumpSearch& search = {});

/// |(E_0 + E_1)/2 - (E_2 + E_3)/2|
double energy_gap(const InformationSpace& states);

/// |<bra| a |ket>|^2 on the KPO mode.
double transition_element(const StateVector& bra, const StateVector& ket);

/// |<k_mod^h| a |ket>|^2 where k_mod^h is the highest-quasienergy HEL state of
/// block k, i.e. the second eigenstate of that block.
double hel_transition_element(const model::SystemParams& p, int dim_a, int k, const StateVector& ket);

/// Fraction of photon-loss jumps out of `ket` that land in `bra`:
/// |<bra|a|ket>|^2 / <ket|a^dag a|ket>.
double loss_branching(const StateVector& bra, const StateVector& ket);

struct LogicalFrame {
    StateVector zero_l;    // |1_mod>
    StateVector one_l;     // |3_mod>
    StateVector plus_l;
    StateVector minus_l;
    StateVector iplus_l;
    StateVector iminus_l;
    Operator code_projector;   // |1_mod><1_mod| + |3_mod><3_mod|
    Operator error_projector;  // |0_mod><0_mod| + |2_mod><2_mod|
    double omega_gap = 0.0;
    InformationSpace states;
};

LogicalFrame logical_frame(const InformationSpace& states);
LogicalFrame logical_frame(const model::SystemParams& p, int dim_a,
                           double max_tail_weight = kDefaultTailWeight);

struct QuasienergyRow {
    double pump = 0.0;
    std::array<double, 4> energy{};       // (E_k - E_0mod)/K
    std::array<double, 4> quasienergy{};  // absolute, rad/s
};

/// Information-space quasienergies for every pump value. Points are
/// independent and evaluated in parallel.
std::vector<QuasienergyRow> quasienergy_scan(const model::SystemParams& p,
                                             const std::vector<double>& pump_values, int dim_a);

// ---------------------------------------------------------------------------
// Wigner function

/// Uniform phase-space grid in alpha = x + i p.
struct WignerGrid {
    double x_min = -4.0, x_max = 4.0;
    double p_min = -4.0, p_max = 4.0;
    int nx = 101, np = 101;

    double x(int i) const { return nx == 1 ? x_min : x_min + (x_max - x_min) * i / (nx - 1); }
    double p(int j) const { return np == 1 ? p_min : p_min + (p_max - p_min) * j / (np - 1); }
    double dx() const { return nx == 1 ? 0.0 : (x_max - x_min) / (nx - 1); }
    double dp() const { return np == 1 ? 0.0 : (p_max - p_min) / (np - 1); }

    /// Square grid of half-width sqrt(2 nbar) + 2.
    static WignerGrid auto_sized(double mean_photon, int points = 101);
};

struct WignerField {
    WignerGrid grid;
    std::vector<double> values;  // row-major: values[j * nx + i] = W(x_i, p_j)

    double at(int i, int j) const { return values[static_cast<std::size_t>(j) * grid.nx + i]; }
    /// Riemann sum of W dx dp.
    double integral() const;
};

/// W(alpha) = (2/pi) Tr[D(alpha) Pi D^dag(alpha) rho] with Pi the parity, via
/// the closed-form displaced-parity matrix elements. Composite states are
/// reduced to the KPO first.
WignerField wigner(const DensityState& rho, const WignerGrid& grid);
WignerField wigner(const StateVector& psi, const WignerGrid& grid);

/// Single-point evaluation (same formula).
double wigner_point(const DensityState& rho, cplx alpha);

}  // namespace kpo::spectrum
