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

// Protocol drivers: correction-frequency sweep, bit- and phase-flip times,
// leakage, (A_cor, gamma_an) optimisation, pump study, noise scans, reset,
// two-photon X gate, induced dephasing and the break-even comparison.
//
// Independent evolutions (sweep points, grid cells, initial states) run as
// OpenMP tasks; each owns its state and results are stored by index, so the
// output does not depend on the thread count.

#include <optional>
#include <string>
#include <vector>

#include "kpo/fit.hpp"
#include "kpo/lindblad.hpp"
#include "kpo/model.hpp"
#include "kpo/spectrum.hpp"

namespace kpo::experiments {

struct ExperimentConfig {
    model::SystemParams params = model::SystemParams::reference();
    model::NoiseParams noise = model::NoiseParams::reference();
    model::ToneParams correction;  // reference(): A_cor/2pi = 0.25 MHz at Delta_an + 0.36 MHz
    int dim_a = 30;
    int dim_b = 3;
    model::Frame frame = model::Frame::ancilla_rwa;
    lindblad::Tolerances tolerances{1e-8, 1e-8};
    lindblad::Propagation propagation = lindblad::Propagation::interaction_picture;
    double max_tail_weight = 1e-5;

    double t_flip = 100e-6;     // flip-time horizon
    double sample_dt = 50e-9;   // flip-time sample cadence
    double fit_discard = 0.5e-6;
    int jobs = 1;

    static ExperimentConfig reference();
    void validate() const;
};

/// Everything derived from one configuration: the coupled system, its
/// collapse operators and the logical frame at the same SystemParams.
struct Context {
    ExperimentConfig cfg;
    model::FullSystem sys;
    std::vector<Operator> collapse;
    spectrum::LogicalFrame logical;

    explicit Context(ExperimentConfig config);

    /// KPO-only operator lifted onto the KPO (x) ancilla space.
    Operator lift(const Operator& kpo) const;
    /// |psi> (x) |0>_ancilla as a density matrix.
    DensityState prepare(const StateVector& kpo) const;
    /// The correction tone, or nothing when it is switched off.
    std::vector<model::ToneParams> tones(bool correction_on) const;
};

// ---------------------------------------------------------------------------
// Correction-frequency sweep

struct SweepRow {
    double omega_cor = 0.0;
    double p_zero = 0.0;       // P(|0_L>) starting from |0_L>
    double p_one = 0.0;        // P(|1_L>) starting from |1_L>
    double code_zero = 0.0;    // code-space population starting from |0_L>
    double code_one = 0.0;
    double drift = 0.0;        // max trace drift over both runs
};

struct SweepFeatures {
    double peak_zero = 0.0;  // omega_cor of the maximum of p_zero
    double peak_one = 0.0;
    double dip_zero = 0.0;   // omega_cor of the minimum of p_zero
    double dip_one = 0.0;
};

std::vector<SweepRow> sweep_correction_frequency(const Context& ctx,
                                                 const std::vector<double>& omega_cor_values,
                                                 double a_cor, double t_eval);

/// Extremum positions refined by a parabola through the best sample and its
/// neighbours.
SweepFeatures sweep_features(const std::vector<SweepRow>& rows);

/// Default grid: dense windows around the expected peak (Delta_an + 0.36 MHz)
/// and the two dips (peak -/+ omega_gap).
std::vector<double> default_sweep_grid(const Context& ctx, int points = 61);

// ---------------------------------------------------------------------------
// Flip times

/// One evolution with the standard channels:
///   p_init, p_orth, contrast = p_init - p_orth,
///   p_code, p_error, p_hel = 1 - p_code - p_error.
/// What the flip-time fit sees. population: P(initial) - P(orthogonal).
/// coherence: 2|<0_L|rho|1_L>|, which is P(+_L) - P(-_L) in the frame
/// co-rotating with the logical qubit (the logical states are split by
/// omega_gap in the pump frame, so the raw difference oscillates).
enum class FlipChannel { population, coherence };

struct FlipRun {
    std::string label;
    bool correction_on = false;
    FlipChannel channel = FlipChannel::population;
    lindblad::TimeSeries series;
    fit::ExponentialFit fit;
};

struct FlipTimeResult {
    double with_aqec = 0.0;  // averaged over initial states
    double without = 0.0;
    double residual_with = 0.0;
    double residual_without = 0.0;
    std::string channel = "population";
    std::vector<FlipRun> runs;

    double ratio() const { return with_aqec / without; }
};

/// Evolve `initial` (KPO state, ancilla vacuum) and record the channels
/// against `orthogonal`.
FlipRun flip_run(const Context& ctx, const std::string& label, const StateVector& initial,
                 const StateVector& orthogonal, bool correction_on, double t_final,
                 FlipChannel channel = FlipChannel::population);

/// |0_L> and |1_L>, with and without the correction tone.
FlipTimeResult flip_time_bit(const Context& ctx);

/// |+_L> with and without correction. four_state adds |-_L>, |i+_L>, |i-_L>.
FlipTimeResult flip_time_phase(const Context& ctx, bool four_state = false);

/// Code / error / HEL populations from |+_L>, with and without correction.
/// Channels are suffixed "_on" and "_off".
lindblad::TimeSeries leakage_populations(const Context& ctx, double t_final);

/// Merge the leakage channels of a with/without pair of flip runs.
lindblad::TimeSeries leakage_from_runs(const FlipRun& on, const FlipRun& off);

// ---------------------------------------------------------------------------
// Parameter studies

struct GridCell {
    double a_cor = 0.0;
    double gamma_an = 0.0;
    double t_bit = 0.0;    // with correction; +inf when no decay; NaN on failure
    double t_phase = 0.0;
    std::string error;
};

struct GridResult {
    std::vector<GridCell> cells;  // a_cor major
    std::size_t best_bit = 0;
    std::size_t best_phase = 0;
    std::size_t failures = 0;
};

GridResult optimize_grid(const Context& ctx, const std::vector<double>& a_cor_values,
                         const std::vector<double>& gamma_an_values);

struct PumpStudyRow {
    double g = 0.0;
    double pump_degenerate = 0.0;
    double pump_optimal = 0.0;
    double omega_cor = 0.0;    // centre of the two population peaks
    double t_phase_degenerate = 0.0;
    double t_phase_optimal = 0.0;
    std::string error;
};

struct PumpStudyOptions {
    std::vector<double> pump_offsets;  // P - P_degenerate values scanned (rad/s)
    std::vector<double> sweep_offsets; // omega_cor - Delta_an values for the peak search
    double t_sweep = 10e-6;
};

std::vector<PumpStudyRow> pump_detuning_study(const Context& ctx, const std::vector<double>& g_values,
                                              const PumpStudyOptions& options);

struct NoiseRow {
    double n_th = 0.0;
    double gamma_phi = 0.0;
    double t_bit = 0.0;
    double t_phase = 0.0;
    double p_error = 0.0;  // from |+_L> at t_flip
    double p_hel = 0.0;
    std::string error;
};

/// Rows for each n_th (gamma_phi = 0), then each gamma_phi (n_th = 0);
/// correction on.
std::vector<NoiseRow> noise_scan(const Context& ctx, const std::vector<double>& n_th_values,
                                 const std::vector<double>& gamma_phi_values);

/// gamma_phi = (gamma/2) Re[sqrt((1 + 2i chi/gamma)^2 + 8i chi n_th/gamma) - 1].
/// chi = 0 or n_th = 0 give exactly 0. Throws invalid_argument when gamma <= 0.
double induced_dephasing_rate(double gamma_nqs, double n_th_q, double chi);

/// chi = K [g / (omega_an - omega_KPO)]^2
double ancilla_dispersive_shift(const model::SystemParams& p);

// ---------------------------------------------------------------------------
// Reset and gates

struct ResetSettings {
    int target = 0;            // logical index 0 or 1
    double a_cor = 0.0;
    double a_reset = 0.0;
    double omega_cor = 0.0;

    /// Tone settings used for the unconditional-reset study of each target.
    static ResetSettings reference(const Context& ctx, int target);
};

struct ResetTrace {
    std::string label;
    lindblad::TimeSeries series;  // channel "p_target"
    double time_to_085 = 0.0;     // first crossing of 0.85; +inf if never
    double saturation = 0.0;      // mean over the last 10% of the horizon
};

/// Named KPO initial states understood by reset_experiment: "0L", "1L",
/// "0mod", "1mod", "2mod", "3mod", "fock:N".
StateVector named_state(const Context& ctx, const std::string& name);

std::vector<ResetTrace> reset_experiment(const Context& ctx, const ResetSettings& settings,
                                         const std::vector<std::string>& initial_states,
                                         double t_final, double sample_dt);

struct RabiResult {
    lindblad::TimeSeries series;  // channels p_zero, p_one
    double contrast = 0.0;        // max P(|1_L>)
    double period = 0.0;          // twice the first peak of P(|1_L>); +inf without transfer
    double matrix_element = 0.0;  // |<1_L| a^dag^2 + a^2 |0_L>|
    double detuning = 0.0;        // drive frequency minus the 0_L - 1_L splitting
};

/// KPO alone (no ancilla) driven by A_2ph cos(sign omega_gap t)(a^dag^2 + a^2).
/// Losses follow ctx.cfg.noise.gamma_kpo.
RabiResult x_gate_rabi(const Context& ctx, int detuning_sign, double a_2ph, double t_final,
                       double sample_dt);

// ---------------------------------------------------------------------------
// Break-even

struct BreakEven {
    double t1_baseline = 0.0;
    double t2_baseline = 0.0;
    double t_bit = 0.0;
    double t_phase = 0.0;
    double tau_baseline = 0.0;
    double tau_logical = 0.0;
    double ratio = 0.0;
    std::string formula;
};

/// Process fidelity of a Pauli-diagonal qubit channel whose Z component decays
/// with t_bit and X, Y components with t_phase:
///   F(t) = [1 + e^{-t/t_bit} + 2 e^{-t/t_phase}] / 4.
/// The relaxation time tau solves [e^{-tau/t_bit} + 2 e^{-tau/t_phase}] / 3 = e^{-1}.
double process_relaxation_time(double t_bit, double t_phase);

BreakEven break_even_comparison(double gamma_kpo, double t_bit, double t_phase);

}  // namespace kpo::experiments
