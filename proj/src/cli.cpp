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

#include "kpo/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "kpo/config.hpp"
#include "kpo/experiments.hpp"
#include "kpo/io.hpp"
#include "kpo/kernels.hpp"
#include "kpo/spectrum.hpp"
#include "kpo/units.hpp"

namespace kpo::cli {

namespace {

namespace fs = std::filesystem;
namespace ex = experiments;
using config::Json;
using io::Cell;
using io::CsvTable;
using units::to_mhz;
using units::to_us;

// Raised for problems with the command line itself.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    ConfigError(const std::string& what, std::vector<std::string> list)
        : std::runtime_error(what), issues(std::move(list)) {}
    std::vector<std::string> issues;
};

// Files written by one experiment, relative to its run directory.
class Artifacts {
public:
    explicit Artifacts(fs::path dir) : dir_(std::move(dir)) {}

    void table(const std::string& name, const CsvTable& t) {
        t.write(dir_ / name);
        files_.push_back(name);
    }
    void series(const std::string& name, const lindblad::TimeSeries& s) { table(name, io::series_table(s)); }
    const std::vector<std::string>& files() const { return files_; }

private:
    fs::path dir_;
    std::vector<std::string> files_;
};

using Runner = std::function<Json(const Json& cfg, Artifacts& out)>;

// "+L" -> "plusL", "fock:3" -> "fock3": safe in file names.
std::string file_stem(const std::string& state) {
    std::string s;
    for (char c : state) {
        if (c == '+') s += "plus";
        else if (c == '-') s += "minus";
        else if (c != ':') s += c;
    }
    return s;
}

Json fit_json(const fit::ExponentialFit& f) {
    return {{"t_us", io::json_number(to_us(f.time()))},
            {"amplitude", f.amplitude},
            {"offset", f.offset},
            {"residual", f.residual},
            {"converged", f.converged}};
}

Json drift_json(const lindblad::TimeSeries& s) {
    return {{"max_trace_drift", s.diagnostics.max_trace_drift},
            {"trace_flagged", s.diagnostics.trace_flagged},
            {"steps", s.diagnostics.steps.accepted},
            {"wall_seconds", s.diagnostics.wall_seconds}};
}

double value_at(const lindblad::TimeSeries& s, const std::string& channel, double t) {
    const auto& times = s.times;
    std::size_t best = 0;
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (std::abs(times[i] - t) < std::abs(times[best] - t)) best = i;
    }
    return s.channel(channel)[best];
}

// ---------------------------------------------------------------------------
// Experiments

Json run_spectrum(const Json& cfg, Artifacts& out) {
    const ex::ExperimentConfig e = config::to_experiment(cfg);
    const Json& s = cfg["spectrum"];
    const int points = s["points"].get<int>();
    const double lo = s["p_over_k_min"].get<double>();
    const double hi = s["p_over_k_max"].get<double>();
    std::vector<double> pumps;
    for (int i = 0; i < points; ++i) pumps.push_back((lo + (hi - lo) * i / (points - 1)) * e.params.kerr);

    const auto rows = spectrum::quasienergy_scan(e.params, pumps, e.dim_a);
    CsvTable scan({"pump_mhz", "p_over_k", "e0_over_k", "e1_over_k", "e2_over_k", "e3_over_k",
                   "e0_minus_e1_over_k", "crossing"});
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        const double split = r.energy[0] - r.energy[1];
        // 1 on the row whose interval to the next row brackets the 0mod/1mod crossing.
        long crossing = 0;
        if (i + 1 < rows.size()) {
            const double next = rows[i + 1].energy[0] - rows[i + 1].energy[1];
            crossing = (split <= 0.0) != (next <= 0.0) ? 1 : 0;
        }
        scan.add_row({to_mhz(r.pump), r.pump / e.params.kerr, r.energy[0], r.energy[1], r.energy[2],
                      r.energy[3], split, crossing});
    }
    out.table("quasienergy.csv", scan);

    spectrum::PumpSearch search;
    search.min_ratio = s["search_min"].get<double>();
    search.max_ratio = s["search_max"].get<double>();
    const double p_deg = spectrum::find_degenerate_pump(e.params, e.dim_a, search);

    const spectrum::InformationSpace st = spectrum::information_space(e.params, e.dim_a, e.max_tail_weight);
    CsvTable states({"k", "quasienergy_mhz", "energy_over_k", "mean_photon", "tail_weight"});
    for (const auto& m : st) {
        states.add_row({static_cast<long>(m.k), to_mhz(m.quasienergy), m.energy, m.mean_photon, m.tail_weight});
    }
    out.table("states.csv", states);

    // Fock amplitudes of the four eigenstates.
    CsvTable coeff({"k", "n", "re", "im", "weight"});
    for (const auto& m : st) {
        const auto& c = m.vector.amplitudes();
        for (int n = 0; n < c.size(); ++n) {
            coeff.add_row({static_cast<long>(m.k), static_cast<long>(n), c(n).real(), c(n).imag(), std::norm(c(n))});
        }
    }
    out.table("coefficients.csv", coeff);

    return {{"degenerate_pump_mhz", to_mhz(p_deg)},
            {"degenerate_p_over_k", p_deg / e.params.kerr},
            {"energy_gap_mhz", to_mhz(spectrum::energy_gap(st))},
            {"hel_element_0h_a_1mod", spectrum::hel_transition_element(e.params, e.dim_a, 0, st[1].vector)},
            {"hel_element_2h_a_3mod", spectrum::hel_transition_element(e.params, e.dim_a, 2, st[3].vector)},
            {"element_0mod_a_1mod", spectrum::transition_element(st[0].vector, st[1].vector)},
            {"element_2mod_a_3mod", spectrum::transition_element(st[2].vector, st[3].vector)},
            {"mean_photon_0L", st[1].mean_photon},
            {"mean_photon_1L", st[3].mean_photon}};
}

Json run_wigner(const Json& cfg, Artifacts& out) {
    const ex::Context ctx(config::to_experiment(cfg));
    const Json& w = cfg["wigner"];
    Json summary = Json::object();
    for (const Json& name_json : w["states"]) {
        const std::string name = name_json.get<std::string>();
        const StateVector psi = ex::named_state(ctx, name);
        const double nbar = expectation(number(ctx.cfg.dim_a), psi).real();
        spectrum::WignerGrid grid = spectrum::WignerGrid::auto_sized(nbar, w["points"].get<int>());
        if (!w["half_width"].is_null()) {
            const double h = w["half_width"].get<double>();
            grid.x_min = grid.p_min = -h;
            grid.x_max = grid.p_max = h;
        }
        const spectrum::WignerField field = spectrum::wigner(psi, grid);
        CsvTable t({"x", "p", "w"});
        for (int j = 0; j < grid.np; ++j) {
            for (int i = 0; i < grid.nx; ++i) t.add_row({grid.x(i), grid.p(j), field.at(i, j)});
        }
        out.table("wigner_" + file_stem(name) + ".csv", t);
        summary[name] = {{"mean_photon", nbar},
                         {"integral", field.integral()},
                         {"min", *std::min_element(field.values.begin(), field.values.end())}};
    }
    return summary;
}

Json run_sweep(const Json& cfg, Artifacts& out) {
    const ex::Context ctx(config::to_experiment(cfg));
    const Json& s = cfg["sweep"];
    std::vector<double> grid;
    if (s["offsets_mhz"].empty()) {
        grid = ex::default_sweep_grid(ctx, s["points"].get<int>());
    } else {
        for (double o : config::mhz_list(cfg, "sweep", "offsets_mhz")) grid.push_back(ctx.sys.delta_an + o);
    }
    const double amplitude =
        s["amplitude_mhz"].is_null() ? ctx.cfg.correction.amplitude : config::mhz_at(cfg, "sweep", "amplitude_mhz");
    const auto rows = ex::sweep_correction_frequency(ctx, grid, amplitude, config::us_at(cfg, "sweep", "t_eval_us"));

    CsvTable t({"offset_mhz", "omega_cor_mhz", "p_zero", "p_one", "code_zero", "code_one", "trace_drift"});
    double drift = 0.0;
    for (const auto& r : rows) {
        t.add_row({to_mhz(r.omega_cor - ctx.sys.delta_an), to_mhz(r.omega_cor), r.p_zero, r.p_one, r.code_zero,
                   r.code_one, r.drift});
        drift = std::max(drift, r.drift);
    }
    out.table("sweep.csv", t);

    const ex::SweepFeatures f = ex::sweep_features(rows);
    auto off = [&](double w) { return to_mhz(w - ctx.sys.delta_an); };
    return {{"amplitude_mhz", to_mhz(amplitude)},
            {"omega_gap_mhz", to_mhz(ctx.logical.omega_gap)},
            {"peak_zero_offset_mhz", off(f.peak_zero)},
            {"peak_one_offset_mhz", off(f.peak_one)},
            {"peak_centre_offset_mhz", off(0.5 * (f.peak_zero + f.peak_one))},
            {"dip_zero_offset_mhz", off(f.dip_zero)},
            {"dip_one_offset_mhz", off(f.dip_one)},
            {"dip_minus_peak_zero_mhz", to_mhz(f.dip_zero - f.peak_zero)},
            {"dip_minus_peak_one_mhz", to_mhz(f.dip_one - f.peak_one)},
            {"max_trace_drift", drift}};
}

void write_flip_runs(const ex::FlipTimeResult& r, const std::string& prefix, Artifacts& out) {
    CsvTable fits({"label", "correction", "channel", "t_us", "amplitude", "offset", "residual", "converged",
                   "max_trace_drift"});
    for (const auto& run : r.runs) {
        out.series(prefix + "_" + file_stem(run.label) + ".csv", run.series);
        fits.add_row({run.label, static_cast<long>(run.correction_on), r.channel, to_us(run.fit.time()),
                      run.fit.amplitude, run.fit.offset, run.fit.residual, static_cast<long>(run.fit.converged),
                      run.series.diagnostics.max_trace_drift});
    }
    out.table(prefix + "_fits.csv", fits);
}

Json flip_json(const ex::FlipTimeResult& r) {
    Json runs = Json::object();
    for (const auto& run : r.runs) runs[run.label] = {{"fit", fit_json(run.fit)}, {"diagnostics", drift_json(run.series)}};
    return {{"with_aqec_us", io::json_number(to_us(r.with_aqec))},
            {"without_us", io::json_number(to_us(r.without))},
            {"ratio", io::json_number(r.ratio())},
            {"residual_with", r.residual_with},
            {"residual_without", r.residual_without},
            {"channel", r.channel},
            {"runs", runs}};
}

Json run_flip_times(const Json& cfg, Artifacts& out) {
    const ex::Context ctx(config::to_experiment(cfg));
    const ex::FlipTimeResult bit = ex::flip_time_bit(ctx);
    write_flip_runs(bit, "bit", out);
    const ex::FlipTimeResult phase = ex::flip_time_phase(ctx, cfg["flip_times"]["four_state"].get<bool>());
    write_flip_runs(phase, "phase", out);
    return {{"omega_cor_offset_mhz", to_mhz(ctx.cfg.correction.frequency - ctx.sys.delta_an)},
            {"bit", flip_json(bit)},
            {"phase", flip_json(phase)}};
}

Json run_leakage(const Json& cfg, Artifacts& out) {
    const ex::Context ctx(config::to_experiment(cfg));
    const double t_final = config::us_at(cfg, "leakage", "t_final_us");
    const lindblad::TimeSeries s = ex::leakage_populations(ctx, t_final);
    out.series("leakage.csv", s);
    const double t10 = std::min(units::us(10.0), t_final);
    const double err_on = value_at(s, "p_error_on", t10);
    const double err_off = value_at(s, "p_error_off", t10);
    const double hel_on = s.channel("p_hel_on").back();
    const double hel_off = s.channel("p_hel_off").back();
    return {{"t_early_us", to_us(t10)},
            {"p_error_on_early", err_on},
            {"p_error_off_early", err_off},
            {"error_suppression_early", io::json_number(err_off / err_on)},
            {"t_final_us", to_us(t_final)},
            {"p_hel_on_final", hel_on},
            {"p_hel_off_final", hel_off},
            {"hel_reduction_final", io::json_number(1.0 - hel_on / hel_off)}};
}

Json run_optimize(const Json& cfg, Artifacts& out) {
    const ex::Context ctx(config::to_experiment(cfg));
    const ex::GridResult g = ex::optimize_grid(ctx, config::mhz_list(cfg, "optimize", "a_cor_mhz"),
                                               config::mhz_list(cfg, "optimize", "gamma_an_mhz"));
    CsvTable t({"a_cor_mhz", "gamma_an_mhz", "t_bit_us", "t_phase_us", "error"});
    for (const auto& c : g.cells) t.add_row({to_mhz(c.a_cor), to_mhz(c.gamma_an), to_us(c.t_bit), to_us(c.t_phase), c.error});
    out.table("grid.csv", t);
    auto cell = [&](std::size_t i) {
        const auto& c = g.cells[i];
        return Json{{"a_cor_mhz", to_mhz(c.a_cor)},
                    {"gamma_an_mhz", to_mhz(c.gamma_an)},
                    {"t_bit_us", io::json_number(to_us(c.t_bit))},
                    {"t_phase_us", io::json_number(to_us(c.t_phase))}};
    };
    return {{"best_bit", cell(g.best_bit)},
            {"best_phase", cell(g.best_phase)},
            {"cells", g.cells.size()},
            {"failures", g.failures}};
}

Json run_pump_study(const Json& cfg, Artifacts& out) {
    const ex::Context ctx(config::to_experiment(cfg));
    ex::PumpStudyOptions opt;
    opt.pump_offsets = config::mhz_list(cfg, "pump_study", "pump_offsets_mhz");
    opt.sweep_offsets = config::mhz_list(cfg, "pump_study", "sweep_offsets_mhz");
    opt.t_sweep = config::us_at(cfg, "pump_study", "t_sweep_us");
    const auto rows = ex::pump_detuning_study(ctx, config::mhz_list(cfg, "pump_study", "g_mhz"), opt);
    CsvTable t({"g_mhz", "pump_degenerate_mhz", "p_over_k_degenerate", "pump_optimal_mhz", "omega_cor_offset_mhz",
                "t_phase_degenerate_us", "t_phase_optimal_us", "error"});
    std::size_t failures = 0;
    for (const auto& r : rows) {
        t.add_row({to_mhz(r.g), to_mhz(r.pump_degenerate), r.pump_degenerate / ctx.cfg.params.kerr,
                   to_mhz(r.pump_optimal), to_mhz(r.omega_cor - ctx.sys.delta_an), to_us(r.t_phase_degenerate),
                   to_us(r.t_phase_optimal), r.error});
        if (!r.error.empty()) ++failures;
    }
    out.table("pump_study.csv", t);
    return {{"rows", rows.size()}, {"failures", failures}};
}

Json run_noise_scan(const Json& cfg, Artifacts& out) {
    const ex::Context ctx(config::to_experiment(cfg));
    std::vector<double> gphi;
    for (const Json& x : cfg["noise"]["gamma_phi_per_us"]) gphi.push_back(x.get<double>() * 1e6);
    const auto rows = ex::noise_scan(ctx, cfg["noise"]["n_th"].get<std::vector<double>>(), gphi);
    CsvTable t({"n_th", "gamma_phi_per_us", "t_bit_us", "t_phase_us", "p_error_final", "p_hel_final", "error"});
    std::size_t failures = 0;
    for (const auto& r : rows) {
        t.add_row({r.n_th, r.gamma_phi * 1e-6, to_us(r.t_bit), to_us(r.t_phase), r.p_error, r.p_hel, r.error});
        if (!r.error.empty()) ++failures;
    }
    out.table("noise.csv", t);

    // Dephasing the thermally populated ancilla induces on the KPO.
    const double chi = ex::ancilla_dispersive_shift(ctx.cfg.params);
    Json induced = Json::object();
    if (ctx.cfg.noise.gamma_an > 0.0) {
        induced = {{"chi_hz", to_mhz(chi) * 1e6},
                   {"gamma_nqs_mhz", to_mhz(ctx.cfg.noise.gamma_an)},
                   {"gamma_phi_hz_at_nth_0.1", to_mhz(ex::induced_dephasing_rate(ctx.cfg.noise.gamma_an, 0.1, chi)) * 1e6}};
    }
    return {{"rows", rows.size()}, {"failures", failures}, {"ancilla_induced_dephasing", induced}};
}

Json run_reset(const Json& cfg, Artifacts& out) {
    const ex::Context ctx(config::to_experiment(cfg));
    const Json& r = cfg["reset"];
    ex::ResetSettings settings = ex::ResetSettings::reference(ctx, r["target"].get<int>());
    if (!r["a_cor_mhz"].is_null()) settings.a_cor = config::mhz_at(cfg, "reset", "a_cor_mhz");
    if (!r["a_reset_mhz"].is_null()) settings.a_reset = config::mhz_at(cfg, "reset", "a_reset_mhz");
    const auto states = r["initial_states"].get<std::vector<std::string>>();
    const auto traces = ex::reset_experiment(ctx, settings, states, config::us_at(cfg, "reset", "t_final_us"),
                                             config::us_at(cfg, "reset", "sample_dt_us"));

    lindblad::TimeSeries merged;
    merged.times = traces.front().series.times;
    Json per_state = Json::object();
    for (const auto& tr : traces) {
        merged.add_channel("p_target_" + file_stem(tr.label)) = tr.series.channel("p_target");
        per_state[tr.label] = {{"time_to_085_us", io::json_number(to_us(tr.time_to_085))},
                               {"saturation", tr.saturation},
                               {"diagnostics", drift_json(tr.series)}};
    }
    out.series("reset.csv", merged);
    return {{"target", settings.target},
            {"a_cor_mhz", to_mhz(settings.a_cor)},
            {"a_reset_mhz", to_mhz(settings.a_reset)},
            {"omega_cor_offset_mhz", to_mhz(settings.omega_cor - ctx.sys.delta_an)},
            {"omega_reset_offset_mhz",
             to_mhz(settings.omega_cor + (settings.target == 0 ? -1.0 : 1.0) * ctx.logical.omega_gap - ctx.sys.delta_an)},
            {"states", per_state}};
}

Json run_xgate(const Json& cfg, Artifacts& out) {
    const ex::Context ctx(config::to_experiment(cfg));
    const Json& x = cfg["xgate"];
    const double a = config::mhz_at(cfg, "xgate", "amplitude_mhz");
    const ex::RabiResult r = ex::x_gate_rabi(ctx, x["sign"].get<int>(), a, config::us_at(cfg, "xgate", "t_final_us"),
                                             config::us_at(cfg, "xgate", "sample_dt_us"));
    out.series("xgate.csv", r.series);
    // Two-level estimate: A cos(wt) X couples |0_L> and |1_L> with Rabi
    // frequency A |<1_L|X|0_L>| in the rotating-wave limit.
    const double omega = a * r.matrix_element;
    const double generalised = std::hypot(omega, r.detuning);
    return {{"contrast", r.contrast},
            {"period_us", io::json_number(to_us(r.period))},
            {"matrix_element", r.matrix_element},
            {"detuning_mhz", to_mhz(r.detuning)},
            {"two_level_period_us",
             io::json_number(generalised > 0.0 ? to_us(units::two_pi / generalised) : HUGE_VAL)},
            {"two_level_contrast", generalised > 0.0 ? omega * omega / (generalised * generalised) : 0.0}};
}

Json run_break_even(const Json& cfg, Artifacts& out) {
    const Json& b = cfg["break_even"];
    const ex::ExperimentConfig e = config::to_experiment(cfg);
    double t_bit = 0.0;
    double t_phase = 0.0;
    Json source = "given";
    if (b["t_bit_us"].is_null() || b["t_phase_us"].is_null()) {
        const ex::Context ctx(e);
        const ex::FlipTimeResult bit = ex::flip_time_bit(ctx);
        const ex::FlipTimeResult phase = ex::flip_time_phase(ctx);
        write_flip_runs(bit, "bit", out);
        write_flip_runs(phase, "phase", out);
        t_bit = bit.with_aqec;
        t_phase = phase.with_aqec;
        source = "simulated";
    }
    if (!b["t_bit_us"].is_null()) t_bit = config::us_at(cfg, "break_even", "t_bit_us");
    if (!b["t_phase_us"].is_null()) t_phase = config::us_at(cfg, "break_even", "t_phase_us");
    const ex::BreakEven r = ex::break_even_comparison(e.noise.gamma_kpo, t_bit, t_phase);
    CsvTable t({"encoding", "t_bit_us", "t_phase_us", "tau_us"});
    t.add_row({std::string("baseline"), to_us(r.t1_baseline), to_us(r.t2_baseline), to_us(r.tau_baseline)});
    t.add_row({std::string("logical"), to_us(r.t_bit), to_us(r.t_phase), to_us(r.tau_logical)});
    out.table("break_even.csv", t);
    return {{"formula", r.formula},
            {"flip_times", source},
            {"t1_baseline_us", to_us(r.t1_baseline)},
            {"t2_baseline_us", to_us(r.t2_baseline)},
            {"t_bit_us", io::json_number(to_us(r.t_bit))},
            {"t_phase_us", io::json_number(to_us(r.t_phase))},
            {"tau_baseline_us", to_us(r.tau_baseline)},
            {"tau_logical_us", io::json_number(to_us(r.tau_logical))},
            {"ratio", io::json_number(r.ratio)}};
}

struct Experiment {
    std::string name;
    std::string help;
    std::string horizon;  // config key set by --t-final
    Runner run;
};

const std::vector<Experiment>& experiments_table() {
    static const std::vector<Experiment> table{
        {"spectrum", "Quasienergy scan over P/K and the degeneracy point", "", run_spectrum},
        {"wigner", "Wigner functions of named KPO states", "", run_wigner},
        {"sweep-cor", "Logical populations versus correction frequency", "sweep.t_eval_us", run_sweep},
        {"flip-times", "Bit- and phase-flip times with and without correction", "run.t_flip_us", run_flip_times},
        {"leakage", "Code, error and HEL populations from |+_L>", "leakage.t_final_us", run_leakage},
        {"optimize", "Flip times over an (A_cor, gamma_an) grid", "run.t_flip_us", run_optimize},
        {"pump-study", "Degenerate and optimal pump versus coupling g", "run.t_flip_us", run_pump_study},
        {"noise-scan", "Flip times versus thermal photons and dephasing", "run.t_flip_us", run_noise_scan},
        {"reset", "Unconditional reset into one logical state", "reset.t_final_us", run_reset},
        {"xgate", "Two-photon drive Rabi oscillation between |0_L> and |1_L>", "xgate.t_final_us", run_xgate},
        {"break-even", "Process relaxation time against the bare-oscillator baseline", "run.t_flip_us",
         run_break_even},
        {"validate", "Check a configuration and print it resolved", "", nullptr},
    };
    return table;
}

// "1us", "2.5 ms", "100ns", "1e-6s"; a bare number is microseconds.
double parse_duration_us(const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw UsageError("--t-final: cannot parse '" + text + "'");
    }
    std::string unit = text.substr(used);
    unit.erase(0, unit.find_first_not_of(' '));
    const std::map<std::string, double> scale{{"", 1.0}, {"us", 1.0}, {"ns", 1e-3}, {"ms", 1e3}, {"s", 1e6}};
    const auto it = scale.find(unit);
    if (it == scale.end()) throw UsageError("--t-final: unknown unit '" + unit + "'");
    if (!(v > 0.0)) throw UsageError("--t-final must be > 0");
    return v * it->second;
}

std::string utc_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
    return buf;
}

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::config:
            return ExitCode::config;
        case ErrorKind::invalid_argument:
        case ErrorKind::invalid_dimension:
        case ErrorKind::dimension_mismatch:
        case ErrorKind::truncation:
        case ErrorKind::no_degeneracy:
        case ErrorKind::step_underflow:
        case ErrorKind::fit_failure:
            return ExitCode::physics;
    }
    return ExitCode::failure;
}

int report(std::ostream& err, const std::string& kind, const std::string& message, int code,
           const std::vector<std::string>& issues = {}) {
    Json e = {{"kind", kind}, {"message", message}, {"exit_code", code}};
    if (!issues.empty()) e["violations"] = issues;
    err << Json{{"error", e}}.dump() << "\n";
    return code;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& e : experiments_table()) n.push_back(e.name);
        return n;
    }();
    return names;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Autonomous error correction of a four-photon Kerr parametric oscillator", kToolName};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);

    std::string config_path;
    std::vector<std::string> sets;
    std::string out_root = "runs";
    std::string frame;
    std::string dims;
    int jobs = 0;
    std::string t_final;
    app.add_option("--config", config_path, "JSON config file or run manifest");
    app.add_option("--set", sets, "Override one key, e.g. --set kpo.pump_mhz=5.6 (repeatable)");
    app.add_option("--out", out_root, "Root directory for run directories")->capture_default_str();
    app.add_option("--frame", frame, "Tone frame: rwa or full");
    app.add_option("--dims", dims, "Truncation A,B of the KPO and ancilla");
    app.add_option("--jobs", jobs, "Parallel experiment cells");
    app.add_option("--t-final", t_final, "Evolution horizon of the experiment, e.g. 1us");

    std::map<std::string, CLI::App*> subs;
    for (const auto& e : experiments_table()) {
        CLI::App* s = app.add_subcommand(e.name, e.help);
        s->fallthrough();
        subs[e.name] = s;
    }

    // Name the unknown experiment instead of CLI11's generic complaint.
    {
        const std::vector<std::string> valued{"--config", "--set", "--out", "--frame", "--dims", "--jobs", "--t-final"};
        for (int i = 1; i < argc; ++i) {
            const std::string a = argv[i];
            if (a.rfind("-", 0) == 0) {
                if (a.find('=') == std::string::npos &&
                    std::find(valued.begin(), valued.end(), a) != valued.end()) {
                    ++i;
                }
                continue;
            }
            if (!subs.count(a)) return report(err, "usage", "unknown experiment '" + a + "'", ExitCode::usage);
            break;
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        return report(err, "usage", e.what(), ExitCode::usage);
    }

    const Experiment* chosen = nullptr;
    for (const auto& e : experiments_table()) {
        if (subs[e.name]->parsed()) chosen = &e;
    }

    Json cfg;
    try {
        std::vector<std::string> issues;
        cfg = config::merge(config_path.empty() ? Json::object() : config::read_file(config_path), issues);
        if (!issues.empty()) throw ConfigError("configuration has unknown or mistyped keys", issues);
        for (const std::string& s : sets) config::apply_override(cfg, s);
        if (!frame.empty()) {
            const std::string f = model::to_string(model::frame_from_string(frame)).data();
            cfg["run"]["frame"] = f;
        }
        if (!dims.empty()) {
            int a = 0, b = 0;
            char comma = 0;
            std::istringstream in(dims);
            if (!(in >> a >> comma >> b) || comma != ',' || !in.eof()) {
                throw UsageError("--dims expects A,B (e.g. 30,3), got '" + dims + "'");
            }
            cfg["run"]["dim_a"] = a;
            cfg["run"]["dim_b"] = b;
        }
        if (jobs != 0) cfg["run"]["jobs"] = jobs;
        if (!t_final.empty()) {
            if (chosen->horizon.empty()) throw UsageError("--t-final does not apply to '" + chosen->name + "'");
            config::apply_override(cfg, chosen->horizon + "=" + io::format_number(parse_duration_us(t_final)));
        }
        const std::vector<std::string> bad = config::violations(cfg);
        if (chosen->name == "validate") {
            out << Json{{"valid", bad.empty()}, {"violations", bad}, {"config", cfg}}.dump(2) << "\n";
            return bad.empty() ? ExitCode::ok : ExitCode::config;
        }
        if (!bad.empty()) throw ConfigError("configuration violates " + std::to_string(bad.size()) + " invariant(s)", bad);
    } catch (const UsageError& e) {
        return report(err, "usage", e.what(), ExitCode::usage);
    } catch (const ConfigError& e) {
        return report(err, "config", e.what(), ExitCode::config, e.issues);
    } catch (const Error& e) {
        return report(err, "config", e.what(), ExitCode::config);
    }

    fs::path dir;
    try {
        dir = io::create_run_directory(out_root, chosen->name);
    } catch (const std::exception& e) {
        return report(err, "io", e.what(), ExitCode::failure);
    }

    Json manifest;
    manifest["tool"] = kToolName;
    manifest["version"] = kToolVersion;
    manifest["experiment"] = chosen->name;
    manifest["command"] = std::vector<std::string>(argv, argv + argc);
    manifest["started_utc"] = utc_now();

    Artifacts artifacts(dir);
    const auto t0 = std::chrono::steady_clock::now();
    int code = ExitCode::ok;
    Json summary;
    try {
        lindblad::set_kernel_threads(cfg["run"]["jobs"].get<int>());
        summary = chosen->run(cfg, artifacts);
        io::write_json(dir / "summary.json", Json{{"experiment", chosen->name}, {"results", summary}});
        manifest["status"] = "ok";
    } catch (const Error& e) {
        code = report(err, to_string(e.kind()), e.what(), exit_code_for(e.kind()));
        manifest["status"] = "failed";
        manifest["error"] = {{"kind", to_string(e.kind())}, {"message", e.what()}};
    } catch (const std::exception& e) {
        code = report(err, "internal", e.what(), ExitCode::failure);
        manifest["status"] = "failed";
        manifest["error"] = {{"kind", "internal"}, {"message", e.what()}};
    }
    manifest["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::vector<std::string> files = artifacts.files();
    if (code == ExitCode::ok) files.push_back("summary.json");
    manifest["outputs"] = files;
    manifest["config"] = cfg;
    try {
        io::write_json(dir / "manifest.json", manifest);
    } catch (const std::exception& e) {
        return report(err, "io", e.what(), ExitCode::failure);
    }
    if (code == ExitCode::ok) {
        out << Json{{"status", "ok"}, {"experiment", chosen->name}, {"run_directory", dir.string()}}.dump() << "\n";
    }
    return code;
}

}  // namespace kpo::cli
