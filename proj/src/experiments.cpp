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

#include "kpo/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <sstream>

#include "kpo/units.hpp"

namespace kpo::experiments {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Runs f(0..n-1) as independent OpenMP iterations. The first exception (by
// index) is rethrown after the loop.
template <class F>
void parallel_cells(int jobs, std::size_t n, F&& f) {
    std::vector<std::exception_ptr> errors(n);
    const long count = static_cast<long>(n);
#pragma omp parallel for num_threads(std::max(1, jobs)) schedule(dynamic, 1) if (jobs > 1)
    for (long i = 0; i < count; ++i) {
        try {
            f(static_cast<std::size_t>(i));
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

std::string describe(const std::exception_ptr& e) {
    try {
        std::rethrow_exception(e);
    } catch (const std::exception& x) {
        return x.what();
    } catch (...) {
        return "unknown error";
    }
}

double mean(const std::vector<double>& v) {
    return v.empty() ? kNaN : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

lindblad::EvolveSpec base_spec(const Context& ctx, const DensityState& initial, double t_final) {
    lindblad::EvolveSpec spec;
    spec.initial = initial;
    spec.t_final = t_final;
    spec.frame = ctx.cfg.frame;
    spec.tolerances = ctx.cfg.tolerances;
    spec.propagation = ctx.cfg.propagation;
    return spec;
}

// Vertex of the parabola through three points; falls back to the middle
// abscissa when they are collinear.
double parabola_vertex(double x0, double y0, double x1, double y1, double x2, double y2) {
    const double d0 = (y1 - y0) / (x1 - x0);
    const double d1 = (y2 - y1) / (x2 - x1);
    const double curvature = (d1 - d0) / (x2 - x0);
    if (curvature == 0.0) return x1;
    const double x = 0.5 * (x0 + x1) - d0 / (2.0 * curvature);
    return std::clamp(x, x0, x2);
}

template <class Get>
double extremum(const std::vector<SweepRow>& rows, Get get, bool maximum) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double v = get(rows[i]);
        if (maximum ? v > get(rows[best]) : v < get(rows[best])) best = i;
    }
    if (best == 0 || best + 1 >= rows.size()) return rows[best].omega_cor;
    return parabola_vertex(rows[best - 1].omega_cor, get(rows[best - 1]), rows[best].omega_cor,
                           get(rows[best]), rows[best + 1].omega_cor, get(rows[best + 1]));
}

// First time the series reaches `level`, linearly interpolated.
double first_crossing(const std::vector<double>& t, const std::vector<double>& y, double level) {
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (y[i] >= level) {
            if (i == 0) return t[0];
            const double f = (level - y[i - 1]) / (y[i] - y[i - 1]);
            return t[i - 1] + f * (t[i] - t[i - 1]);
        }
    }
    return kInf;
}

}  // namespace

// ---------------------------------------------------------------------------

ExperimentConfig ExperimentConfig::reference() {
    ExperimentConfig cfg;
    cfg.correction = {units::mhz(0.25), cfg.params.delta_an + units::mhz(0.36),
                      model::ToneKind::correction};
    return cfg;
}

void ExperimentConfig::validate() const {
    params.validate();
    noise.validate();
    if (dim_a < 8) throw Error(ErrorKind::invalid_dimension, "dim_a must be >= 8");
    if (dim_b < 2) throw Error(ErrorKind::invalid_dimension, "dim_b must be >= 2");
    if (!(tolerances.rel > 0.0) || !(tolerances.abs > 0.0)) {
        throw Error(ErrorKind::invalid_argument, "tolerances must be > 0");
    }
    if (!(t_flip > 0.0) || !(sample_dt > 0.0) || sample_dt > t_flip) {
        throw Error(ErrorKind::invalid_argument, "need 0 < sample_dt <= t_flip");
    }
    if (fit_discard < 0.0 || fit_discard >= t_flip) {
        throw Error(ErrorKind::invalid_argument, "fit_discard must lie in [0, t_flip)");
    }
    if (correction.amplitude < 0.0) {
        throw Error(ErrorKind::invalid_argument, "correction amplitude must be >= 0");
    }
    if (jobs < 1) throw Error(ErrorKind::invalid_argument, "jobs must be >= 1");
}

Context::Context(ExperimentConfig config) : cfg(std::move(config)) {
    cfg.validate();
    sys = model::build_full_system(cfg.params, cfg.dim_a, cfg.dim_b);
    collapse = model::collapse_operators(cfg.noise, cfg.dim_a, cfg.dim_b);
    logical = spectrum::logical_frame(cfg.params, cfg.dim_a, cfg.max_tail_weight);
}

Operator Context::lift(const Operator& kpo) const { return on_kpo(kpo, cfg.dim_b); }

DensityState Context::prepare(const StateVector& kpo) const {
    return DensityState::from_pure(tensor(kpo, fock_state(cfg.dim_b, 0)));
}

std::vector<model::ToneParams> Context::tones(bool correction_on) const {
    if (!correction_on || cfg.correction.amplitude == 0.0) return {};
    return {cfg.correction};
}

// ---------------------------------------------------------------------------
// Sweep

std::vector<SweepRow> sweep_correction_frequency(const Context& ctx,
                                                 const std::vector<double>& omega_cor_values,
                                                 double a_cor, double t_eval) {
    if (!(t_eval > 0.0)) throw Error(ErrorKind::invalid_argument, "t_eval must be > 0");
    if (omega_cor_values.empty()) throw Error(ErrorKind::invalid_argument, "empty sweep");
    const Operator code = ctx.lift(ctx.logical.code_projector);
    std::vector<SweepRow> rows(omega_cor_values.size());
    parallel_cells(ctx.cfg.jobs, 2 * rows.size(), [&](std::size_t cell) {
        const std::size_t i = cell / 2;
        const bool one = cell % 2 == 1;
        const StateVector& init = one ? ctx.logical.one_l : ctx.logical.zero_l;
        lindblad::EvolveSpec spec = base_spec(ctx, ctx.prepare(init), t_eval);
        spec.sample_times = {t_eval};
        if (a_cor != 0.0) {
            spec.tones = {{a_cor, omega_cor_values[i], model::ToneKind::correction}};
        }
        spec.observables = {{"p", init}, {"code", code}};
        const lindblad::TimeSeries r = lindblad::evolve(ctx.sys, ctx.collapse, spec);
        SweepRow& row = rows[i];
        row.omega_cor = omega_cor_values[i];
        (one ? row.p_one : row.p_zero) = r.channel("p").back();
        (one ? row.code_one : row.code_zero) = r.channel("code").back();
#pragma omp critical(kpo_sweep_drift)
        row.drift = std::max(row.drift, r.diagnostics.max_trace_drift);
    });
    return rows;
}

SweepFeatures sweep_features(const std::vector<SweepRow>& rows) {
    if (rows.size() < 3) throw Error(ErrorKind::invalid_argument, "sweep needs >= 3 points");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (!(rows[i].omega_cor > rows[i - 1].omega_cor)) {
            throw Error(ErrorKind::invalid_argument, "sweep frequencies must increase");
        }
    }
    auto zero = [](const SweepRow& r) { return r.p_zero; };
    auto one = [](const SweepRow& r) { return r.p_one; };
    return {extremum(rows, zero, true), extremum(rows, one, true), extremum(rows, zero, false),
            extremum(rows, one, false)};
}

std::vector<double> default_sweep_grid(const Context& ctx, int points) {
    if (points < 9) throw Error(ErrorKind::invalid_argument, "sweep grid needs >= 9 points");
    const double centre = ctx.sys.delta_an + units::mhz(0.36);
    const double gap = ctx.logical.omega_gap;
    const double half = units::mhz(1.0);
    const int peak_points = points - 2 * (points / 3);
    const int dip_points = points / 3;
    std::vector<double> grid;
    auto window = [&](double c, int n) {
        for (int i = 0; i < n; ++i) grid.push_back(c - half + 2.0 * half * i / (n - 1));
    };
    window(centre - gap, dip_points);
    window(centre, peak_points);
    window(centre + gap, dip_points);
    std::sort(grid.begin(), grid.end());
    return grid;
}

// ---------------------------------------------------------------------------
// Flip times

FlipRun flip_run(const Context& ctx, const std::string& label, const StateVector& initial,
                 const StateVector& orthogonal, bool correction_on, double t_final,
                 FlipChannel channel) {
    lindblad::EvolveSpec spec = base_spec(ctx, ctx.prepare(initial), t_final);
    spec.sample_times = lindblad::uniform_samples(t_final, ctx.cfg.sample_dt);
    spec.tones = ctx.tones(correction_on);
    spec.observables = {{"p_init", initial},
                        {"p_orth", orthogonal},
                        {"p_code", ctx.lift(ctx.logical.code_projector)},
                        {"p_error", ctx.lift(ctx.logical.error_projector)}};
    if (channel == FlipChannel::coherence) {
        const Vector& z = ctx.logical.zero_l.amplitudes();
        const Vector& o = ctx.logical.one_l.amplitudes();
        const Matrix sx = z * o.adjoint() + o * z.adjoint();
        const Matrix sy = cplx{0.0, 1.0} * (o * z.adjoint() - z * o.adjoint());
        const Dims d = ctx.logical.zero_l.dims();
        spec.observables.push_back({"sx", ctx.lift(Operator{d, sx})});
        spec.observables.push_back({"sy", ctx.lift(Operator{d, sy})});
    }

    FlipRun run;
    run.label = label;
    run.correction_on = correction_on;
    run.channel = channel;
    run.series = lindblad::evolve(ctx.sys, ctx.collapse, spec);
    lindblad::TimeSeries& s = run.series;
    const std::vector<double>& code = s.channel("p_code");
    const std::vector<double>& error = s.channel("p_error");
    std::vector<double> contrast, hel;
    for (std::size_t i = 0; i < s.times.size(); ++i) hel.push_back(1.0 - code[i] - error[i]);
    if (channel == FlipChannel::population) {
        const std::vector<double>& init = s.channel("p_init");
        const std::vector<double>& orth = s.channel("p_orth");
        for (std::size_t i = 0; i < s.times.size(); ++i) contrast.push_back(init[i] - orth[i]);
    } else {
        const std::vector<double>& sx = s.channel("sx");
        const std::vector<double>& sy = s.channel("sy");
        for (std::size_t i = 0; i < s.times.size(); ++i) contrast.push_back(std::hypot(sx[i], sy[i]));
    }
    // add_channel may reallocate, so nothing above is used after this point.
    s.add_channel("contrast") = std::move(contrast);
    s.add_channel("p_hel") = std::move(hel);
    run.fit = fit::fit_exponential(s, "contrast", ctx.cfg.fit_discard);
    return run;
}

namespace {

struct RunRequest {
    std::string label;
    const StateVector* initial;
    const StateVector* orthogonal;
    bool correction_on;
    FlipChannel channel = FlipChannel::population;
};

FlipTimeResult collect(const Context& ctx, const std::vector<RunRequest>& requests) {
    FlipTimeResult out;
    out.runs.resize(requests.size());
    parallel_cells(ctx.cfg.jobs, requests.size(), [&](std::size_t i) {
        const RunRequest& r = requests[i];
        out.runs[i] = flip_run(ctx, r.label, *r.initial, *r.orthogonal, r.correction_on,
                               ctx.cfg.t_flip, r.channel);
    });
    std::vector<double> on, off, res_on, res_off;
    for (const FlipRun& run : out.runs) {
        if (!run.fit.converged) {
            throw Error(ErrorKind::fit_failure, "exponential fit failed for run '" + run.label +
                                                    "' (seed T = " +
                                                    std::to_string(run.fit.time()) + " s)");
        }
        (run.correction_on ? on : off).push_back(run.fit.time());
        (run.correction_on ? res_on : res_off).push_back(run.fit.residual);
    }
    out.with_aqec = mean(on);
    out.without = mean(off);
    out.residual_with = mean(res_on);
    out.residual_without = mean(res_off);
    return out;
}

}  // namespace

FlipTimeResult flip_time_bit(const Context& ctx) {
    const auto& L = ctx.logical;
    std::vector<RunRequest> requests;
    for (bool on : {true, false}) {
        const std::string suffix = on ? "_on" : "_off";
        requests.push_back({"0L" + suffix, &L.zero_l, &L.one_l, on});
        requests.push_back({"1L" + suffix, &L.one_l, &L.zero_l, on});
    }
    return collect(ctx, requests);
}

FlipTimeResult flip_time_phase(const Context& ctx, bool four_state) {
    const auto& L = ctx.logical;
    std::vector<RunRequest> requests;
    for (bool on : {true, false}) {
        const std::string suffix = on ? "_on" : "_off";
        const FlipChannel c = FlipChannel::coherence;
        requests.push_back({"+L" + suffix, &L.plus_l, &L.minus_l, on, c});
        if (four_state) {
            requests.push_back({"-L" + suffix, &L.minus_l, &L.plus_l, on, c});
            requests.push_back({"i+L" + suffix, &L.iplus_l, &L.iminus_l, on, c});
            requests.push_back({"i-L" + suffix, &L.iminus_l, &L.iplus_l, on, c});
        }
    }
    FlipTimeResult out = collect(ctx, requests);
    out.channel = "coherence";
    return out;
}

lindblad::TimeSeries leakage_from_runs(const FlipRun& on, const FlipRun& off) {
    if (on.series.times != off.series.times) {
        throw Error(ErrorKind::invalid_argument, "leakage runs use different sample grids");
    }
    lindblad::TimeSeries out;
    out.times = on.series.times;
    for (const char* name : {"p_code", "p_error", "p_hel"}) {
        out.add_channel(std::string(name) + "_on") = on.series.channel(name);
        out.add_channel(std::string(name) + "_off") = off.series.channel(name);
    }
    return out;
}

lindblad::TimeSeries leakage_populations(const Context& ctx, double t_final) {
    const auto& L = ctx.logical;
    std::vector<FlipRun> runs(2);
    parallel_cells(ctx.cfg.jobs, 2, [&](std::size_t i) {
        const bool on = i == 0;
        runs[i] = flip_run(ctx, on ? "+L_on" : "+L_off", L.plus_l, L.minus_l, on, t_final,
                           FlipChannel::coherence);
    });
    return leakage_from_runs(runs[0], runs[1]);
}

// ---------------------------------------------------------------------------
// Parameter studies

GridResult optimize_grid(const Context& ctx, const std::vector<double>& a_cor_values,
                         const std::vector<double>& gamma_an_values) {
    GridResult out;
    for (double a : a_cor_values) {
        for (double g : gamma_an_values) out.cells.push_back({a, g, kNaN, kNaN, {}});
    }
    std::vector<std::exception_ptr> errors(out.cells.size());
    parallel_cells(ctx.cfg.jobs, out.cells.size(), [&](std::size_t i) {
        GridCell& cell = out.cells[i];
        try {
            ExperimentConfig cfg = ctx.cfg;
            cfg.correction.amplitude = cell.a_cor;
            cfg.noise.gamma_an = cell.gamma_an;
            cfg.jobs = 1;
            const Context local(cfg);
            const auto& L = local.logical;
            const FlipRun zero = flip_run(local, "0L", L.zero_l, L.one_l, true, cfg.t_flip);
            const FlipRun one = flip_run(local, "1L", L.one_l, L.zero_l, true, cfg.t_flip);
            const FlipRun plus = flip_run(local, "+L", L.plus_l, L.minus_l, true, cfg.t_flip,
                                          FlipChannel::coherence);
            if (zero.fit.converged && one.fit.converged) {
                cell.t_bit = 0.5 * (zero.fit.time() + one.fit.time());
            }
            if (plus.fit.converged) cell.t_phase = plus.fit.time();
        } catch (...) {
            errors[i] = std::current_exception();
        }
    });
    for (std::size_t i = 0; i < out.cells.size(); ++i) {
        if (errors[i]) out.cells[i].error = describe(errors[i]);
        if (errors[i] || std::isnan(out.cells[i].t_bit) || std::isnan(out.cells[i].t_phase)) {
            ++out.failures;
        }
    }
    auto best = [&](auto get) {
        std::size_t b = 0;
        for (std::size_t i = 1; i < out.cells.size(); ++i) {
            const double v = get(out.cells[i]);
            const double w = get(out.cells[b]);
            if (!std::isnan(v) && (std::isnan(w) || v > w)) b = i;
        }
        return b;
    };
    out.best_bit = best([](const GridCell& c) { return c.t_bit; });
    out.best_phase = best([](const GridCell& c) { return c.t_phase; });
    return out;
}

std::vector<PumpStudyRow> pump_detuning_study(const Context& ctx, const std::vector<double>& g_values,
                                              const PumpStudyOptions& options) {
    if (options.sweep_offsets.size() < 3) {
        throw Error(ErrorKind::invalid_argument, "pump study needs >= 3 sweep offsets");
    }
    std::vector<PumpStudyRow> rows(g_values.size());
    std::vector<double> offsets = options.pump_offsets;
    if (std::find(offsets.begin(), offsets.end(), 0.0) == offsets.end()) offsets.push_back(0.0);
    std::sort(offsets.begin(), offsets.end());

    // One task per (g, pump) point; each re-derives omega_cor and the phase-flip time.
    struct Point {
        std::size_t row;
        double pump;
        double omega_cor = kNaN;
        double t_phase = kNaN;
    };
    std::vector<Point> points;
    for (std::size_t r = 0; r < g_values.size(); ++r) {
        rows[r].g = g_values[r];
        model::SystemParams p = ctx.cfg.params;
        p.g = g_values[r];
        try {
            rows[r].pump_degenerate = spectrum::find_degenerate_pump(p, ctx.cfg.dim_a);
        } catch (const std::exception& e) {
            rows[r].error = e.what();
            continue;
        }
        for (double off : offsets) points.push_back({r, rows[r].pump_degenerate + off});
    }
    std::vector<std::exception_ptr> errors(points.size());
    parallel_cells(ctx.cfg.jobs, points.size(), [&](std::size_t i) {
        Point& pt = points[i];
        try {
            ExperimentConfig cfg = ctx.cfg;
            cfg.params.g = rows[pt.row].g;
            cfg.params.pump = pt.pump;
            cfg.jobs = 1;
            Context local(cfg);
            std::vector<double> grid;
            for (double o : options.sweep_offsets) grid.push_back(local.sys.delta_an + o);
            const SweepFeatures f = sweep_features(
                sweep_correction_frequency(local, grid, cfg.correction.amplitude, options.t_sweep));
            pt.omega_cor = 0.5 * (f.peak_zero + f.peak_one);
            local.cfg.correction.frequency = pt.omega_cor;
            const auto& L = local.logical;
            const FlipRun plus = flip_run(local, "+L", L.plus_l, L.minus_l, true, cfg.t_flip,
                                          FlipChannel::coherence);
            if (plus.fit.converged) pt.t_phase = plus.fit.time();
        } catch (...) {
            errors[i] = std::current_exception();
        }
    });
    for (std::size_t i = 0; i < points.size(); ++i) {
        const Point& pt = points[i];
        PumpStudyRow& row = rows[pt.row];
        if (errors[i] && row.error.empty()) row.error = describe(errors[i]);
        if (pt.pump == row.pump_degenerate) row.t_phase_degenerate = pt.t_phase;
        if (!std::isnan(pt.t_phase) && !(pt.t_phase <= row.t_phase_optimal)) {
            row.t_phase_optimal = pt.t_phase;
            row.pump_optimal = pt.pump;
            row.omega_cor = pt.omega_cor;
        }
    }
    return rows;
}

std::vector<NoiseRow> noise_scan(const Context& ctx, const std::vector<double>& n_th_values,
                                 const std::vector<double>& gamma_phi_values) {
    std::vector<NoiseRow> rows;
    for (double n : n_th_values) rows.push_back({n, 0.0, kNaN, kNaN, kNaN, kNaN, {}});
    for (double g : gamma_phi_values) rows.push_back({0.0, g, kNaN, kNaN, kNaN, kNaN, {}});
    std::vector<std::exception_ptr> errors(rows.size());
    parallel_cells(ctx.cfg.jobs, rows.size(), [&](std::size_t i) {
        NoiseRow& row = rows[i];
        try {
            ExperimentConfig cfg = ctx.cfg;
            cfg.noise.n_th = row.n_th;
            cfg.noise.gamma_phi = row.gamma_phi;
            cfg.jobs = 1;
            const Context local(cfg);
            const auto& L = local.logical;
            const FlipRun zero = flip_run(local, "0L", L.zero_l, L.one_l, true, cfg.t_flip);
            const FlipRun one = flip_run(local, "1L", L.one_l, L.zero_l, true, cfg.t_flip);
            const FlipRun plus = flip_run(local, "+L", L.plus_l, L.minus_l, true, cfg.t_flip,
                                          FlipChannel::coherence);
            if (zero.fit.converged && one.fit.converged) {
                row.t_bit = 0.5 * (zero.fit.time() + one.fit.time());
            }
            if (plus.fit.converged) row.t_phase = plus.fit.time();
            row.p_error = plus.series.channel("p_error").back();
            row.p_hel = plus.series.channel("p_hel").back();
        } catch (...) {
            errors[i] = std::current_exception();
        }
    });
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (errors[i]) rows[i].error = describe(errors[i]);
    }
    return rows;
}

double induced_dephasing_rate(double gamma_nqs, double n_th_q, double chi) {
    if (!(gamma_nqs > 0.0)) {
        throw Error(ErrorKind::invalid_argument, "dephasing formula needs gamma_nqs > 0");
    }
    if (n_th_q < 0.0) throw Error(ErrorKind::invalid_argument, "n_th must be >= 0");
    if (chi == 0.0 || n_th_q == 0.0) return 0.0;
    const cplx i{0.0, 1.0};
    const double x = chi / gamma_nqs;
    const cplx z = (1.0 + 2.0 * i * x) * (1.0 + 2.0 * i * x) + 8.0 * i * x * n_th_q;
    return 0.5 * gamma_nqs * (std::sqrt(z) - 1.0).real();
}

double ancilla_dispersive_shift(const model::SystemParams& p) {
    const double detuning = p.omega_an - p.omega_kpo;
    if (detuning == 0.0) {
        throw Error(ErrorKind::invalid_argument, "ancilla and KPO frequencies coincide");
    }
    const double r = p.g / detuning;
    return p.kerr * r * r;
}

// ---------------------------------------------------------------------------
// Reset and gates

ResetSettings ResetSettings::reference(const Context& ctx, int target) {
    if (target != 0 && target != 1) {
        throw Error(ErrorKind::invalid_argument, "reset target must be 0 or 1");
    }
    ResetSettings s;
    s.target = target;
    s.a_cor = units::mhz(target == 0 ? 0.50 : 0.45);
    s.a_reset = units::mhz(target == 0 ? 0.32 : 0.40);
    s.omega_cor = ctx.cfg.correction.frequency;
    return s;
}

StateVector named_state(const Context& ctx, const std::string& name) {
    const auto& L = ctx.logical;
    if (name == "0L") return L.zero_l;
    if (name == "1L") return L.one_l;
    if (name == "+L") return L.plus_l;
    if (name == "-L") return L.minus_l;
    if (name.size() == 4 && name.substr(1) == "mod" && name[0] >= '0' && name[0] <= '3') {
        return L.states[static_cast<std::size_t>(name[0] - '0')].vector;
    }
    if (name.rfind("fock:", 0) == 0) {
        std::size_t used = 0;
        int n = -1;
        try {
            n = std::stoi(name.substr(5), &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == name.size() - 5 && n >= 0 && n < ctx.cfg.dim_a) {
            return fock_state(ctx.cfg.dim_a, n);
        }
    }
    throw Error(ErrorKind::invalid_argument, "unknown initial state '" + name + "'");
}

std::vector<ResetTrace> reset_experiment(const Context& ctx, const ResetSettings& settings,
                                         const std::vector<std::string>& initial_states,
                                         double t_final, double sample_dt) {
    if (settings.target != 0 && settings.target != 1) {
        throw Error(ErrorKind::invalid_argument, "reset target must be 0 or 1");
    }
    const double sign = settings.target == 0 ? -1.0 : 1.0;
    const std::vector<model::ToneParams> tones{
        {settings.a_cor, settings.omega_cor, model::ToneKind::correction},
        {settings.a_reset, settings.omega_cor + sign * ctx.logical.omega_gap,
         model::ToneKind::reset}};
    const StateVector& target = settings.target == 0 ? ctx.logical.zero_l : ctx.logical.one_l;

    std::vector<StateVector> initial;
    for (const std::string& name : initial_states) initial.push_back(named_state(ctx, name));

    std::vector<ResetTrace> out(initial.size());
    parallel_cells(ctx.cfg.jobs, initial.size(), [&](std::size_t i) {
        lindblad::EvolveSpec spec = base_spec(ctx, ctx.prepare(initial[i]), t_final);
        spec.sample_times = lindblad::uniform_samples(t_final, sample_dt);
        for (const auto& t : tones) {
            if (t.amplitude != 0.0) spec.tones.push_back(t);
        }
        spec.observables = {{"p_target", target}};
        ResetTrace& trace = out[i];
        trace.label = initial_states[i];
        trace.series = lindblad::evolve(ctx.sys, ctx.collapse, spec);
        const auto& t = trace.series.times;
        const auto& p = trace.series.channel("p_target");
        trace.time_to_085 = first_crossing(t, p, 0.85);
        std::vector<double> tail;
        for (std::size_t k = 0; k < t.size(); ++k) {
            if (t[k] >= 0.9 * t_final) tail.push_back(p[k]);
        }
        trace.saturation = mean(tail);
    });
    return out;
}

RabiResult x_gate_rabi(const Context& ctx, int detuning_sign, double a_2ph, double t_final,
                       double sample_dt) {
    if (detuning_sign != 1 && detuning_sign != -1) {
        throw Error(ErrorKind::invalid_argument, "detuning sign must be +1 or -1");
    }
    const int dim = ctx.cfg.dim_a;
    const auto& L = ctx.logical;
    const Operator x = model::build_two_photon_drive(dim);
    const double omega = detuning_sign * L.omega_gap;

    model::TimeDependentHamiltonian h{model::build_kpo_hamiltonian(ctx.cfg.params, dim), {}};
    // amplitude (X e^{-iwt} + X e^{iwt}) = 2 amplitude cos(wt) X
    if (a_2ph != 0.0) h.drives.push_back({x, 0.5 * a_2ph, omega});
    const std::vector<Operator> collapse = model::collapse_operators(ctx.cfg.noise, dim, 1);

    lindblad::EvolveSpec spec;
    spec.initial = DensityState::from_pure(L.zero_l);
    spec.t_final = t_final;
    spec.sample_times = lindblad::uniform_samples(t_final, sample_dt);
    spec.tolerances = ctx.cfg.tolerances;
    spec.propagation = ctx.cfg.propagation;
    spec.observables = {{"p_zero", L.zero_l}, {"p_one", L.one_l}};

    RabiResult out;
    out.series = lindblad::evolve(h, collapse, spec);
    out.matrix_element = std::abs(inner(L.one_l, StateVector{L.zero_l.dims(), x.matrix() * L.zero_l.amplitudes()}));
    out.detuning = L.omega_gap - std::abs(L.states[1].quasienergy - L.states[3].quasienergy);

    const auto& t = out.series.times;
    const auto& p1 = out.series.channel("p_one");
    out.contrast = *std::max_element(p1.begin(), p1.end());
    out.period = kInf;
    if (out.contrast < 1e-2) return out;
    // The counter-rotating half of the drive leaves a fast ripple on top of
    // the Rabi cycle, and a slow beat can make a later maximum the largest.
    // The first peak is the midpoint of the two half-contrast crossings.
    const double level = 0.5 * out.contrast;
    const double up = first_crossing(t, p1, level);
    if (std::isinf(up)) return out;
    for (std::size_t i = 1; i < t.size(); ++i) {
        if (t[i] > up && p1[i - 1] >= level && p1[i] < level) {
            const double f = (p1[i - 1] - level) / (p1[i - 1] - p1[i]);
            const double down = t[i - 1] + f * (t[i] - t[i - 1]);
            out.period = up + down;
            break;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Break-even

double process_relaxation_time(double t_bit, double t_phase) {
    if (!(t_bit > 0.0) || !(t_phase > 0.0)) {
        throw Error(ErrorKind::invalid_argument, "flip times must be > 0");
    }
    if (std::isinf(t_bit) && std::isinf(t_phase)) return kInf;
    auto decay = [&](double tau) {
        return (std::exp(-tau / t_bit) + 2.0 * std::exp(-tau / t_phase)) / 3.0 - std::exp(-1.0);
    };
    double lo = 0.0;
    double hi = std::min(t_bit, t_phase);
    while (decay(hi) > 0.0) hi *= 2.0;
    for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (decay(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

BreakEven break_even_comparison(double gamma_kpo, double t_bit, double t_phase) {
    if (!(gamma_kpo > 0.0)) throw Error(ErrorKind::invalid_argument, "gamma_kpo must be > 0");
    BreakEven b;
    b.t1_baseline = 1.0 / gamma_kpo;
    b.t2_baseline = 2.0 / gamma_kpo;
    b.t_bit = t_bit;
    b.t_phase = t_phase;
    b.tau_baseline = process_relaxation_time(b.t1_baseline, b.t2_baseline);
    b.tau_logical = process_relaxation_time(t_bit, t_phase);
    b.ratio = b.tau_logical / b.tau_baseline;
    b.formula =
        "F(t) = [1 + exp(-t/T_bit) + 2 exp(-t/T_phase)]/4; tau solves "
        "[exp(-tau/T_bit) + 2 exp(-tau/T_phase)]/3 = 1/e; baseline T_bit = T1, T_phase = T2";
    return b;
}

}  // namespace kpo::experiments
