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

#include "kpo/lindblad.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>


#include "kpo/kernels.hpp"

namespace kpo::lindblad {

std::string_view to_string(Propagation p) {
    return p == Propagation::direct ? "direct" : "interaction";
}

const std::vector<double>& TimeSeries::channel(std::string_view name) const {
    for (const auto& [key, values] : channels) {
        if (key == name) return values;
    }
    throw Error(ErrorKind::invalid_argument, "no channel named '" + std::string(name) + "'");
}

std::vector<double>& TimeSeries::add_channel(std::string name) {
    channels.emplace_back(std::move(name), std::vector<double>{});
    return channels.back().second;
}

bool TimeSeries::has_channel(std::string_view name) const {
    return std::any_of(channels.begin(), channels.end(),
                       [&](const auto& c) { return c.first == name; });
}

std::vector<double> uniform_samples(double t_final, double dt) {
    if (!(dt > 0.0) || !(t_final >= 0.0)) {
        throw Error(ErrorKind::invalid_argument, "sample spacing and horizon must be positive");
    }
    const long n = static_cast<long>(std::floor(t_final / dt + 1e-9));
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n) + 2);
    for (long i = 0; i <= n; ++i) out.push_back(std::min(t_final, static_cast<double>(i) * dt));
    if (t_final - out.back() > 1e-9 * dt) out.push_back(t_final);
    return out;
}

namespace {

using Clock = std::chrono::steady_clock;

// Maps the static-frame density matrix onto the frame rotating the ancilla at
// delta: (rho_r)_mn = e^{i delta (nb_m - nb_n) t} (rho)_mn.
struct AncillaRotation {
    double delta = 0.0;
    Dims dims;
};

void validate(const EvolveSpec& spec, const Dims& dims) {
    if (!(spec.initial.dims() == dims)) {
        throw Error(ErrorKind::dimension_mismatch, "initial state does not match the Hamiltonian");
    }
    if (!(spec.tolerances.rel > 0.0) || !(spec.tolerances.abs > 0.0)) {
        throw Error(ErrorKind::invalid_argument, "tolerances must be > 0");
    }
    if (!(spec.t_final >= 0.0)) throw Error(ErrorKind::invalid_argument, "t_final must be >= 0");
    for (std::size_t i = 0; i < spec.sample_times.size(); ++i) {
        const double t = spec.sample_times[i];
        if (t < 0.0 || t > spec.t_final * (1.0 + 1e-12) ||
            (i > 0 && t < spec.sample_times[i - 1])) {
            throw Error(ErrorKind::invalid_argument,
                        "sample times must be sorted and inside [0, t_final]");
        }
    }
}

// Zero-amplitude drives contribute nothing; dropping them keeps tone-free
// and zero-tone runs bit-identical (same sectors, same arithmetic).
model::TimeDependentHamiltonian without_silent_drives(const model::TimeDependentHamiltonian& h) {
    model::TimeDependentHamiltonian out{h.static_part, {}};
    for (const model::Drive& d : h.drives) {
        if (d.amplitude != 0.0) out.drives.push_back(d);
    }
    return out;
}

std::vector<Matrix> raw_matrices(std::span<const Operator> ops, const Dims& dims) {
    std::vector<Matrix> out;
    for (const Operator& c : ops) {
        if (!(c.dims() == dims)) {
            throw Error(ErrorKind::dimension_mismatch, "collapse operator dims differ from H");
        }
        out.push_back(c.matrix());
    }
    return out;
}

Operator observable_operator(const Observable& obs, const Dims& dims) {
    if (const auto* op = std::get_if<Operator>(&obs.what)) {
        if (!(op->dims() == dims)) {
            throw Error(ErrorKind::dimension_mismatch, "observable '" + obs.name + "' has wrong dims");
        }
        return *op;
    }
    const auto& psi = std::get<StateVector>(obs.what);
    Operator proj = population_operator(psi, psi.dims().single_mode() ? dims.b : 1);
    if (!(proj.dims() == dims)) {
        throw Error(ErrorKind::dimension_mismatch, "observable '" + obs.name + "' has wrong dims");
    }
    return proj;
}

// ---------------------------------------------------------------------------
// Sectors

// One diagonal block of rho: Fock indices, and (interaction picture) the
// eigen-decomposition of H0 restricted to them.
struct Sector {
    std::vector<int> index;
    Eigen::VectorXd energy;
    Matrix basis;  // columns: eigenvectors in the restricted Fock basis
    int offset = 0;
    int size() const { return static_cast<int>(index.size()); }

    Matrix restrict(const Matrix& m) const { return m(index, index); }
    Matrix to_eigen(const Matrix& m) const { return basis.adjoint() * restrict(m) * basis; }
};

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) {
        for (int i = 0; i < n; ++i) parent[i] = i;
    }
    int find(int i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    }
    void join(int i, int j) { parent[find(i)] = find(j); }
};

std::vector<Sector> single_sector(int n) {
    Sector s;
    s.index.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) s.index[i] = i;
    return {std::move(s)};
}

// Connected components of the coupling graph of H0 and the drives. Falls back
// to a single sector when a collapse operator or the initial state would
// couple blocks.
std::vector<Sector> find_sectors(const model::TimeDependentHamiltonian& h,
                                 std::span<const Matrix> collapse, const Matrix& rho0) {
    const int n = static_cast<int>(rho0.rows());
    UnionFind uf(n);
    auto link = [&](const Matrix& m) {
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                if (m(i, j) != cplx{}) uf.join(i, j);
            }
        }
    };
    link(h.static_part.matrix());
    for (const model::Drive& d : h.drives) link(d.op.matrix());

    std::vector<int> label(static_cast<std::size_t>(n), -1);
    std::vector<Sector> sectors;
    for (int i = 0; i < n; ++i) {
        const int root = uf.find(i);
        if (label[root] < 0) {
            label[root] = static_cast<int>(sectors.size());
            sectors.emplace_back();
        }
        label[i] = label[root];
        sectors[label[i]].index.push_back(i);
    }
    if (sectors.size() == 1) return sectors;

    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            if (rho0(i, j) != cplx{} && label[i] != label[j]) return single_sector(n);
        }
    }
    const int count = static_cast<int>(sectors.size());
    for (const Matrix& c : collapse) {
        // Each source sector must feed at most one target, and no two sources
        // may share a target (otherwise c^dag c couples them).
        std::vector<int> target(static_cast<std::size_t>(count), -1);
        std::vector<int> source(static_cast<std::size_t>(count), -1);
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                if (c(i, j) == cplx{}) continue;
                const int s = label[j];
                const int t = label[i];
                if (target[s] >= 0 && target[s] != t) return single_sector(n);
                if (source[t] >= 0 && source[t] != s) return single_sector(n);
                target[s] = t;
                source[t] = s;
            }
        }
    }
    return sectors;
}

// c restricted to one (source -> target) pair of sectors, in the eigenbases.
struct CollapsePiece {
    int source = 0;
    int target = 0;
    Matrix op;
    Matrix op_dag;
};

// ---------------------------------------------------------------------------
// Observables and recording

// An observable split by ancilla-number shift d; contributes
// e^{-i delta d t} Tr(O_d rho) in the rotating frame. One matrix per sector.
struct ObservablePart {
    int shift = 0;
    std::vector<Matrix> blocks;
};

struct PreparedObservable {
    std::string name;
    std::vector<ObservablePart> parts;
};

std::vector<PreparedObservable> prepare_observables(const std::vector<Observable>& observables,
                                                    const Dims& dims,
                                                    const std::vector<Sector>& sectors,
                                                    bool eigenbasis,
                                                    const AncillaRotation* rotation) {
    std::vector<PreparedObservable> out;
    for (const Observable& obs : observables) {
        const Operator op = observable_operator(obs, dims);
        PreparedObservable prepared{obs.name, {}};
        auto push = [&](int shift, const Matrix& m) {
            if (shift != 0 && m.cwiseAbs().maxCoeff() == 0.0) return;
            ObservablePart part{shift, {}};
            for (const Sector& s : sectors) {
                part.blocks.push_back(eigenbasis ? s.to_eigen(m) : s.restrict(m));
            }
            prepared.parts.push_back(std::move(part));
        };
        if (rotation) {
            for (int d = -(dims.b - 1); d <= dims.b - 1; ++d) {
                push(d, ancilla_shift_part(op, d).matrix());
            }
        } else {
            push(0, op.matrix());
        }
        out.push_back(std::move(prepared));
    }
    return out;
}

// Tr(O rho) = sum_ij O_ij rho_ji
cplx trace_product(const Matrix& op, const Matrix& rho) {
    return op.cwiseProduct(rho.transpose()).sum();
}

class Recorder {
public:
    Recorder(const EvolveSpec& spec, std::vector<PreparedObservable> observables,
             const AncillaRotation* rotation)
        : spec_(spec), observables_(std::move(observables)), rotation_(rotation) {
        for (const auto& obs : observables_) series_.add_channel(obs.name);
    }

    /// `blocks` are the diagonal blocks of rho in the observables' basis.
    void record(double t, const std::vector<Matrix>& blocks) {
        series_.times.push_back(t);
        for (std::size_t k = 0; k < observables_.size(); ++k) {
            cplx v = 0.0;
            for (const ObservablePart& part : observables_[k].parts) {
                cplx term = 0.0;
                for (std::size_t b = 0; b < blocks.size(); ++b) {
                    term += trace_product(part.blocks[b], blocks[b]);
                }
                if (rotation_ && part.shift != 0) {
                    term *= std::polar(1.0, -rotation_->delta * part.shift * t);
                }
                v += term;
            }
            series_.channels[k].second.push_back(v.real());
        }

        Diagnostics& d = series_.diagnostics;
        cplx trace = 0.0;
        double herm = 0.0;
        double min_eig = 1.0;
        for (const Matrix& rho : blocks) {
            trace += rho.trace();
            herm += (rho - rho.adjoint()).squaredNorm();
            if (spec_.monitor_positivity) {
                Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
                min_eig = std::min(min_eig, es.eigenvalues()(0));
            }
        }
        const double drift = std::abs(trace - 1.0);
        d.trace_deviation.push_back(drift);
        d.max_trace_drift = std::max(d.max_trace_drift, drift);
        if (drift > 1e-6) d.trace_flagged = true;
        d.hermiticity.push_back(std::sqrt(herm));
        if (spec_.monitor_positivity) d.min_eigenvalue.push_back(min_eig);
    }

    TimeSeries& series() { return series_; }

private:
    const EvolveSpec& spec_;
    std::vector<PreparedObservable> observables_;
    const AncillaRotation* rotation_;
    TimeSeries series_;
};

template <class Stepper, class Sample>
void march(const EvolveSpec& spec, Stepper& stepper, Matrix& y, Sample&& sample) {
    double t = 0.0;
    for (double ts : spec.sample_times) {
        stepper.integrate_to(t, y, ts);
        t = std::max(t, ts);
        sample(ts, y);
    }
    stepper.integrate_to(t, y, spec.t_final);
}

StepControl step_control(const EvolveSpec& spec) {
    StepControl c;
    c.rel_tol = spec.tolerances.rel;
    c.abs_tol = spec.tolerances.abs;
    return c;
}

// ---------------------------------------------------------------------------
// Propagators

TimeSeries run_direct(const model::TimeDependentHamiltonian& generator,
                      std::span<const Operator> collapse, const EvolveSpec& spec) {
    const model::TimeDependentHamiltonian h = without_silent_drives(generator);
    const Dims dims = h.static_part.dims();
    const LindbladKernel kernel(raw_matrices(collapse, dims));
    const std::vector<Sector> whole = single_sector(dims.total());
    Recorder recorder(spec, prepare_observables(spec.observables, dims, whole, false, nullptr),
                      nullptr);

    Matrix h_t, h_eff, herm;
    auto rhs = [&](double t, const Matrix& rho, Matrix& out) {
        h.evaluate(t, h_t);
        if (spec.kernel == KernelChoice::reference) {
            reference_rhs(h_t, kernel.collapse(), rho, out);
        } else {
            // Same Hermitian projection as the interaction picture path.
            herm = rho.adjoint();
            herm = 0.5 * (herm + rho);
            kernel.effective_hamiltonian(h_t, h_eff);
            kernel.apply(h_eff, herm, out);
        }
    };
    Dopri5 stepper(rhs, step_control(spec));
    Matrix y = spec.initial.matrix();
    std::vector<Matrix> sample_blocks(1);
    march(spec, stepper, y, [&](double t, const Matrix& rho) {
        sample_blocks[0] = rho;
        recorder.record(t, sample_blocks);
    });

    TimeSeries series = std::move(recorder.series());
    series.diagnostics.steps = stepper.stats();
    if (spec.keep_final_state) series.final_state = DensityState{dims, y};
    return series;
}

TimeSeries run_interaction(const model::TimeDependentHamiltonian& generator,
                           std::span<const Operator> collapse, const EvolveSpec& spec,
                           const AncillaRotation* rotation) {
    const model::TimeDependentHamiltonian h = without_silent_drives(generator);
    const Dims dims = h.static_part.dims();
    const int n = dims.total();
    const std::vector<Matrix> collapse_fock = raw_matrices(collapse, dims);
    const Matrix& rho0 = spec.initial.matrix();

    // The literal reference formula needs the full matrix.
    std::vector<Sector> sectors = spec.kernel == KernelChoice::reference
                                      ? single_sector(n)
                                      : find_sectors(h, collapse_fock, rho0);
    const int count = static_cast<int>(sectors.size());
    int rows = 0;
    int cols = 0;
    for (Sector& s : sectors) {
        const Eigen::SelfAdjointEigenSolver<Matrix> es(s.restrict(h.static_part.matrix()));
        s.energy = es.eigenvalues();
        s.basis = es.eigenvectors();
        s.offset = cols;
        cols += s.size();
        rows = std::max(rows, s.size());
    }

    struct EigenDrive {
        std::vector<Matrix> op, op_dag;  // per sector
        double amplitude, frequency;
    };
    std::vector<EigenDrive> drives;
    for (const model::Drive& d : h.drives) {
        EigenDrive e{{}, {}, d.amplitude, d.frequency};
        for (const Sector& s : sectors) {
            e.op.push_back(s.to_eigen(d.op.matrix()));
            e.op_dag.push_back(e.op.back().adjoint());
        }
        drives.push_back(std::move(e));
    }

    std::vector<CollapsePiece> pieces;
    std::vector<Matrix> decay(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) decay[k] = Matrix::Zero(sectors[k].size(), sectors[k].size());
    for (const Matrix& c : collapse_fock) {
        for (int src = 0; src < count; ++src) {
            for (int dst = 0; dst < count; ++dst) {
                const Sector& a = sectors[dst];
                const Sector& b = sectors[src];
                Matrix block = c(a.index, b.index);
                if (block.cwiseAbs().maxCoeff() == 0.0) continue;
                Matrix op = a.basis.adjoint() * block * b.basis;
                Matrix op_dag = op.adjoint();
                decay[src].noalias() += op_dag * op;
                pieces.push_back({src, dst, std::move(op), std::move(op_dag)});
            }
        }
    }
    std::vector<Matrix> reference_collapse;
    if (spec.kernel == KernelChoice::reference) {
        for (const CollapsePiece& p : pieces) reference_collapse.push_back(p.op);
    }

    Recorder recorder(spec,
                      prepare_observables(spec.observables, dims, sectors, true, rotation),
                      rotation);

    // phase[k]_ij = e^{-i (E_i - E_j) t}: rho_E = phase o rho_I.
    std::vector<Matrix> phase(static_cast<std::size_t>(count));
    Eigen::VectorXcd p;
    auto fill_phase = [&](double t) {
        for (int k = 0; k < count; ++k) {
            const Eigen::VectorXd& e = sectors[k].energy;
            p.resize(e.size());
            for (int m = 0; m < e.size(); ++m) p(m) = std::polar(1.0, -e(m) * t);
            phase[k].noalias() = p * p.adjoint();
        }
    };
    auto block_of = [&](auto& y, int k) {
        return y.block(0, sectors[k].offset, sectors[k].size(), sectors[k].size());
    };

    std::vector<Matrix> rho_e(static_cast<std::size_t>(count));
    std::vector<Matrix> out_e(static_cast<std::size_t>(count));
    Matrix v, h_eff, product, scratch;
    auto rhs = [&](double t, const Matrix& y, Matrix& dy) {
        fill_phase(t);
        dy.setZero(rows, cols);
        for (int k = 0; k < count; ++k) {
            const int m = sectors[k].size();
            rho_e[k] = block_of(y, k).cwiseProduct(phase[k]);
            if (spec.kernel != KernelChoice::reference) {
                // The fast kernel is exact only for Hermitian input. Without this
                // projection the anti-Hermitian roundoff feeds back into the trace
                // and grows exponentially over long runs at large truncation.
                scratch = rho_e[k].adjoint();
                rho_e[k] = 0.5 * (rho_e[k] + scratch);
            }
            v.setZero(m, m);
            for (const EigenDrive& d : drives) {
                const cplx f = d.amplitude * std::polar(1.0, -d.frequency * t);
                v.noalias() += f * d.op[k];
                v.noalias() += std::conj(f) * d.op_dag[k];
            }
            if (spec.kernel == KernelChoice::reference) {
                reference_rhs(v, reference_collapse, rho_e[k], out_e[k]);
            } else {
                h_eff = v - cplx{0.0, 0.5} * decay[k];
                product.noalias() = h_eff * rho_e[k];
                coherent_part(product, out_e[k]);
            }
        }
        if (spec.kernel != KernelChoice::reference) {
            // c rho c^dag is Hermitian: accumulate the lower triangle only.
            for (const CollapsePiece& p : pieces) {
                scratch.noalias() = p.op * rho_e[p.source];
                out_e[p.target].triangularView<Eigen::Lower>() += scratch * p.op_dag;
            }
            if (!pieces.empty()) {
                for (Matrix& out : out_e) {
                    out.triangularView<Eigen::StrictlyUpper>() = out.adjoint();
                }
            }
        }
        for (int k = 0; k < count; ++k) {
            block_of(dy, k) = out_e[k].cwiseProduct(phase[k].conjugate());
        }
    };

    Matrix y = Matrix::Zero(rows, cols);
    for (int k = 0; k < count; ++k) block_of(y, k) = sectors[k].to_eigen(rho0);

    Dopri5 stepper(rhs, step_control(spec));
    std::vector<Matrix> sample_blocks(static_cast<std::size_t>(count));
    auto to_static = [&](const Matrix& state, double t) {
        fill_phase(t);
        for (int k = 0; k < count; ++k) {
            sample_blocks[k] = block_of(state, k).cwiseProduct(phase[k]);
        }
    };
    march(spec, stepper, y, [&](double t, const Matrix& state) {
        to_static(state, t);
        recorder.record(t, sample_blocks);
    });

    TimeSeries series = std::move(recorder.series());
    series.diagnostics.steps = stepper.stats();
    series.diagnostics.sectors = count;
    if (spec.keep_final_state) {
        to_static(y, spec.t_final);
        Matrix rho = Matrix::Zero(n, n);
        for (int k = 0; k < count; ++k) {
            const Sector& s = sectors[k];
            rho(s.index, s.index) = s.basis * sample_blocks[k] * s.basis.adjoint();
        }
        if (rotation) {
            for (int j = 0; j < n; ++j) {
                for (int i = 0; i < n; ++i) {
                    const int shift = dims.ancilla_index(i) - dims.ancilla_index(j);
                    rho(i, j) *= std::polar(1.0, rotation->delta * shift * spec.t_final);
                }
            }
        }
        series.final_state = DensityState{dims, std::move(rho)};
    }
    return series;
}

}  // namespace

TimeSeries evolve(const model::TimeDependentHamiltonian& h, std::span<const Operator> collapse,
                  const EvolveSpec& spec) {
    validate(spec, h.static_part.dims());
    const auto start = Clock::now();
    TimeSeries series = spec.propagation == Propagation::direct
                            ? run_direct(h, collapse, spec)
                            : run_interaction(h, collapse, spec, nullptr);
    series.diagnostics.wall_seconds =
        std::chrono::duration<double>(Clock::now() - start).count();
    return series;
}

TimeSeries evolve(const model::FullSystem& sys, std::span<const Operator> collapse,
                  const EvolveSpec& spec) {
    validate(spec, sys.dims());
    const auto start = Clock::now();
    TimeSeries series;
    if (spec.propagation == Propagation::direct) {
        series = run_direct(model::frame_hamiltonian(sys, spec.tones, spec.frame), collapse, spec);
    } else {
        const auto h = model::static_frame_hamiltonian(sys, spec.tones, spec.frame);
        const AncillaRotation rotation{sys.delta_an, sys.dims()};
        series = run_interaction(h, collapse, spec,
                                 spec.frame == model::Frame::ancilla_rwa ? &rotation : nullptr);
    }
    series.diagnostics.wall_seconds =
        std::chrono::duration<double>(Clock::now() - start).count();
    return series;
}

}  // namespace kpo::lindblad
