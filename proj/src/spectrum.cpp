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

#include "kpo/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <cstdio>
#include <string>

#include <omp.h>

namespace kpo::spectrum {

namespace {

std::string scientific(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", v);
    return buf;
}

// Largest |c| made real positive; ties (within 1e-12) go to the lowest n.
void fix_phase(Vector& v) {
    int best = 0;
    double best_abs = -1.0;
    for (int i = 0; i < v.size(); ++i) {
        const double a = std::abs(v(i));
        if (a > best_abs * (1.0 + 1e-12) + 1e-300) {
            best_abs = a;
            best = i;
        }
    }
    if (best_abs > 0.0) v *= std::conj(v(best)) / best_abs;
}

Eigen::MatrixXd block_matrix(const Matrix& h, int k) {
    const int dim = static_cast<int>(h.rows());
    const int nk = (dim - k + 3) / 4;
    Eigen::MatrixXd out(nk, nk);
    for (int i = 0; i < nk; ++i) {
        for (int j = 0; j < nk; ++j) out(i, j) = h(4 * i + k, 4 * j + k).real();
    }
    return out;
}

double top_energy(const model::SystemParams& p, int dim_a, int k) {
    const Operator h = model::build_kpo_hamiltonian(p, dim_a);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(block_matrix(h.matrix(), k),
                                                      Eigen::EigenvaluesOnly);
    return es.eigenvalues()(es.eigenvalues().size() - 1);
}

}  // namespace

BlockSpectrum block_spectrum(const model::SystemParams& p, int dim_a, int k) {
    if (k < 0 || k > 3) throw Error(ErrorKind::invalid_argument, "mod-4 class must be in 0..3");
    const Operator h = model::build_kpo_hamiltonian(p, dim_a);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(block_matrix(h.matrix(), k));
    const int nk = static_cast<int>(es.eigenvalues().size());

    BlockSpectrum out;
    out.k = k;
    for (int idx = nk - 1; idx >= 0; --idx) {
        Vector v = Vector::Zero(dim_a);
        for (int i = 0; i < nk; ++i) v(4 * i + k) = es.eigenvectors()(i, idx);
        fix_phase(v);
        out.energies.push_back(es.eigenvalues()(idx));
        out.vectors.emplace_back(Dims{dim_a, 1}, std::move(v));
    }
    return out;
}

InformationSpace information_space(const model::SystemParams& p, int dim_a,
                                   double max_tail_weight) {
    p.validate();
    InformationSpace states;
    for (int k = 0; k < 4; ++k) {
        BlockSpectrum block = block_spectrum(p, dim_a, k);
        ModEigenstate& s = states[k];
        s.k = k;
        s.quasienergy = block.energies.front();
        s.vector = block.vectors.front();
        s.bare_fock = p.pump == 0.0;

        double tail = 0.0;
        double nbar = 0.0;
        for (int n = 0; n < dim_a; ++n) {
            const double w = std::norm(s.vector[n]);
            nbar += n * w;
            if (n >= dim_a - 3) tail += w;
        }
        if (tail > max_tail_weight) {
            throw Error(ErrorKind::truncation,
                        "mod-" + std::to_string(k) + " state has weight " + scientific(tail) +
                            " in the top Fock levels; increase dim_a beyond " +
                            std::to_string(dim_a));
        }
        s.mean_photon = nbar;
        s.tail_weight = tail;
        for (int n = k; n < dim_a; n += 4) s.coeffs.push_back(s.vector[n]);
    }
    for (ModEigenstate& s : states) s.energy = (s.quasienergy - states[0].quasienergy) / p.kerr;
    return states;
}

double find_degenerate_pump(const model::SystemParams& p, int dim_a, const PumpSearch& search) {
    if (search.points < 2 || !(search.max_ratio > search.min_ratio)) {
        throw Error(ErrorKind::invalid_argument, "pump search window is empty");
    }
    auto splitting = [&](double ratio) {
        model::SystemParams q = p;
        q.pump = ratio * p.kerr;
        return top_energy(q, dim_a, 0) - top_energy(q, dim_a, 1);
    };

    double lo = search.min_ratio;
    double f_lo = splitting(lo);
    double hi = lo;
    bool bracketed = false;
    for (int i = 1; i < search.points; ++i) {
        const double r =
            search.min_ratio + (search.max_ratio - search.min_ratio) * i / (search.points - 1);
        const double f = splitting(r);
        if ((f_lo <= 0.0) != (f <= 0.0)) {
            hi = r;
            bracketed = true;
            break;
        }
        lo = r;
        f_lo = f;
    }
    if (!bracketed) {
        throw Error(ErrorKind::no_degeneracy,
                    "no |0_mod>/|1_mod> crossing for P/K in [" + std::to_string(search.min_ratio) +
                        ", " + std::to_string(search.max_ratio) + "]");
    }

    // Bisection well past the requested tolerance; each evaluation is two
    // eigen-solves of side ~dim_a/4.
    const double tol = std::min(search.rel_tol, 1e-6) * 1e-4;
    while (hi - lo > tol * hi) {
        const double mid = 0.5 * (lo + hi);
        const double f = splitting(mid);
        if ((f <= 0.0) == (f_lo <= 0.0)) {
            lo = mid;
            f_lo = f;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi) * p.kerr;
}

double energy_gap(const InformationSpace& s) {
    return std::abs(0.5 * (s[0].quasienergy + s[1].quasienergy) -
                    0.5 * (s[2].quasienergy + s[3].quasienergy));
}

double transition_element(const StateVector& bra, const StateVector& ket) {
    const Operator a = destroy(ket.dims().a);
    return std::norm(inner(bra, StateVector{ket.dims(), a.matrix() * ket.amplitudes()}));
}

double hel_transition_element(const model::SystemParams& p, int dim_a, int k, const StateVector& ket) {
    const BlockSpectrum block = block_spectrum(p, dim_a, k);
    if (block.vectors.size() < 2) {
        throw Error(ErrorKind::invalid_dimension, "block " + std::to_string(k) + " has no HEL state");
    }
    return transition_element(block.vectors[1], ket);
}

double loss_branching(const StateVector& bra, const StateVector& ket) {
    const double nbar = expectation(number(ket.dims().a), ket).real();
    return nbar > 0.0 ? transition_element(bra, ket) / nbar : 0.0;
}

LogicalFrame logical_frame(const InformationSpace& states) {
    const StateVector& zero = states[1].vector;
    const StateVector& one = states[3].vector;
    const Dims d = zero.dims();
    const double r = 1.0 / std::sqrt(2.0);
    const cplx i{0.0, 1.0};
    auto combo = [&](cplx c) { return StateVector{d, r * (zero.amplitudes() + c * one.amplitudes())}; };

    auto proj = [&](const StateVector& s) { return population_operator(s); };
    return LogicalFrame{zero,
                        one,
                        combo(1.0),
                        combo(-1.0),
                        combo(i),
                        combo(-i),
                        proj(states[1].vector) + proj(states[3].vector),
                        proj(states[0].vector) + proj(states[2].vector),
                        energy_gap(states),
                        states};
}

LogicalFrame logical_frame(const model::SystemParams& p, int dim_a, double max_tail_weight) {
    return logical_frame(information_space(p, dim_a, max_tail_weight));
}

std::vector<QuasienergyRow> quasienergy_scan(const model::SystemParams& p,
                                             const std::vector<double>& pump_values, int dim_a) {
    std::vector<QuasienergyRow> rows(pump_values.size());
    const int n = static_cast<int>(pump_values.size());
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) {
        model::SystemParams q = p;
        q.pump = pump_values[i];
        double e[4];
        for (int k = 0; k < 4; ++k) e[k] = top_energy(q, dim_a, k);
        QuasienergyRow& row = rows[i];
        row.pump = q.pump;
        for (int k = 0; k < 4; ++k) {
            row.quasienergy[k] = e[k];
            row.energy[k] = (e[k] - e[0]) / p.kerr;
        }
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Wigner

WignerGrid WignerGrid::auto_sized(double mean_photon, int points) {
    const double half = std::sqrt(2.0 * std::max(mean_photon, 0.0)) + 2.0;
    return {-half, half, -half, half, points, points};
}

double WignerField::integral() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s * grid.dx() * grid.dp();
}

namespace {

// Wigner function of rho at alpha via the Laguerre recursion for the
// displaced-parity elements of |m><n|; W(0) = 2/pi for the vacuum.
double wigner_recursive(const Matrix& rho, cplx alpha, std::vector<cplx>& work) {
    const int dim = static_cast<int>(rho.rows());
    work.assign(dim, 0.0);
    work[0] = std::exp(-2.0 * std::norm(alpha)) / std::numbers::pi;
    double w = rho(0, 0).real() * work[0].real();
    for (int n = 1; n < dim; ++n) {
        work[n] = 2.0 * alpha * work[n - 1] / std::sqrt(static_cast<double>(n));
        w += 2.0 * (rho(0, n) * work[n]).real();
    }
    for (int m = 1; m < dim; ++m) {
        const double sm = std::sqrt(static_cast<double>(m));
        cplx temp = work[m];
        work[m] = (2.0 * std::conj(alpha) * temp - sm * work[m - 1]) / sm;
        w += (rho(m, m) * work[m]).real();
        for (int n = m + 1; n < dim; ++n) {
            const cplx next = (2.0 * alpha * work[n - 1] - sm * temp) / std::sqrt(static_cast<double>(n));
            temp = work[n];
            work[n] = next;
            w += 2.0 * (rho(m, n) * work[n]).real();
        }
    }
    return 2.0 * w;
}

}  // namespace

double wigner_point(const DensityState& rho, cplx alpha) {
    const DensityState reduced = partial_trace_ancilla(rho).state;
    std::vector<cplx> work;
    return wigner_recursive(reduced.matrix(), alpha, work);
}

WignerField wigner(const DensityState& rho, const WignerGrid& grid) {
    if (grid.nx < 1 || grid.np < 1) throw Error(ErrorKind::invalid_argument, "empty Wigner grid");
    const DensityState reduced = partial_trace_ancilla(rho).state;
    WignerField field{grid, std::vector<double>(static_cast<std::size_t>(grid.nx) * grid.np)};
#pragma omp parallel
    {
        std::vector<cplx> work;
#pragma omp for schedule(static)
        for (int j = 0; j < grid.np; ++j) {
            for (int i = 0; i < grid.nx; ++i) {
                field.values[static_cast<std::size_t>(j) * grid.nx + i] =
                    wigner_recursive(reduced.matrix(), {grid.x(i), grid.p(j)}, work);
            }
        }
    }
    return field;
}

WignerField wigner(const StateVector& psi, const WignerGrid& grid) {
    return wigner(DensityState::from_pure(psi), grid);
}

}  // namespace kpo::spectrum
