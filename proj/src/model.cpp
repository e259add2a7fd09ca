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

#include "kpo/model.hpp"

#include <cmath>
#include <string>

#include "kpo/units.hpp"

namespace kpo::model {

SystemParams SystemParams::reference() {
    using namespace units;
    return from_lab(mhz(2980.0), mhz(20.0), mhz(30.0), mhz(5.5405), mhz(4000.0), mhz(7.0));
}

SystemParams SystemParams::from_lab(double omega_kpo, double kerr, double delta_kpo, double pump,
                                    double omega_an, double g) {
    SystemParams p;
    p.omega_kpo = omega_kpo;
    p.kerr = kerr;
    p.delta_kpo = delta_kpo;
    p.pump = pump;
    p.omega_an = omega_an;
    p.g = g;
    p.omega_p = 4.0 * (omega_kpo - delta_kpo);
    p.delta_an = omega_an - p.omega_p / 4.0;
    return p;
}

void SystemParams::validate() const {
    if (!(kerr > 0.0)) throw Error(ErrorKind::invalid_argument, "kerr must be > 0");
    if (!(pump >= 0.0)) throw Error(ErrorKind::invalid_argument, "pump must be >= 0");
}

NoiseParams NoiseParams::reference() {
    NoiseParams n;
    n.gamma_kpo = units::rate_from_us(50.0);
    n.gamma_an = units::mhz(0.557);
    return n;
}

void NoiseParams::validate() const {
    if (gamma_kpo < 0.0 || n_th < 0.0 || gamma_phi < 0.0 || gamma_an < 0.0) {
        throw Error(ErrorKind::invalid_argument, "noise rates must be >= 0");
    }
}

std::string_view to_string(Frame frame) {
    return frame == Frame::full_cosine ? "full" : "rwa";
}

Frame frame_from_string(std::string_view name) {
    if (name == "full" || name == "full-cosine" || name == "full_cosine") return Frame::full_cosine;
    if (name == "rwa" || name == "ancilla-rwa" || name == "ancilla_rwa") return Frame::ancilla_rwa;
    throw Error(ErrorKind::config, "unknown frame '" + std::string(name) + "'");
}

Operator TimeDependentHamiltonian::at(double t) const {
    Matrix m;
    evaluate(t, m);
    return {static_part.dims(), std::move(m)};
}

void TimeDependentHamiltonian::evaluate(double t, Matrix& out) const {
    out = static_part.matrix();
    for (const Drive& d : drives) {
        const cplx f = d.amplitude * std::polar(1.0, -d.frequency * t);
        out.noalias() += f * d.op.matrix();
        out.noalias() += std::conj(f) * d.op.matrix().adjoint();
    }
}

Operator build_kpo_hamiltonian(const SystemParams& p, int dim_a) {
    if (dim_a < 8) {
        throw Error(ErrorKind::invalid_dimension, "KPO truncation must be >= 8, got " +
                                                      std::to_string(dim_a));
    }
    Matrix h = Matrix::Zero(dim_a, dim_a);
    for (int n = 0; n < dim_a; ++n) {
        const double nd = n;
        h(n, n) = p.delta_kpo * nd - 0.5 * p.kerr * nd * (nd - 1.0);
    }
    // <n+4| a^dag^4 |n> = sqrt((n+1)(n+2)(n+3)(n+4))
    for (int n = 0; n + 4 < dim_a; ++n) {
        const double amp = 0.5 * p.pump * std::sqrt((n + 1.0) * (n + 2.0) * (n + 3.0) * (n + 4.0));
        h(n + 4, n) = amp;
        h(n, n + 4) = amp;
    }
    return {Dims{dim_a, 1}, std::move(h)};
}

FullSystem build_full_system(const SystemParams& p, int dim_a, int dim_b) {
    if (dim_b < 2) {
        throw Error(ErrorKind::invalid_dimension, "ancilla truncation must be >= 2");
    }
    const Operator a = on_kpo(destroy(dim_a), dim_b);
    const Operator b = on_ancilla(destroy(dim_b), dim_a);
    const Operator ad = a.dagger();
    const Operator bd = b.dagger();

    Operator h = on_kpo(build_kpo_hamiltonian(p, dim_a), dim_b);
    h += p.delta_an * (bd * b);
    h += p.g * (ad * b + a * bd);

    Operator drive = ad * bd + a * b;
    return {std::move(h), std::move(drive), p.delta_an};
}

namespace {

Drive tone_drive(const FullSystem& sys, const ToneParams& tone, Frame frame, double frame_shift) {
    if (frame == Frame::full_cosine) return {sys.drive_op, 0.5 * tone.amplitude, tone.frequency};
    return {ancilla_shift_part(sys.drive_op, +1), 0.5 * tone.amplitude,
            tone.frequency - frame_shift};
}

}  // namespace

TimeDependentHamiltonian frame_hamiltonian(const FullSystem& sys, std::span<const ToneParams> tones,
                                           Frame frame) {
    if (frame == Frame::full_cosine) return static_frame_hamiltonian(sys, tones, frame);

    const Dims d = sys.dims();
    Operator stat = ancilla_shift_part(sys.h_static, 0);
    stat -= sys.delta_an * on_ancilla(number(d.b), d.a);

    TimeDependentHamiltonian h{std::move(stat), {}};
    // a^dag b lowers the ancilla: its entries carry e^{-i Delta_an t}.
    h.drives.push_back({ancilla_shift_part(sys.h_static, -1), 1.0, sys.delta_an});
    for (const ToneParams& t : tones) h.drives.push_back(tone_drive(sys, t, frame, sys.delta_an));
    return h;
}

TimeDependentHamiltonian static_frame_hamiltonian(const FullSystem& sys,
                                                  std::span<const ToneParams> tones, Frame frame) {
    TimeDependentHamiltonian h{sys.h_static, {}};
    for (const ToneParams& t : tones) h.drives.push_back(tone_drive(sys, t, frame, 0.0));
    return h;
}

Operator hamiltonian_at(double t, const FullSystem& sys, std::span<const ToneParams> tones,
                        Frame frame) {
    return frame_hamiltonian(sys, tones, frame).at(t);
}

Operator build_two_photon_drive(int dim_a) {
    if (dim_a < 3) throw Error(ErrorKind::invalid_dimension, "two-photon drive needs dim_a >= 3");
    const Operator a = destroy(dim_a);
    const Operator a2 = a * a;
    return a2.dagger() + a2;
}

std::vector<Operator> collapse_operators(const NoiseParams& noise, int dim_a, int dim_b) {
    noise.validate();
    std::vector<Operator> out;
    const Operator a = on_kpo(destroy(dim_a), dim_b);
    if (noise.gamma_kpo * (1.0 + noise.n_th) > 0.0) {
        out.push_back(std::sqrt(noise.gamma_kpo * (1.0 + noise.n_th)) * a);
    }
    if (noise.gamma_kpo * noise.n_th > 0.0) {
        out.push_back(std::sqrt(noise.gamma_kpo * noise.n_th) * a.dagger());
    }
    if (noise.gamma_phi > 0.0) out.push_back(std::sqrt(noise.gamma_phi) * (a.dagger() * a));
    if (noise.gamma_an > 0.0 && dim_b > 1) {
        out.push_back(std::sqrt(noise.gamma_an) * on_ancilla(destroy(dim_b), dim_a));
    }
    return out;
}

}  // namespace kpo::model
