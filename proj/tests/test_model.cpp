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

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "helpers.hpp"
#include "kpo/model.hpp"
#include "kpo/units.hpp"

using namespace kpo;
using kpo::test::max_abs;

namespace {

model::SystemParams kerr_units(double delta_over_k, double p_over_k) {
    model::SystemParams p;
    p.kerr = 1.0;
    p.delta_kpo = delta_over_k;
    p.pump = p_over_k;
    return p;
}

// Largest eigenvalue of the Fock levels n = k (mod 4), by brute force on the
// full matrix restricted to those indices.
double top_of_class(const Matrix& h, int k) {
    std::vector<int> idx;
    for (int n = k; n < h.rows(); n += 4) idx.push_back(n);
    Eigen::MatrixXd block(idx.size(), idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        for (std::size_t j = 0; j < idx.size(); ++j) block(i, j) = h(idx[i], idx[j]).real();
    }
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(block).eigenvalues().maxCoeff();
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("KPO Hamiltonian without pump is the diagonal Kerr ladder") {
    const model::SystemParams p = kerr_units(1.5, 0.0);
    const Matrix h = model::build_kpo_hamiltonian(p, 12).matrix();
    for (int n = 0; n < 12; ++n) {
        CHECK(std::abs(h(n, n) - (1.5 * n - 0.5 * n * (n - 1.0))) < 1e-15);
    }
    CHECK(std::abs(h(2, 2) - (2.0 * 1.5 - 1.0)) < 1e-15);
    CHECK(max_abs(h - Matrix(h.diagonal().asDiagonal())) == 0.0);
    CHECK_THROWS_AS(model::build_kpo_hamiltonian(p, 7), Error);
}

TEST_CASE("KPO Hamiltonian respects the mod-4 grading and is Hermitian") {
    const model::SystemParams p = model::SystemParams::reference();
    const Operator h = model::build_kpo_hamiltonian(p, 30);
    for (int m = 0; m < 30; ++m) {
        for (int n = 0; n < 30; ++n) {
            if ((m - n) % 4 != 0) CHECK(h(m, n) == cplx(0.0, 0.0));
        }
    }
    CHECK(h.hermiticity_error() / p.kerr < 1e-12);
    // <n+4|H|n> = (P/2) sqrt((n+1)(n+2)(n+3)(n+4))
    CHECK(std::abs(h(4, 0).real() - 0.5 * p.pump * std::sqrt(24.0)) < 1e-9 * p.kerr);
}

TEST_CASE("mod-0 and mod-1 tops are degenerate at P/K = 0.2764") {
    const Matrix h = model::build_kpo_hamiltonian(kerr_units(1.5, 0.2764), 30).matrix();
    CHECK(std::abs(top_of_class(h, 0) - top_of_class(h, 1)) < 1e-3);
}

TEST_CASE("full system structure") {
    model::SystemParams p = model::SystemParams::reference();
    SUBCASE("uncoupled, resonant ancilla reduces to H_KPO (x) I") {
        p.g = 0.0;
        p.delta_an = 0.0;
        const model::FullSystem s = model::build_full_system(p, 10, 3);
        const Operator expect = tensor(model::build_kpo_hamiltonian(p, 10), identity(3));
        CHECK(max_abs(s.h_static.matrix() - expect.matrix()) == 0.0);
    }
    SUBCASE("drive operator") {
        const model::FullSystem s = model::build_full_system(p, 10, 3);
        const Dims d = s.dims();
        CHECK(s.drive_op.hermiticity_error() == 0.0);
        CHECK(std::abs(s.drive_op(d.index(1, 1), d.index(0, 0)) - 1.0) < 1e-15);
        CHECK(s.h_static.hermiticity_error() / p.kerr < 1e-12);
    }
    CHECK_THROWS_AS(model::build_full_system(p, 10, 1), Error);
}

TEST_CASE("full-cosine Hamiltonian at t = 0") {
    const model::SystemParams p = model::SystemParams::reference();
    const model::FullSystem s = model::build_full_system(p, 10, 3);
    const double amp = units::mhz(0.25);
    const std::vector<model::ToneParams> tones{{amp, p.delta_an + units::mhz(0.36)}};
    const Operator h = model::hamiltonian_at(0.0, s, tones, model::Frame::full_cosine);
    CHECK(max_abs(h.matrix() - (s.h_static.matrix() + amp * s.drive_op.matrix())) < 1e-12 * p.kerr);
    // cos(w t) at a later time.
    const double t = 3.7e-9;
    const Operator ht = model::hamiltonian_at(t, s, tones, model::Frame::full_cosine);
    const double c = std::cos(tones[0].frequency * t);
    CHECK(max_abs(ht.matrix() - (s.h_static.matrix() + amp * c * s.drive_op.matrix())) < 1e-9 * p.kerr);
}

TEST_CASE("RWA tone on ancilla resonance is static") {
    const model::SystemParams p = model::SystemParams::reference();
    const model::FullSystem s = model::build_full_system(p, 10, 3);
    const double amp = units::mhz(0.4);
    const std::vector<model::ToneParams> tones{{amp, p.delta_an}};
    for (double t : {0.0, 1.3e-9, 7.77e-7, 2.5e-5}) {
        const Matrix with = model::hamiltonian_at(t, s, tones, model::Frame::ancilla_rwa).matrix();
        const Matrix without = model::hamiltonian_at(t, s, {}, model::Frame::ancilla_rwa).matrix();
        CHECK(max_abs(with - without - 0.5 * amp * s.drive_op.matrix()) < 1e-12 * p.kerr);
        CHECK(max_abs(with - with.adjoint()) < 1e-12 * p.kerr);
    }
}

TEST_CASE("RWA frame keeps the exchange term with its oscillation") {
    const model::SystemParams p = model::SystemParams::reference();
    const model::FullSystem s = model::build_full_system(p, 8, 2);
    const Dims d = s.dims();
    const double t = 2.1e-10;
    const Matrix h = model::hamiltonian_at(t, s, {}, model::Frame::ancilla_rwa).matrix();
    // <n_a=1, n_b=0| g a^dag b e^{-i Delta_an t} |0, 1>
    const cplx expect = p.g * std::polar(1.0, -p.delta_an * t);
    CHECK(std::abs(h(d.index(1, 0), d.index(0, 1)) - expect) < 1e-9 * p.g);
    // No ancilla detuning on the diagonal.
    CHECK(std::abs(h(d.index(0, 1), d.index(0, 1))) == 0.0);
}

TEST_CASE("two-photon drive") {
    const Operator x = model::build_two_photon_drive(8);
    CHECK(std::abs(x(2, 0) - std::sqrt(2.0)) < 1e-15);
    CHECK(x.hermiticity_error() == 0.0);
    for (int m = 0; m < 8; ++m) {
        for (int n = 0; n < 8; ++n) {
            if ((m - n) % 2 != 0) CHECK(x(m, n) == cplx(0.0, 0.0));
        }
    }
    CHECK_THROWS_AS(model::build_two_photon_drive(2), Error);
}

TEST_CASE("collapse operators") {
    model::NoiseParams n = model::NoiseParams::reference();
    CHECK(model::collapse_operators(n, 10, 3).size() == 2);

    n.n_th = 0.15;
    const auto ops = model::collapse_operators(n, 10, 3);
    REQUIRE(ops.size() == 3);
    const Dims d{10, 3};
    // sqrt(gamma n_th) a^dag: <1,0| . |0,0> = sqrt(gamma * 0.15)
    CHECK(std::abs(ops[1](d.index(1, 0), d.index(0, 0)) - std::sqrt(n.gamma_kpo * 0.15)) < 1e-12);
    CHECK(std::abs(ops[0](d.index(0, 0), d.index(1, 0)) - std::sqrt(n.gamma_kpo * 1.15)) < 1e-9);

    CHECK(model::collapse_operators(model::NoiseParams{}, 10, 3).empty());
    n.gamma_an = -1.0;
    CHECK_THROWS_AS(model::collapse_operators(n, 10, 3), Error);
}

TEST_CASE("parameter validation and lab-frame bookkeeping") {
    const model::SystemParams p = model::SystemParams::reference();
    CHECK(std::abs(units::to_mhz(p.omega_p) - 4.0 * 2950.0) < 1e-6);
    CHECK(std::abs(units::to_mhz(p.delta_an) - 1050.0) < 1e-9);
    model::SystemParams bad = p;
    bad.kerr = 0.0;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = p;
    bad.pump = -1.0;
    CHECK_THROWS_AS(bad.validate(), Error);
    CHECK(model::frame_from_string("full") == model::Frame::full_cosine);
    CHECK_THROWS_AS(model::frame_from_string("lab"), Error);
}

}  // TEST_SUITE
