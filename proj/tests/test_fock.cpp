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

#include "helpers.hpp"
#include "kpo/fock.hpp"

using namespace kpo;
using kpo::test::max_abs;

TEST_SUITE("fock") {

TEST_CASE("destroy lowers Fock states by sqrt(n)") {
    const Operator a = destroy(4);
    const Vector v = a.matrix() * fock_state(4, 3).amplitudes();
    CHECK(std::abs(v(2) - std::sqrt(3.0)) < 1e-15);
    CHECK((v - std::sqrt(3.0) * fock_state(4, 2).amplitudes()).norm() < 1e-15);
    CHECK((a.matrix() * fock_state(4, 0).amplitudes()).norm() == 0.0);
    CHECK_THROWS_AS(destroy(1), Error);
}

TEST_CASE("canonical commutator away from the truncation edge") {
    const int dim = 40;
    const Matrix a = destroy(dim).matrix();
    const Matrix c = a * a.adjoint() - a.adjoint() * a;
    CHECK(max_abs(c.topLeftCorner(dim - 1, dim - 1) - Matrix::Identity(dim - 1, dim - 1)) < 1e-12);
}

TEST_CASE("number operator is diagonal with exact integers") {
    const Matrix n = number(25).matrix();
    for (int i = 0; i < 25; ++i) {
        for (int j = 0; j < 25; ++j) CHECK(n(i, j) == cplx(i == j ? i : 0.0, 0.0));
    }
}

TEST_CASE("dagger is an involution") {
    const Operator x{Dims{6, 1}, test::random_matrix(6, 3)};
    CHECK(max_abs(x.dagger().dagger().matrix() - x.matrix()) == 0.0);
}

TEST_CASE("tensor products") {
    CHECK(max_abs(tensor(identity(2), identity(3)).matrix() - Matrix::Identity(6, 6)) == 0.0);
    const Operator ab = tensor(destroy(3), destroy(4));
    const Dims d = ab.dims();
    CHECK(d.a == 3);
    CHECK(d.b == 4);
    CHECK(std::abs(ab(d.index(0, 0), d.index(1, 1)) - 1.0) < 1e-15);

    const Operator x{Dims{3, 1}, test::random_matrix(3, 11)};
    const Operator y{Dims{4, 1}, test::random_matrix(4, 12)};
    CHECK(std::abs(tensor(x, y).matrix().trace() - x.matrix().trace() * y.matrix().trace()) < 1e-12);

    // Product-state expectation values factorise.
    const StateVector psi = test::coherent(8, {0.4, -0.3}).normalized();
    const StateVector phi = test::coherent(3, {0.2, 0.1}).normalized();
    const Operator xa{Dims{8, 1}, test::random_matrix(8, 21)};
    const Operator yb{Dims{3, 1}, test::random_matrix(3, 22)};
    const cplx joint = expectation(tensor(xa, yb), tensor(psi, phi));
    CHECK(std::abs(joint - expectation(xa, psi) * expectation(yb, phi)) < 1e-12);
}

TEST_CASE("partial trace over the ancilla") {
    SUBCASE("product state") {
        const Matrix ra = test::random_density(5, 1);
        const Matrix rb = test::random_density(3, 2);
        Matrix joint(15, 15);
        for (int i = 0; i < 15; ++i) {
            for (int j = 0; j < 15; ++j) joint(i, j) = ra(i / 3, j / 3) * rb(i % 3, j % 3);
        }
        const ReducedState r = partial_trace_ancilla(DensityState{Dims{5, 3}, joint});
        CHECK_FALSE(r.noop);
        CHECK(max_abs(r.state.matrix() - ra) < 1e-14);
    }
    SUBCASE("Bell state") {
        Vector bell = Vector::Zero(4);
        bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
        const ReducedState r = partial_trace_ancilla(DensityState::from_pure({Dims{2, 2}, bell}));
        CHECK(max_abs(r.state.matrix() - 0.5 * Matrix::Identity(2, 2)) < 1e-15);
    }
    SUBCASE("random state against brute-force summation") {
        const int da = 6, db = 4;
        const Matrix rho = test::random_density(da * db, 7);
        Matrix oracle = Matrix::Zero(da, da);
        for (int m = 0; m < da; ++m) {
            for (int n = 0; n < da; ++n) {
                for (int k = 0; k < db; ++k) oracle(m, n) += rho(m * db + k, n * db + k);
            }
        }
        const ReducedState r = partial_trace_ancilla(DensityState{Dims{da, db}, rho});
        CHECK(max_abs(r.state.matrix() - oracle) < 1e-15);
        CHECK(std::abs(r.state.trace() - cplx{1.0, 0.0}) < 1e-12);
    }
    SUBCASE("single-mode input is a flagged no-op") {
        const Matrix rho = test::random_density(4, 9);
        const ReducedState r = partial_trace_ancilla(DensityState{Dims{4, 1}, rho});
        CHECK(r.noop);
        CHECK(max_abs(r.state.matrix() - rho) == 0.0);
    }
}

TEST_CASE("mod-4 projectors") {
    const int dim = 10;
    Matrix sum = Matrix::Zero(dim, dim);
    for (int k = 0; k < 4; ++k) {
        sum += mod4_projector(k, dim).matrix();
        for (int j = 0; j < 4; ++j) {
            const Matrix prod = mod4_projector(k, dim).matrix() * mod4_projector(j, dim).matrix();
            const Matrix expect = k == j ? mod4_projector(k, dim).matrix() : Matrix::Zero(dim, dim);
            CHECK(max_abs(prod - expect) == 0.0);
        }
    }
    CHECK(max_abs(sum - Matrix::Identity(dim, dim)) == 0.0);
    CHECK(std::abs(mod4_projector(1, dim).matrix().trace() - 3.0) == 0.0);
    CHECK(mod4_projector(1, dim)(9, 9) == cplx(1.0, 0.0));
}

TEST_CASE("expectation values") {
    CHECK(std::abs(expectation(number(6), fock_state(6, 3)) - 3.0) < 1e-15);
    const StateVector psi = test::coherent(12, {0.3, 0.7}).normalized();
    CHECK(std::abs(expectation(identity(12), psi) - 1.0) < 1e-14);
    CHECK(std::abs(expectation(identity(12), DensityState::from_pure(psi)) - 1.0) < 1e-14);

    // Poisson oracle: the truncated |alpha = 1> has <n> = 1 up to the lost tail.
    const StateVector alpha = test::coherent(30, 1.0);
    CHECK(std::abs(expectation(number(30), alpha).real() - 1.0) < 1e-8);
    CHECK_THROWS_AS(expectation(number(5), fock_state(6, 1)), Error);
}

TEST_CASE("normalisation") {
    StateVector v{Dims{5, 1}, test::random_matrix(5, 4).col(0)};
    v.normalize();
    CHECK(std::abs(v.norm() - 1.0) < 1e-12);
    CHECK_THROWS_AS(StateVector(Dims{5, 1}, Vector::Zero(5)).normalized(), Error);
}

TEST_CASE("ancilla shift parts reassemble the operator") {
    const Operator x = tensor(Operator{Dims{4, 1}, test::random_matrix(4, 5)},
                              Operator{Dims{3, 1}, test::random_matrix(3, 6)});
    Matrix sum = Matrix::Zero(12, 12);
    for (int s = -2; s <= 2; ++s) sum += ancilla_shift_part(x, s).matrix();
    CHECK(max_abs(sum - x.matrix()) == 0.0);
    const Operator raise = ancilla_shift_part(on_ancilla(create(3), 4), +1);
    CHECK(max_abs(raise.matrix() - on_ancilla(create(3), 4).matrix()) == 0.0);
}

}  // TEST_SUITE
