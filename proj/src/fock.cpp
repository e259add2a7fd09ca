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

#include "kpo/fock.hpp"

#include <cmath>
#include <string>

namespace kpo {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::invalid_dimension: return "invalid_dimension";
        case ErrorKind::dimension_mismatch: return "dimension_mismatch";
        case ErrorKind::invalid_argument: return "invalid_argument";
        case ErrorKind::truncation: return "truncation";
        case ErrorKind::no_degeneracy: return "no_degeneracy";
        case ErrorKind::step_underflow: return "step_underflow";
        case ErrorKind::fit_failure: return "fit_failure";
        case ErrorKind::config: return "config";
    }
    return "unknown";
}

namespace {

void require_dims(const Dims& dims) {
    if (dims.a < 1 || dims.b < 1) {
        throw Error(ErrorKind::invalid_dimension,
                    "dimensions must be positive, got " + std::to_string(dims.a) + "x" +
                        std::to_string(dims.b));
    }
}

void require_same(const Dims& lhs, const Dims& rhs) {
    if (!(lhs == rhs)) {
        throw Error(ErrorKind::dimension_mismatch,
                    "dimension mismatch: " + std::to_string(lhs.a) + "x" + std::to_string(lhs.b) +
                        " vs " + std::to_string(rhs.a) + "x" + std::to_string(rhs.b));
    }
}

void require_ladder_dim(int dim) {
    if (dim < 2) {
        throw Error(ErrorKind::invalid_dimension,
                    "ladder operators need dim >= 2, got " + std::to_string(dim));
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// Operator

Operator::Operator(Dims dims, Matrix entries) : dims_(dims), entries_(std::move(entries)) {
    require_dims(dims_);
    if (entries_.rows() != dims_.total() || entries_.cols() != dims_.total()) {
        throw Error(ErrorKind::dimension_mismatch,
                    "operator matrix must be square with side " + std::to_string(dims_.total()));
    }
}

Operator Operator::zero(Dims dims) { return {dims, Matrix::Zero(dims.total(), dims.total())}; }

Operator Operator::identity(Dims dims) {
    return {dims, Matrix::Identity(dims.total(), dims.total())};
}

Operator Operator::dagger() const { return {dims_, entries_.adjoint()}; }

double Operator::hermiticity_error() const {
    return (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
}

Operator& Operator::operator+=(const Operator& rhs) {
    require_same(dims_, rhs.dims_);
    entries_ += rhs.entries_;
    return *this;
}

Operator& Operator::operator-=(const Operator& rhs) {
    require_same(dims_, rhs.dims_);
    entries_ -= rhs.entries_;
    return *this;
}

Operator& Operator::operator*=(cplx s) {
    entries_ *= s;
    return *this;
}

Operator operator*(const Operator& lhs, const Operator& rhs) {
    require_same(lhs.dims_, rhs.dims_);
    return {lhs.dims_, lhs.entries_ * rhs.entries_};
}

// ---------------------------------------------------------------------------
// States

StateVector::StateVector(Dims dims, Vector amplitudes)
    : dims_(dims), amplitudes_(std::move(amplitudes)) {
    require_dims(dims_);
    if (amplitudes_.size() != dims_.total()) {
        throw Error(ErrorKind::dimension_mismatch,
                    "state vector length must be " + std::to_string(dims_.total()));
    }
}

StateVector& StateVector::normalize() {
    const double n = amplitudes_.norm();
    if (n == 0.0) throw Error(ErrorKind::invalid_argument, "cannot normalize the zero vector");
    amplitudes_ /= n;
    return *this;
}

StateVector StateVector::normalized() const {
    StateVector copy = *this;
    return copy.normalize();
}

DensityState::DensityState(Dims dims, Matrix rho) : dims_(dims), rho_(std::move(rho)) {
    require_dims(dims_);
    if (rho_.rows() != dims_.total() || rho_.cols() != dims_.total()) {
        throw Error(ErrorKind::dimension_mismatch,
                    "density matrix must be square with side " + std::to_string(dims_.total()));
    }
}

DensityState DensityState::from_pure(const StateVector& psi) {
    return {psi.dims(), psi.amplitudes() * psi.amplitudes().adjoint()};
}

double DensityState::purity() const { return (rho_ * rho_).trace().real(); }

double DensityState::hermiticity_error() const {
    return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// Builders

Operator destroy(int dim) {
    require_ladder_dim(dim);
    Matrix m = Matrix::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) m(n - 1, n) = std::sqrt(static_cast<double>(n));
    return {Dims{dim, 1}, std::move(m)};
}

Operator create(int dim) { return destroy(dim).dagger(); }

Operator number(int dim) {
    require_dims(Dims{dim, 1});
    Matrix m = Matrix::Zero(dim, dim);
    for (int n = 0; n < dim; ++n) m(n, n) = static_cast<double>(n);
    return {Dims{dim, 1}, std::move(m)};
}

Operator identity(int dim) { return Operator::identity(Dims{dim, 1}); }

StateVector fock_state(int dim, int n) {
    if (n < 0 || n >= dim) {
        throw Error(ErrorKind::invalid_argument,
                    "Fock level " + std::to_string(n) + " outside truncation " + std::to_string(dim));
    }
    Vector v = Vector::Zero(dim);
    v(n) = 1.0;
    return {Dims{dim, 1}, std::move(v)};
}

Operator mod4_projector(int k, int dim) {
    if (k < 0 || k > 3) {
        throw Error(ErrorKind::invalid_argument, "mod-4 class must be in 0..3");
    }
    Matrix m = Matrix::Zero(dim, dim);
    for (int n = k; n < dim; n += 4) m(n, n) = 1.0;
    return {Dims{dim, 1}, std::move(m)};
}

Operator tensor(const Operator& kpo, const Operator& ancilla) {
    if (!kpo.dims().single_mode() || !ancilla.dims().single_mode()) {
        throw Error(ErrorKind::invalid_dimension, "tensor expects two single-mode operators");
    }
    const int da = kpo.size();
    const int db = ancilla.size();
    Matrix m(da * db, da * db);
    for (int i = 0; i < da; ++i) {
        for (int j = 0; j < da; ++j) {
            m.block(i * db, j * db, db, db) = kpo(i, j) * ancilla.matrix();
        }
    }
    return {Dims{da, db}, std::move(m)};
}

StateVector tensor(const StateVector& kpo, const StateVector& ancilla) {
    if (!kpo.dims().single_mode() || !ancilla.dims().single_mode()) {
        throw Error(ErrorKind::invalid_dimension, "tensor expects two single-mode states");
    }
    const int da = kpo.dims().a;
    const int db = ancilla.dims().a;
    Vector v(da * db);
    for (int i = 0; i < da; ++i) v.segment(i * db, db) = kpo[i] * ancilla.amplitudes();
    return {Dims{da, db}, std::move(v)};
}

Operator on_kpo(const Operator& op, int dim_b) {
    if (dim_b == 1) return op;
    return tensor(op, identity(dim_b));
}

Operator on_ancilla(const Operator& op, int dim_a) { return tensor(identity(dim_a), op); }

ReducedState partial_trace_ancilla(const DensityState& rho) {
    const Dims d = rho.dims();
    if (d.single_mode()) return {rho, true};
    Matrix out = Matrix::Zero(d.a, d.a);
    const Matrix& m = rho.matrix();
    for (int i = 0; i < d.a; ++i) {
        for (int j = 0; j < d.a; ++j) {
            cplx s = 0.0;
            for (int k = 0; k < d.b; ++k) s += m(i * d.b + k, j * d.b + k);
            out(i, j) = s;
        }
    }
    return {DensityState{Dims{d.a, 1}, std::move(out)}, false};
}

cplx expectation(const Operator& op, const DensityState& rho) {
    require_same(op.dims(), rho.dims());
    // Tr(A rho) = sum_ij A_ij rho_ji
    return op.matrix().cwiseProduct(rho.matrix().transpose()).sum();
}

cplx expectation(const Operator& op, const StateVector& psi) {
    require_same(op.dims(), psi.dims());
    return psi.amplitudes().dot(op.matrix() * psi.amplitudes());
}

cplx inner(const StateVector& bra, const StateVector& ket) {
    require_same(bra.dims(), ket.dims());
    return bra.amplitudes().dot(ket.amplitudes());
}

Operator population_operator(const StateVector& psi, int dim_b) {
    Operator proj{psi.dims(), psi.amplitudes() * psi.amplitudes().adjoint()};
    if (psi.dims().single_mode() && dim_b > 1) return on_kpo(proj, dim_b);
    return proj;
}

Operator ancilla_shift_part(const Operator& op, int shift) {
    const Dims d = op.dims();
    Matrix m = Matrix::Zero(d.total(), d.total());
    for (int j = 0; j < d.total(); ++j) {
        for (int i = 0; i < d.total(); ++i) {
            if (d.ancilla_index(i) - d.ancilla_index(j) == shift) m(i, j) = op(i, j);
        }
    }
    return {d, std::move(m)};
}

}  // namespace kpo
