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

// Dense operator algebra on one KPO mode optionally tensored with one ancilla
// mode. Composite index ordering is fixed everywhere as (KPO (x) ancilla):
//
//     index = n_a * dim_b + n_b
//
// so the KPO index is major. Single-mode objects carry dim_b = 1.

#include <complex>
#include <span>

#include <Eigen/Dense>

#include "kpo/error.hpp"

namespace kpo {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

struct Dims {
    int a = 1;
    int b = 1;

    int total() const { return a * b; }
    bool single_mode() const { return b == 1; }
    int kpo_index(int i) const { return i / b; }
    int ancilla_index(int i) const { return i % b; }
    int index(int na, int nb) const { return na * b + nb; }

    friend bool operator==(const Dims&, const Dims&) = default;
};

class Operator {
public:
    Operator() : entries_(Matrix::Zero(1, 1)) {}
    Operator(Dims dims, Matrix entries);

    static Operator zero(Dims dims);
    static Operator identity(Dims dims);

    const Dims& dims() const { return dims_; }
    const Matrix& matrix() const { return entries_; }
    int size() const { return dims_.total(); }
    cplx operator()(int row, int col) const { return entries_(row, col); }

    Operator dagger() const;
    /// max |X - X^dag| entrywise.
    double hermiticity_error() const;

    Operator& operator+=(const Operator& rhs);
    Operator& operator-=(const Operator& rhs);
    Operator& operator*=(cplx s);

    friend Operator operator+(Operator lhs, const Operator& rhs) { return lhs += rhs; }
    friend Operator operator-(Operator lhs, const Operator& rhs) { return lhs -= rhs; }
    friend Operator operator*(Operator lhs, cplx s) { return lhs *= s; }
    friend Operator operator*(cplx s, Operator rhs) { return rhs *= s; }
    friend Operator operator*(const Operator& lhs, const Operator& rhs);

private:
    Dims dims_;
    Matrix entries_;
};

class StateVector {
public:
    StateVector() : amplitudes_(Vector::Zero(1)) {}
    StateVector(Dims dims, Vector amplitudes);

    const Dims& dims() const { return dims_; }
    const Vector& amplitudes() const { return amplitudes_; }
    cplx operator[](int i) const { return amplitudes_(i); }
    double norm() const { return amplitudes_.norm(); }

    StateVector& normalize();
    StateVector normalized() const;

private:
    Dims dims_;
    Vector amplitudes_;
};

class DensityState {
public:
    DensityState() : rho_(Matrix::Ones(1, 1)) {}
    DensityState(Dims dims, Matrix rho);

    static DensityState from_pure(const StateVector& psi);

    const Dims& dims() const { return dims_; }
    const Matrix& matrix() const { return rho_; }
    cplx trace() const { return rho_.trace(); }
    double purity() const;
    double hermiticity_error() const;

private:
    Dims dims_;
    Matrix rho_;
};

// Single-mode builders (dims = {dim, 1}).
Operator destroy(int dim);
Operator create(int dim);
Operator number(int dim);
Operator identity(int dim);
StateVector fock_state(int dim, int n);

/// Pi_k = sum_n |4n+k><4n+k| for 4n+k < dim.
Operator mod4_projector(int k, int dim);

/// Kronecker product of a KPO operator and an ancilla operator (both single-mode).
Operator tensor(const Operator& kpo, const Operator& ancilla);
StateVector tensor(const StateVector& kpo, const StateVector& ancilla);

/// Lift single-mode operators into the composite space.
Operator on_kpo(const Operator& op, int dim_b);
Operator on_ancilla(const Operator& op, int dim_a);

struct ReducedState {
    DensityState state;
    bool noop = false;  // input was already single-mode
};

/// Trace out the ancilla. Single-mode input is returned unchanged with noop set.
ReducedState partial_trace_ancilla(const DensityState& rho);

cplx expectation(const Operator& op, const DensityState& rho);
cplx expectation(const Operator& op, const StateVector& psi);

/// <bra|ket>
cplx inner(const StateVector& bra, const StateVector& ket);

/// Projector |psi><psi| lifted with the identity on the ancilla when psi is a
/// KPO-only state and dim_b > 1.
Operator population_operator(const StateVector& psi, int dim_b = 1);

/// Entry (m,n) of op keeps only components changing ancilla number by `shift`
/// (nb(m) - nb(n) == shift).
Operator ancilla_shift_part(const Operator& op, int shift);

}  // namespace kpo
