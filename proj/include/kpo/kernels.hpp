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

// Lindblad right-hand-side kernels.
//
//   drho/dt = -i[H, rho] + sum_j (c_j rho c_j^dag - 1/2 {c_j^dag c_j, rho})
//
// `reference_rhs` is the literal formula evaluated serially and is kept as the
// oracle for tests and the benchmark. `LindbladKernel` folds the
// anticommutator into H_eff = H - (i/2) sum c^dag c, evaluates
// -i H_eff rho once and obtains the other half from Hermitian symmetry, so it
// is only valid for Hermitian rho. Its elementwise passes are OpenMP loops;
// products go through Eigen.

#include <span>
#include <vector>

#include "kpo/fock.hpp"

namespace kpo::lindblad {

void reference_rhs(const Matrix& h, std::span<const Matrix> collapse, const Matrix& rho, Matrix& out);

/// out <- Y + Y^dag with Y = -i product, where product = H_eff rho.
void coherent_part(const Matrix& product, Matrix& out);

class LindbladKernel {
public:
    explicit LindbladKernel(std::vector<Matrix> collapse);

    int size() const { return size_; }
    const std::vector<Matrix>& collapse() const { return collapse_; }
    /// sum_j c_j^dag c_j
    const Matrix& decay() const { return decay_; }

    /// h_eff <- h - (i/2) sum c^dag c
    void effective_hamiltonian(const Matrix& h, Matrix& h_eff) const;

    /// out <- -i H_eff rho + i rho H_eff^dag + sum c rho c^dag (rho Hermitian).
    void apply(const Matrix& h_eff, const Matrix& rho, Matrix& out) const;

private:
    int size_ = 0;
    std::vector<Matrix> collapse_;
    std::vector<Matrix> collapse_dag_;
    Matrix decay_;
    mutable Matrix product_;
    mutable Matrix scratch_;
};

/// Number of OpenMP threads the elementwise kernel loops may use; 1 keeps a
/// single evolution strictly serial.
void set_kernel_threads(int threads);
int kernel_threads();

}  // namespace kpo::lindblad
