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

#include "kpo/kernels.hpp"

#include <atomic>

#include <omp.h>

namespace kpo::lindblad {

namespace {

std::atomic<int> g_kernel_threads{1};

// Below this side the fork/join overhead exceeds the elementwise work.
constexpr int kParallelSide = 96;

}  // namespace

void set_kernel_threads(int threads) { g_kernel_threads = threads < 1 ? 1 : threads; }
int kernel_threads() { return g_kernel_threads; }

void reference_rhs(const Matrix& h, std::span<const Matrix> collapse, const Matrix& rho, Matrix& out) {
    const cplx i{0.0, 1.0};
    out = -i * (h * rho - rho * h);
    for (const Matrix& c : collapse) {
        const Matrix cdc = c.adjoint() * c;
        out += c * rho * c.adjoint() - 0.5 * (cdc * rho + rho * cdc);
    }
}

LindbladKernel::LindbladKernel(std::vector<Matrix> collapse) : collapse_(std::move(collapse)) {
    if (!collapse_.empty()) size_ = static_cast<int>(collapse_.front().rows());
    decay_ = Matrix::Zero(size_, size_);
    for (const Matrix& c : collapse_) {
        if (c.rows() != size_ || c.cols() != size_) {
            throw Error(ErrorKind::dimension_mismatch, "collapse operators differ in size");
        }
        collapse_dag_.push_back(c.adjoint());
        decay_.noalias() += collapse_dag_.back() * c;
    }
}

void LindbladKernel::effective_hamiltonian(const Matrix& h, Matrix& h_eff) const {
    if (collapse_.empty()) {
        h_eff = h;
        return;
    }
    h_eff = h - cplx{0.0, 0.5} * decay_;
}

void coherent_part(const Matrix& product, Matrix& out) {
    const int n = static_cast<int>(product.rows());
    out.resize(n, n);

    const cplx* y = product.data();
    cplx* o = out.data();
    const int threads = (n >= kParallelSide && !omp_in_parallel()) ? kernel_threads() : 1;
    // Column-major storage.
#pragma omp parallel for num_threads(threads) schedule(static) if (threads > 1)
    for (int col = 0; col < n; ++col) {
        for (int row = 0; row < n; ++row) {
            const cplx a = y[static_cast<std::size_t>(col) * n + row];
            const cplx b = y[static_cast<std::size_t>(row) * n + col];
            // -i a + conj(-i b) = -i a + i conj(b)
            o[static_cast<std::size_t>(col) * n + row] =
                cplx{a.imag() + b.imag(), -a.real() + b.real()};
        }
    }
}

void LindbladKernel::apply(const Matrix& h_eff, const Matrix& rho, Matrix& out) const {
    product_.noalias() = h_eff * rho;
    coherent_part(product_, out);

    for (std::size_t j = 0; j < collapse_.size(); ++j) {
        scratch_.noalias() = collapse_[j] * rho;
        out.noalias() += scratch_ * collapse_dag_[j];
    }
}

}  // namespace kpo::lindblad
