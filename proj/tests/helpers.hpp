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

#include <cmath>
#include <random>

#include "kpo/fock.hpp"

namespace kpo::test {

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

/// Random density matrix G G^dag / Tr, fixed seed.
inline Matrix random_density(int n, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> gauss;
    Matrix g(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) g(i, j) = cplx{gauss(rng), gauss(rng)};
    }
    Matrix rho = g * g.adjoint();
    return rho / rho.trace();
}

inline Matrix random_matrix(int n, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) m(i, j) = cplx{u(rng), u(rng)};
    }
    return m;
}

/// Truncated coherent state from the Poisson amplitudes e^{-|b|^2/2} b^n / sqrt(n!).
inline StateVector coherent(int dim, cplx beta) {
    Vector v(dim);
    cplx term = std::exp(-0.5 * std::norm(beta));
    for (int n = 0; n < dim; ++n) {
        v(n) = term;
        term *= beta / std::sqrt(static_cast<double>(n + 1));
    }
    return {Dims{dim, 1}, v};
}

}  // namespace kpo::test
