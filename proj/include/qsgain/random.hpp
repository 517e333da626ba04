// Copyright 2026 The qsgain Authors
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

// Seeded generators of doubled-up test matrices.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "qsgain/linalg.hpp"
#include "qsgain/model.hpp"

namespace qsgain {

using Rng = std::mt19937_64;

/// Entries with real and imaginary parts uniform in [0, 1).
inline CMatrix random_unit_square(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  CMatrix x(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = u(rng);
      const double im = u(rng);
      x(i, j) = Complex(re, im);
    }
  return x;
}

/// Entries with real and imaginary parts uniform in [-1, 1).
inline CMatrix random_centered(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  return 2.0 * random_unit_square(rows, cols, rng) -
         CMatrix::Constant(rows, cols, Complex(1.0, 1.0));
}

/// Doubled-up Hermitian matrix from P1 Hermitian and P2 symmetric blocks.
inline CMatrix random_structured_hermitian(Eigen::Index n, Rng& rng) {
  const CMatrix a = random_unit_square(n, n, rng);
  const CMatrix b = random_unit_square(n, n, rng);
  return make_doubled(0.5 * (a + a.adjoint()), 0.5 * (b + b.transpose()));
}

/// As above, shifted by (|min eig| + 0.1) I so that P > 0.
inline CMatrix random_structured_pd(Eigen::Index n, Rng& rng) {
  CMatrix p = random_structured_hermitian(n, rng);
  const double shift = std::abs(min_hermitian_eigenvalue(p)) + 0.1;
  p += shift * CMatrix::Identity(2 * n, 2 * n);
  return p;
}

/// Doubled-up 2m x 2n coupling matrix with centered random blocks.
inline CMatrix random_structured_coupling(Eigen::Index m, Eigen::Index n, Rng& rng) {
  return make_doubled(random_centered(m, n, rng), random_centered(m, n, rng));
}

}  // namespace qsgain
