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

#include <catch_amalgamated.hpp>

#include "qsgain/linalg.hpp"
#include "qsgain/model.hpp"
#include "qsgain/random.hpp"

using namespace qsgain;
using Catch::Matchers::WithinAbs;

TEST_CASE("ordered Schur keeps the factorization and moves selected eigenvalues") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const CMatrix a = random_centered(6, 6, rng);
    OrderedSchur s(a);
    const Eigen::Index k = s.reorder([](const Complex& l) { return l.real() < 0.0; });
    const CMatrix recon = s.u() * s.t() * s.u().adjoint();
    REQUIRE(max_abs(CMatrix(recon - a)) < 1e-12);
    REQUIRE(max_abs(CMatrix(s.u().adjoint() * s.u() - CMatrix::Identity(6, 6))) < 1e-12);
    for (Eigen::Index i = 0; i < 6; ++i) {
      CHECK((s.t()(i, i).real() < 0.0) == (i < k));
      for (Eigen::Index j = 0; j < i; ++j) CHECK(std::abs(s.t()(i, j)) < 1e-12);
    }
  }
}

TEST_CASE("Lyapunov solver residual") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 1 + trial % 6;
    CMatrix a = random_centered(n, n, rng);
    a -= (spectral_abscissa(a) + 0.5) * CMatrix::Identity(n, n);
    const CMatrix g = random_centered(n, n, rng);
    const CMatrix q = g * g.adjoint();
    const CMatrix x = solve_lyapunov(a, q);
    CHECK(max_abs(CMatrix(a * x + x * a.adjoint() + q)) <= 1e-10 * std::max(1.0, max_abs(q)));
    CHECK(min_hermitian_eigenvalue(hermitian_part(x)) > -1e-10);
  }
}

TEST_CASE("Lyapunov solver rejects a singular operator") {
  CMatrix a(2, 2);
  a << Complex(0, 1), 0, 0, Complex(-1, 0);
  REQUIRE_THROWS_AS(solve_lyapunov(a, CMatrix::Identity(2, 2)), NumericError);
  REQUIRE_THROWS_AS(solve_lyapunov(a, CMatrix::Identity(3, 3)), DimensionError);
}

TEST_CASE("stabilizing Riccati solution") {
  // Scalar: 2 a x + r x^2 + q = 0 with a = -1, r = 1, q = 0.5 -> x = 1 - sqrt(0.5).
  CMatrix a(1, 1), r(1, 1), q(1, 1);
  a << -1.0;
  r << 1.0;
  q << 0.5;
  const auto sol = solve_stabilizing_riccati(a, r, q, 0.5);
  CHECK_THAT(sol.x(0, 0).real(), WithinAbs(1.0 - std::sqrt(0.5), 1e-14));

  Rng rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Index n = 2 + trial % 4;
    CMatrix f = random_centered(n, n, rng);
    f -= (spectral_abscissa(f) + 1.0) * CMatrix::Identity(n, n);
    const CMatrix b = 0.1 * random_centered(n, 1, rng);
    const CMatrix rr = b * b.adjoint();
    const CMatrix qq = 0.01 * CMatrix::Identity(n, n);
    const auto s = solve_stabilizing_riccati(f, rr, qq, 0.01);
    const CMatrix x = s.x;
    CHECK(max_abs(CMatrix(f.adjoint() * x + x * f + x * rr * x + qq)) < 1e-10);
    CHECK(spectral_abscissa(CMatrix(f + rr * x)) < 0.0);
  }
}

TEST_CASE("Riccati with imaginary-axis Hamiltonian eigenvalues is infeasible") {
  // a = -1, r = 1, q = 2: discriminant 1 - q < 0, eigenvalues +-i.
  CMatrix a(1, 1), r(1, 1), q(1, 1);
  a << -1.0;
  r << 1.0;
  q << 2.0;
  REQUIRE_THROWS_AS(solve_stabilizing_riccati(a, r, q, 2.0), InfeasibleEpsilon);
}

TEST_CASE("spectral helpers") {
  CMatrix a = CMatrix::Zero(2, 2);
  a(0, 0) = -3.0;
  a(1, 1) = Complex(-1.0, 2.0);
  CHECK_THAT(spectral_abscissa(a), WithinAbs(-1.0, 1e-14));
  CHECK_THAT(spectral_norm(a), WithinAbs(3.0, 1e-14));
  CMatrix bad = a;
  bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_FALSE(all_finite(bad));
}
