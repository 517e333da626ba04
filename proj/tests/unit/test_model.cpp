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

#include "qsgain/model.hpp"
#include "qsgain/random.hpp"

using namespace qsgain;

namespace {

RawModel opa_raw() {
  RawModel raw;
  raw.n_a = 1;
  raw.n_b = 1;
  raw.M = CMatrix::Zero(2, 2);
  raw.M(0, 1) = Complex(0.0, -0.1);
  raw.M(1, 0) = Complex(0.0, 0.1);
  raw.N_a = std::sqrt(2.0) * CMatrix::Identity(2, 2);
  raw.N_b = 2.0 * CMatrix::Identity(2, 2);
  raw.E_tilde = CMatrix::Zero(1, 2);
  raw.E_tilde(0, 0) = 1.0;
  return raw;
}

template <class F>
ModelError capture(F&& f) {
  try {
    f();
  } catch (const ModelError& e) {
    return e;
  }
  FAIL("expected ModelError");
  throw std::logic_error("unreachable");
}

}  // namespace

TEST_CASE("doubled constants") {
  const Constants c = constants(1);
  CMatrix j(2, 2), s(2, 2);
  j << 1, 0, 0, -1;
  s << 0, 1, 1, 0;
  CHECK(c.J == j);
  CHECK(c.Sigma == s);
  const Constants c2 = constants(2);
  CHECK(c2.J.diagonal().real().transpose() == Eigen::RowVector4d(1, 1, -1, -1));
  CHECK(c2.Sigma == (CMatrix(4, 4) << 0, 0, 1, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0, 1, 0, 0).finished());
  CHECK_THROWS_AS(constants(0), DimensionError);
}

TEST_CASE("structure test on known matrices") {
  CHECK(structure_residual(CMatrix::Identity(2, 2)) == 0.0);
  CMatrix x(2, 2);
  x << 1, 2, 3, 4;
  CHECK(structure_residual(x) > 0.0);
  Rng rng(1);
  const CMatrix p = random_structured_hermitian(3, rng);
  CHECK(structure_residual(p, 3) < 1e-15);
  CHECK(max_abs(CMatrix(p - p.adjoint())) < 1e-15);
  CHECK_THROWS_AS(structure_residual(p, 2), DimensionError);
}

TEST_CASE("validate_model accepts the OPA model") {
  const QuantumModel m = validate_model(opa_raw());
  CHECK(m.n_a() == 1);
  CHECK(m.m_a() == 1);
  CHECK(m.M()(0, 1) == Complex(0.0, -0.1));
}

TEST_CASE("validate_model reports the violated invariant and location") {
  SECTION("non-Hermitian M") {
    RawModel raw = opa_raw();
    raw.M(0, 1) = Complex(0.0, 0.1);
    const ModelError e = capture([&] { validate_model(raw); });
    CHECK(e.violation() == Violation::kNotHermitian);
    CHECK(e.field() == "M");
  }
  SECTION("broken structure in M") {
    RawModel raw = opa_raw();
    raw.M(0, 0) = 1.0;  // Hermitian but M22 != conj(M11)
    const ModelError e = capture([&] { validate_model(raw); });
    CHECK(e.violation() == Violation::kBrokenStructure);
    CHECK(e.field() == "M");
    CHECK(e.magnitude() > 0.0);
  }
  SECTION("broken structure in N_b") {
    RawModel raw = opa_raw();
    raw.N_b(0, 0) = 3.0;
    const ModelError e = capture([&] { validate_model(raw); });
    CHECK(e.violation() == Violation::kBrokenStructure);
    CHECK(e.field() == "N_b");
  }
  SECTION("non-finite entry") {
    RawModel raw = opa_raw();
    raw.N_a(1, 1) = std::numeric_limits<double>::infinity();
    const ModelError e = capture([&] { validate_model(raw); });
    CHECK(e.violation() == Violation::kNonFinite);
    CHECK(e.field() == "N_a");
    CHECK(e.row() == 1);
    CHECK(e.col() == 1);
  }
  SECTION("dimension mismatch") {
    RawModel raw = opa_raw();
    raw.E_tilde = CMatrix::Zero(1, 3);
    CHECK(capture([&] { validate_model(raw); }).violation() == Violation::kDimension);
    raw = opa_raw();
    raw.n_a = 0;
    CHECK(capture([&] { validate_model(raw); }).violation() == Violation::kDimension);
    raw = opa_raw();
    raw.N_a = CMatrix::Identity(3, 2);
    CHECK(capture([&] { validate_model(raw); }).violation() == Violation::kDimension);
  }
}

TEST_CASE("structure tolerance is relative") {
  RawModel raw = opa_raw();
  raw.M *= 1e8;
  raw.M(0, 0) = 1e-6;  // 1e-14 relative to max |M| = 1e7
  raw.M(1, 1) = 0.0;
  CHECK_NOTHROW(validate_model(raw));
}
