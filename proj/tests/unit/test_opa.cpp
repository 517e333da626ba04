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

#include "../support.hpp"

using namespace qsgain;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
const OpaParams kExample{0.1, 2.0, 4.0, 1.0, 1.0};
}

TEST_CASE("OPA model matrices") {
  const OpaSystem s = build_opa_model(kExample);
  CMatrix m(2, 2);
  m << 0.0, Complex(0.0, -0.1), Complex(0.0, 0.1), 0.0;
  CHECK(max_abs(CMatrix(s.model.M() - m)) < 1e-17);
  CHECK(max_abs(CMatrix(s.model.N_a() - std::sqrt(2.0) * CMatrix::Identity(2, 2))) < 1e-15);
  CHECK(max_abs(CMatrix(s.model.N_b() - 2.0 * CMatrix::Identity(2, 2))) < 1e-15);
  CHECK(std::abs(s.g - Complex(0.2, 0.0)) < 1e-17);
  CHECK_THROWS_AS(build_opa_model({0.0, 2.0, 4.0, 1.0, 1.0}), PreconditionError);
  CHECK_THROWS_AS(build_opa_model({0.1, -2.0, 4.0, 1.0, 1.0}), PreconditionError);
}

TEST_CASE("OPA closed forms") {
  const OpaClosedForm c = closed_form_quantities(kExample);
  CHECK_THAT(c.eig_lo, WithinAbs(-1.1, 1e-15));
  CHECK_THAT(c.eig_hi, WithinAbs(-0.9, 1e-15));
  CHECK(c.hurwitz);
  CHECK_THAT(c.h0_mag, WithinAbs(1.010101, 1e-6));
  CHECK_THAT(c.gamma, WithinRel(50.0, 1e-14));
  CHECK_THAT(c.delta1, WithinAbs(0.04, 1e-15));
  CHECK_THAT(c.lhs, WithinAbs(0.2, 1e-14));
  CHECK(c.rhs == 4.0);
  CHECK(c.certified);

  const OpaClosedForm v = closed_form_quantities({0.5, 2.0, 0.1, 2.0, 0.5});
  CHECK_THAT(v.lhs, WithinRel(640.25, 1e-12));
  CHECK(v.hurwitz);
  CHECK_FALSE(v.certified);

  const OpaClosedForm u = closed_form_quantities({1.2, 2.0, 4.0, 1.0, 1.0});
  CHECK_FALSE(u.hurwitz);
  CHECK_FALSE(u.certified);
}

TEST_CASE("generic pipeline reproduces the OPA example") {
  const AgreementReport a = cross_validate(kExample);
  INFO((a.mismatches.empty() ? std::string() : a.mismatches.front()));
  CHECK(a.agree());
  REQUIRE(a.generic);
  CHECK(a.generic->verdict == Verdict::kCertified);
  CHECK_THAT(*a.generic->hinf, WithinRel(1.0 / 0.99, 1e-8));
  CHECK_THAT(a.generic_gamma, WithinRel(50.0, 1e-8));
}

TEST_CASE("gain-violated OPA instance") {
  const AgreementReport a = cross_validate({0.5, 2.0, 0.1, 2.0, 0.5});
  CHECK(a.agree());
  REQUIRE(a.generic);
  CHECK(a.generic->verdict == Verdict::kGainViolated);
  CHECK_FALSE(a.closed.certified);
}

TEST_CASE("spectral abscissa of the OPA plant") {
  for (const OpaParams& p : sample_opa_params(100, 5)) {
    const CMatrix f = compute_F(build_opa_model(p).model).F;
    CHECK_THAT(spectral_abscissa(f),
               WithinAbs(closed_form_quantities(p).eig_hi, 1e-10 * std::max(1.0, p.kappa_a)));
  }
}

TEST_CASE("OPA sweep agrees with the closed forms") {
  const auto params = sample_opa_params(300, 2026);
  int certified = 0;
  for (const OpaParams& p : params) {
    const AgreementReport a = cross_validate(p);
    INFO("chi=" << p.chi << " kappa_a=" << p.kappa_a << " kappa_b=" << p.kappa_b);
    for (const auto& m : a.mismatches) INFO(m);
    CHECK(a.agree());
    if (a.generic && a.generic->verdict == Verdict::kCertified) {
      ++certified;
      CHECK(a.closed.hurwitz);
    }
  }
  CHECK(certified > 0);
  CHECK(certified < static_cast<int>(params.size()));
}

TEST_CASE("sample_opa_params is deterministic and in range") {
  const auto a = sample_opa_params(50, 11), b = sample_opa_params(50, 11);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].chi == b[i].chi);
    CHECK(a[i].abar == b[i].abar);
    CHECK(a[i].chi >= 1e-3);
    CHECK(a[i].chi <= 2.0);
    CHECK(a[i].kappa_a >= 0.1);
    CHECK(a[i].kappa_b <= 10.0);
    CHECK(std::abs(a[i].bbar) >= 0.05);
    CHECK(std::abs(a[i].bbar) <= 5.0);
  }
}
