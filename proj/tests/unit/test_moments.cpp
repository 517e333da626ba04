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

TEST_CASE("closed loop of a free mode is block diagonal") {
  const QuantumModel m = testing::free_mode_model(1, 2.0);
  const ClosedLoopSystem sys = build_closed_loop(m, 0.0);
  CHECK(max_abs(CMatrix(sys.A_cl.topLeftCorner(2, 2) - compute_F(m).F)) < 1e-15);
  CHECK(max_abs(CMatrix(sys.A_cl.bottomRightCorner(2, 2) + 0.5 * CMatrix::Identity(2, 2))) <
        1e-15);
  CHECK(max_abs(CMatrix(sys.A_cl.topRightCorner(2, 2))) == 0.0);
  CHECK(max_abs(CMatrix(sys.A_cl.bottomLeftCorner(2, 2))) == 0.0);
}

TEST_CASE("closed loop of the OPA") {
  const OpaSystem s = build_opa_model({0.1, 2.0, 4.0, 1.0, 1.0});
  const ClosedLoopSystem sys = build_closed_loop(s.model, s.g);
  CMatrix fa(2, 2);
  fa << -1.0, -0.1, -0.1, -1.0;
  CHECK(max_abs(CMatrix(sys.A_cl.topLeftCorner(2, 2) - fa)) < 1e-15);
  // Sigma A^# Sigma = A
  CMatrix sig = CMatrix::Zero(4, 4);
  sig.topLeftCorner(2, 2) = doubled_sigma(1);
  sig.bottomRightCorner(2, 2) = doubled_sigma(1);
  CHECK(max_abs(CMatrix(sig * sys.A_cl.conjugate() * sig - sys.A_cl)) < 1e-15);
  CHECK(max_abs(CMatrix(sys.NoiseMap - sys.NoiseMap.adjoint())) == 0.0);
  CHECK(min_hermitian_eigenvalue(sys.NoiseMap) >= -1e-15);
  // db/dt contains +g a from f = i (g b^* a - g^* a^* b).
  CHECK(std::abs(sys.A_cl(2, 0) - s.g) < 1e-15);
}

TEST_CASE("vacuum steady state gives one quantum per plant mode") {
  for (Eigen::Index n : {1, 2, 3}) {
    const SecondMomentState st = steady_state_moments(build_closed_loop(testing::free_mode_model(n, 1.5), 0.0));
    CHECK_THAT(st.ms_value, WithinAbs(static_cast<double>(n), 1e-12));
    CHECK(st.lyapunov_residual < 1e-12);
  }
}

TEST_CASE("certified OPA instances satisfy ms_value <= c") {
  const auto params = sample_opa_params(200, 99);
  int checked = 0;
  for (const OpaParams& p : params) {
    if (!closed_form_quantities(p).certified) continue;
    const OpaSystem s = build_opa_model(p);
    const QsiqcParams q = qsiqc_params(s.uncertainty);
    const CertificationReport r = certify(s.model, q.gamma, q.delta1, q.delta2);
    REQUIRE(r.verdict == Verdict::kCertified);
    const SecondMomentState st = steady_state_moments(build_closed_loop(s.model, s.g));
    CHECK(std::isfinite(st.ms_value));
    CHECK(st.ms_value <= *r.c_bound);
    CHECK(max_abs(CMatrix(st.X - st.X.adjoint())) <= 1e-10 * std::max(1.0, max_abs(st.X)));
    for (Eigen::Index i = 0; i < 2; ++i) CHECK(st.X(i, i).real() >= -1e-10);
    CHECK(st.lyapunov_residual <= 1e-10 * std::max(1.0, max_abs(build_closed_loop(s.model, s.g).NoiseMap)));
    ++checked;
  }
  CHECK(checked > 50);
}

TEST_CASE("unstable loop is reported as divergent") {
  // A weak pump leaves the open-loop instability of the plant in place.
  const OpaSystem s = build_opa_model({1.2, 2.0, 4.0, 0.01, 1.0});
  const ClosedLoopSystem sys = build_closed_loop(s.model, s.g);
  CHECK_THROWS_AS(steady_state_moments(sys), DivergenceError);
  const MomentTrajectory tr = integrate_moments(sys, 200.0, 0.01);
  CHECK(tr.diverged);
}

TEST_CASE("integrate_moments") {
  SECTION("vacuum is stationary") {
    const ClosedLoopSystem sys = build_closed_loop(testing::free_mode_model(1, 2.0), 0.0);
    const MomentTrajectory tr = integrate_moments(sys, 5.0, 0.01);
    for (double v : tr.ms_value) CHECK_THAT(v, WithinAbs(1.0, 1e-12));
  }
  SECTION("certified OPA settles to the steady state") {
    const OpaSystem s = build_opa_model({0.3, 2.0, 1.0, Complex(0.2, 0.1), 0.8});
    const ClosedLoopSystem sys = build_closed_loop(s.model, s.g);
    const SecondMomentState st = steady_state_moments(sys);
    const double absc = std::abs(spectral_abscissa(sys.A_cl));
    const MomentTrajectory tr = integrate_moments(sys, 20.0 / absc, default_moment_step(sys));
    CHECK_FALSE(tr.diverged);
    CHECK(max_abs(CMatrix(tr.X_final - st.X)) < 1e-6);
    const MomentTrajectory longer = integrate_moments(sys, 100.0 / absc, default_moment_step(sys));
    CHECK_THAT(longer.time_average, WithinRel(st.ms_value, 1e-3));
  }
  SECTION("argument checks") {
    const ClosedLoopSystem sys = build_closed_loop(testing::free_mode_model(1, 2.0), 0.0);
    CHECK_THROWS_AS(integrate_moments(sys, 0.0, 0.1), PreconditionError);
    CHECK_THROWS_AS(integrate_moments(sys, 1.0, 2.0), PreconditionError);
  }
}
