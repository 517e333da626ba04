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

// Integral-quadratic-constraint parameters (gamma, delta1, delta2) of a
// linear uncertainty subsystem
//   db = A_u b dt + B_u z dt + noise,   w1 = C_u b,   w2 = 0.

#pragma once

#include <cmath>
#include <string>

#include "qsgain/error.hpp"
#include "qsgain/linalg.hpp"
#include "qsgain/model.hpp"
#include "qsgain/smallgain.hpp"

namespace qsgain {

struct LinearUncertainty {
  CMatrix A_u;       // n_u x n_u
  CMatrix B_u;       // n_u x 1
  CMatrix C_u;       // 1 x n_u
  CMatrix NoiseCov;  // n_u x n_u, Hermitian PSD
};

/// Checks shapes and that NoiseCov is Hermitian PSD.
inline LinearUncertainty make_uncertainty(CMatrix a, CMatrix b, CMatrix c, CMatrix noise) {
  const Eigen::Index n = a.rows();
  if (n < 1 || a.cols() != n || b.rows() != n || b.cols() != 1 || c.rows() != 1 ||
      c.cols() != n || noise.rows() != n || noise.cols() != n)
    throw DimensionError("uncertainty: expected A_u n x n, B_u n x 1, C_u 1 x n, NoiseCov n x n");
  if (!all_finite(a) || !all_finite(b) || !all_finite(c) || !all_finite(noise))
    throw PreconditionError("uncertainty: non-finite entries");
  const double scale = std::max(1.0, max_abs(noise));
  if (max_abs(CMatrix(noise - noise.adjoint())) > 1e-12 * scale)
    throw PreconditionError("uncertainty: NoiseCov is not Hermitian");
  if (min_hermitian_eigenvalue(noise) < -1e-12 * scale)
    throw PreconditionError("uncertainty: NoiseCov is not positive semidefinite");
  return {std::move(a), std::move(b), std::move(c), std::move(noise)};
}

/// One-mode system of the bilinear perturbation f = i (g b^* z - g^* z^* b)
/// with a damped mode of rate kappa_b: A_u = -kappa_b/2, B_u = g,
/// C_u = -i g^*, NoiseCov = kappa_b.
inline LinearUncertainty from_bilinear_coupling(Complex g, double kappa_b) {
  if (!(kappa_b > 0.0) || !std::isfinite(kappa_b))
    throw PreconditionError("from_bilinear_coupling: kappa_b must be positive, got " +
                            std::to_string(kappa_b));
  if (!std::isfinite(g.real()) || !std::isfinite(g.imag()))
    throw PreconditionError("from_bilinear_coupling: coupling must be finite");
  CMatrix a(1, 1), b(1, 1), c(1, 1), q(1, 1);
  a(0, 0) = -kappa_b / 2.0;
  b(0, 0) = g;
  c(0, 0) = -kI * std::conj(g);
  q(0, 0) = kappa_b;
  return {a, b, c, q};
}

/// Uncertainty subsystem of a model whose first uncertainty mode carries the
/// bilinear coupling g. Only the annihilation sector of the b-dynamics is
/// kept, so N_b must not mix b with b^#.
inline LinearUncertainty uncertainty_from_model(const QuantumModel& model, Complex g) {
  const Eigen::Index nb = model.n_b();
  const Eigen::Index mb = model.m_b();
  const CMatrix& nbm = model.N_b();
  const CMatrix jb = doubled_j(nb);
  const CMatrix jm = doubled_j(mb);
  const CMatrix drift = -0.5 * jb * nbm.adjoint() * jm * nbm;
  const CMatrix gain = -jb * nbm.adjoint() * jm;
  if (max_abs(CMatrix(drift.topRightCorner(nb, nb))) > 1e-12 * std::max(1.0, max_abs(drift)))
    throw PreconditionError(
        "uncertainty_from_model: b-sector drift couples b and b^#, not representable");
  CMatrix vacuum = CMatrix::Zero(2 * mb, 2 * mb);
  vacuum.topLeftCorner(mb, mb).setIdentity();
  const CMatrix diffusion = gain * vacuum * gain.adjoint();

  CMatrix b = CMatrix::Zero(nb, 1);
  CMatrix c = CMatrix::Zero(1, nb);
  b(0, 0) = g;
  c(0, 0) = -kI * std::conj(g);
  return make_uncertainty(drift.topLeftCorner(nb, nb), b, c,
                          hermitian_part(diffusion.topLeftCorner(nb, nb)));
}

/// gamma = 1 / ||C_u (sI - A_u)^{-1} B_u||_inf, +inf when the gain is zero.
inline double gain_gamma(const LinearUncertainty& u, const HinfOptions& opt = {}) {
  if (spectral_abscissa(u.A_u) >= 0.0)
    throw PreconditionError("gain_gamma: A_u is not Hurwitz");
  const double g = hinf_norm(u.A_u, u.B_u, u.C_u, opt);
  return g == 0.0 ? kInf : 1.0 / g;
}

/// Zero-input steady-state covariance X: A_u X + X A_u^H + NoiseCov = 0.
inline CMatrix steady_state_covariance(const LinearUncertainty& u) {
  if (spectral_abscissa(u.A_u) >= 0.0)
    throw PreconditionError("steady_state_delta1: A_u is not Hurwitz");
  return hermitian_part(solve_lyapunov(u.A_u, u.NoiseCov));
}

/// delta1 = C_u X C_u^H, the zero-input stationary value of <w1 w1^*>.
inline double steady_state_delta1(const LinearUncertainty& u) {
  const CMatrix x = steady_state_covariance(u);
  return std::max(0.0, (u.C_u * x * u.C_u.adjoint())(0, 0).real());
}

struct QsiqcParams {
  double gamma = kInf;
  double delta1 = 0.0;
  double delta2 = 0.0;  // bilinear f has zero second z-derivative
};

inline QsiqcParams qsiqc_params(const LinearUncertainty& u, const HinfOptions& opt = {}) {
  return {gain_gamma(u, opt), steady_state_delta1(u), 0.0};
}

}  // namespace qsgain
