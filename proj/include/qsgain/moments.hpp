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

// Second-moment analysis of the full plant + uncertainty loop when the
// perturbation is bilinear, f = i (g b1^* z - g^* z^* b1). The loop is then a
// linear quantum system in x = [a; a^#; b; b^#] and the stationary value of
// <x_a^H x_a> is a Lyapunov solve.

#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "qsgain/error.hpp"
#include "qsgain/linalg.hpp"
#include "qsgain/model.hpp"

namespace qsgain {

struct ClosedLoopSystem {
  Eigen::Index n_a = 0;
  Eigen::Index n_b = 0;
  CMatrix A_cl;      // drift of x = [a; a^#; b; b^#]
  CMatrix NoiseMap;  // diffusion D of d<x x^H>/dt = A X + X A^H + D
};

struct SecondMomentState {
  CMatrix X;  // <x x^H>
  double ms_value = 0.0;
  double lyapunov_residual = 0.0;
};

namespace detail {

inline CMatrix block_diag(const CMatrix& a, const CMatrix& b) {
  CMatrix out = CMatrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

/// diag(I_m, 0_m): vacuum Ito table of [dB; dB^#].
inline CMatrix vacuum_ito(Eigen::Index m) {
  CMatrix v = CMatrix::Zero(2 * m, 2 * m);
  v.topLeftCorner(m, m).setIdentity();
  return v;
}

}  // namespace detail

/// Vacuum state of the loop: <a a^*> = 1, <a^* a> = 0 for every mode.
inline CMatrix vacuum_moments(Eigen::Index n_a, Eigen::Index n_b) {
  return detail::block_diag(detail::vacuum_ito(n_a), detail::vacuum_ito(n_b));
}

inline ClosedLoopSystem build_closed_loop(const QuantumModel& model, Complex g) {
  const Eigen::Index na = model.n_a(), nb = model.n_b();
  const Eigen::Index na2 = 2 * na, nb2 = 2 * nb, dim = na2 + nb2;

  // Bilinear coupling in the doubled Hamiltonian matrix; rows of b1, b1^#.
  const CMatrix coupling = kI * g * model.E_tilde();
  CMatrix m_ba = CMatrix::Zero(nb2, na2);
  m_ba.row(0) = coupling;
  m_ba.row(nb) = coupling.conjugate() * doubled_sigma(na);

  CMatrix m_full = CMatrix::Zero(dim, dim);
  m_full.topLeftCorner(na2, na2) = model.M();
  m_full.bottomLeftCorner(nb2, na2) = m_ba;
  m_full.topRightCorner(na2, nb2) = m_ba.adjoint();

  const CMatrix j_full = detail::block_diag(doubled_j(na), doubled_j(nb));
  const CMatrix j_field = detail::block_diag(doubled_j(model.m_a()), doubled_j(model.m_b()));
  const CMatrix n_full = detail::block_diag(model.N_a(), model.N_b());

  ClosedLoopSystem sys;
  sys.n_a = na;
  sys.n_b = nb;
  sys.A_cl = -kI * j_full * m_full - 0.5 * j_full * n_full.adjoint() * j_field * n_full;
  const CMatrix gain = -j_full * n_full.adjoint() * j_field;
  const CMatrix ito =
      detail::block_diag(detail::vacuum_ito(model.m_a()), detail::vacuum_ito(model.m_b()));
  sys.NoiseMap = hermitian_part(gain * ito * gain.adjoint());
  return sys;
}

inline double plant_mean_square(const CMatrix& x, Eigen::Index n_a) {
  return x.diagonal().head(2 * n_a).real().sum();
}

/// Stationary second moments: A X + X A^H + D = 0.
inline SecondMomentState steady_state_moments(const ClosedLoopSystem& sys) {
  const double absc = spectral_abscissa(sys.A_cl);
  if (!(absc < 0.0))
    throw DivergenceError("steady_state_moments: closed loop is mean-square unstable "
                          "(spectral abscissa " + std::to_string(absc) + ")");
  SecondMomentState st;
  st.X = hermitian_part(solve_lyapunov(sys.A_cl, sys.NoiseMap));
  st.lyapunov_residual =
      max_abs(CMatrix(sys.A_cl * st.X + st.X * sys.A_cl.adjoint() + sys.NoiseMap));
  st.ms_value = plant_mean_square(st.X, sys.n_a);
  return st;
}

struct MomentTrajectory {
  std::vector<double> t;
  std::vector<double> ms_value;
  CMatrix X_final;
  double time_average = 0.0;  // trapezoidal mean of ms_value over [0, T]
  bool diverged = false;
};

/// Default RK4 step: 0.01 / |spectral abscissa| (or 0.01 / ||A|| when the
/// loop is not Hurwitz).
inline double default_moment_step(const ClosedLoopSystem& sys) {
  const double absc = spectral_abscissa(sys.A_cl);
  if (absc < 0.0) return 0.01 / std::abs(absc);
  return 0.01 / std::max(1.0, spectral_norm(sys.A_cl));
}

/// Integrates dX/dt = A X + X A^H + D from the vacuum with fixed-step RK4.
/// The step is shrunk so that an integer number of steps covers [0, T].
inline MomentTrajectory integrate_moments(const ClosedLoopSystem& sys, double horizon,
                                          double dt) {
  if (!(horizon > 0.0) || !(dt > 0.0) || dt > horizon)
    throw PreconditionError("integrate_moments: need T > 0 and 0 < dt <= T");
  const auto steps = static_cast<long>(std::ceil(horizon / dt - 1e-9));
  const double h = horizon / static_cast<double>(steps);
  const CMatrix& a = sys.A_cl;
  const CMatrix ah = a.adjoint();
  auto rhs = [&](const CMatrix& x) -> CMatrix { return a * x + x * ah + sys.NoiseMap; };

  MomentTrajectory out;
  out.t.reserve(steps + 1);
  out.ms_value.reserve(steps + 1);
  CMatrix x = vacuum_moments(sys.n_a, sys.n_b);
  out.t.push_back(0.0);
  out.ms_value.push_back(plant_mean_square(x, sys.n_a));
  double integral = 0.0;
  for (long k = 1; k <= steps; ++k) {
    const CMatrix k1 = rhs(x);
    const CMatrix k2 = rhs(x + 0.5 * h * k1);
    const CMatrix k3 = rhs(x + 0.5 * h * k2);
    const CMatrix k4 = rhs(x + h * k3);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double ms = plant_mean_square(x, sys.n_a);
    if (!all_finite(x) || max_abs(x) > 1e12) {
      out.diverged = true;
      break;
    }
    integral += 0.5 * h * (out.ms_value.back() + ms);
    out.t.push_back(static_cast<double>(k) * h);
    out.ms_value.push_back(ms);
  }
  out.X_final = x;
  out.time_average = out.diverged ? std::numeric_limits<double>::infinity() : integral / out.t.back();
  return out;
}

}  // namespace qsgain
