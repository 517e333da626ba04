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

// Shared fixtures for the unit and acceptance tests.

#pragma once

#include <cmath>
#include <string>

#include "qsgain/qsgain.hpp"

namespace qsgain::testing {

inline std::string data_path(const std::string& name) {
  return std::string(QSGAIN_DATA_DIR) + "/" + name;
}

/// Model with n plant modes, random structured M and N_a (m = n channels) and
/// a random output row. Hurwitz is not guaranteed.
inline QuantumModel random_model(Eigen::Index n, Rng& rng) {
  RawModel raw;
  raw.n_a = n;
  raw.n_b = 1;
  raw.M = random_structured_hermitian(n, rng);
  raw.N_a = random_structured_coupling(n, n, rng);
  raw.N_b = CMatrix::Identity(2, 2);
  raw.E_tilde = random_centered(1, 2 * n, rng);
  return validate_model(std::move(raw));
}

/// Random plant with spectral abscissa below -0.05 ||F||_2. An extra damping
/// channel sqrt(k) I is appended to N_a, which shifts F by -k/2 I.
inline QuantumModel random_stable_model(Eigen::Index n, Rng& rng) {
  const QuantumModel m = random_model(n, rng);
  const CMatrix f = compute_F(m).F;
  const double absc = spectral_abscissa(f);
  std::uniform_real_distribution<double> u(0.1, 0.5);
  double k = std::max(0.0, 2.0 * (absc + u(rng) * spectral_norm(f)));
  for (;;) {
    RawModel raw;
    raw.n_a = n;
    raw.n_b = 1;
    raw.M = m.M();
    const Eigen::Index ch = m.N_a().rows() / 2;
    CMatrix n1 = CMatrix::Zero(ch + n, n), n2 = CMatrix::Zero(ch + n, n);
    n1.topRows(ch) = m.N_a().topLeftCorner(ch, n);
    n2.topRows(ch) = m.N_a().topRightCorner(ch, n);
    n1.bottomRows(n) = std::sqrt(k) * CMatrix::Identity(n, n);
    raw.N_a = make_doubled(n1, n2);
    raw.N_b = m.N_b();
    raw.E_tilde = m.E_tilde();
    QuantumModel out = validate_model(std::move(raw));
    const CMatrix g = compute_F(out).F;
    if (spectral_abscissa(g) < -0.05 * spectral_norm(g)) return out;
    k = 2.0 * k + 1.0;
  }
}

/// max |H(i w)| over `points` log-spaced frequencies in [1e-4, 1e4] ||F||_2,
/// split evenly between positive and negative w, plus w = 0.
inline double grid_hinf(const PlantMatrices& plant, int points) {
  const double scale = spectral_norm(plant.F);
  const int half = points / 2;
  double best = std::abs(freq_response(plant, 0.0));
  for (int k = 0; k < half; ++k) {
    const double w = scale * std::pow(10.0, -4.0 + 8.0 * k / (half - 1));
    best = std::max({best, std::abs(freq_response(plant, w)), std::abs(freq_response(plant, -w))});
  }
  return best;
}

/// OPA-family model with chi = 0: free damped mode, no coupling.
inline QuantumModel free_mode_model(Eigen::Index n, double kappa) {
  RawModel raw;
  raw.n_a = n;
  raw.n_b = 1;
  raw.M = CMatrix::Zero(2 * n, 2 * n);
  raw.N_a = std::sqrt(kappa) * CMatrix::Identity(2 * n, 2 * n);
  raw.N_b = CMatrix::Identity(2, 2);
  raw.E_tilde = CMatrix::Zero(1, 2 * n);
  raw.E_tilde(0, 0) = 1.0;
  return validate_model(std::move(raw));
}

}  // namespace qsgain::testing
