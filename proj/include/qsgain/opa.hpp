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

// Linearized two-mode optical parametric amplifier. The fundamental mode a is
// the plant, the second-harmonic mode b is treated as a dynamic uncertainty
// coupled through f = 2 i chi (abar b^* a - abar^* a^* b).
//
// Closed forms used as an oracle for the generic pipeline:
//   poles of H          -kappa_a/2 +- chi |bbar|
//   ||H||_inf = |H(0)|  2 kappa_a / (kappa_a^2 - 4 chi^2 |bbar|^2)
//   ||G||_inf           8 chi^2 |abar|^2 / kappa_b,   gamma = 1 / ||G||_inf
//   delta1              4 chi^2 |abar|^2
//   certified     <=>   4 chi^2 (8 (kappa_a/kappa_b) |abar|^2 + |bbar|^2) < kappa_a^2

#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qsgain/error.hpp"
#include "qsgain/model.hpp"
#include "qsgain/random.hpp"
#include "qsgain/smallgain.hpp"
#include "qsgain/uncertainty.hpp"

namespace qsgain {

struct OpaParams {
  double chi = 0.0;
  double kappa_a = 0.0;
  double kappa_b = 0.0;
  Complex abar;
  Complex bbar;
};

inline void validate(const OpaParams& p) {
  auto finite = [](Complex c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); };
  if (!(p.chi > 0.0) || !std::isfinite(p.chi))
    throw PreconditionError("opa: chi must be positive");
  if (!(p.kappa_a > 0.0) || !std::isfinite(p.kappa_a))
    throw PreconditionError("opa: kappa_a must be positive");
  if (!(p.kappa_b > 0.0) || !std::isfinite(p.kappa_b))
    throw PreconditionError("opa: kappa_b must be positive");
  if (!finite(p.abar) || !finite(p.bbar))
    throw PreconditionError("opa: abar and bbar must be finite");
}

struct OpaSystem {
  QuantumModel model;
  Complex g;
  LinearUncertainty uncertainty;
};

inline OpaSystem build_opa_model(const OpaParams& p) {
  validate(p);
  RawModel raw;
  raw.n_a = 1;
  raw.n_b = 1;
  raw.M = CMatrix::Zero(2, 2);
  raw.M(0, 1) = -kI * p.chi * p.bbar;
  raw.M(1, 0) = std::conj(raw.M(0, 1));
  raw.N_a = std::sqrt(p.kappa_a) * CMatrix::Identity(2, 2);
  raw.N_b = std::sqrt(p.kappa_b) * CMatrix::Identity(2, 2);
  raw.E_tilde = CMatrix::Zero(1, 2);
  raw.E_tilde(0, 0) = 1.0;
  const Complex g = 2.0 * p.chi * p.abar;
  return {validate_model(std::move(raw)), g, from_bilinear_coupling(g, p.kappa_b)};
}

struct OpaClosedForm {
  double eig_lo = 0.0;  // -kappa_a/2 - chi |bbar|
  double eig_hi = 0.0;  // -kappa_a/2 + chi |bbar|
  bool hurwitz = false;
  double h0_mag = 0.0;  // |H(0)|, equal to ||H||_inf when hurwitz
  double g_norm = 0.0;
  double gamma = kInf;
  double delta1 = 0.0;
  double lhs = 0.0;  // 4 chi^2 (8 (kappa_a/kappa_b) |abar|^2 + |bbar|^2)
  double rhs = 0.0;  // kappa_a^2
  bool certified = false;
};

inline OpaClosedForm closed_form_quantities(const OpaParams& p) {
  validate(p);
  const double chi2 = p.chi * p.chi;
  const double a2 = std::norm(p.abar);
  const double b2 = std::norm(p.bbar);
  OpaClosedForm c;
  c.eig_lo = -p.kappa_a / 2.0 - p.chi * std::abs(p.bbar);
  c.eig_hi = -p.kappa_a / 2.0 + p.chi * std::abs(p.bbar);
  c.hurwitz = p.kappa_a > 2.0 * p.chi * std::abs(p.bbar);
  c.h0_mag = std::abs(2.0 * p.kappa_a / (p.kappa_a * p.kappa_a - 4.0 * chi2 * b2));
  c.g_norm = 8.0 * chi2 * a2 / p.kappa_b;
  c.gamma = a2 == 0.0 ? kInf : p.kappa_b / (8.0 * chi2 * a2);
  c.delta1 = 4.0 * chi2 * a2;
  c.lhs = 4.0 * chi2 * (8.0 * (p.kappa_a / p.kappa_b) * a2 + b2);
  c.rhs = p.kappa_a * p.kappa_a;
  c.certified = c.lhs < c.rhs;
  return c;
}

struct AgreementReport {
  OpaParams params;
  OpaClosedForm closed;
  std::optional<CertificationReport> generic;
  double generic_gamma = kInf;
  double generic_delta1 = 0.0;
  bool in_boundary_band = false;
  bool verdict_match = false;
  std::vector<std::string> mismatches;

  bool agree() const { return mismatches.empty(); }
};

namespace detail {

inline bool rel_close(double x, double y, double tol) {
  if (std::isinf(x) || std::isinf(y)) return x == y;
  return std::abs(x - y) <= tol * std::max(std::abs(x), std::abs(y));
}

}  // namespace detail

/// Runs the generic pipeline on the OPA and compares it with the closed forms.
/// Verdicts may differ only inside the band |lhs - kappa_a^2| <= tol kappa_a^2.
inline AgreementReport cross_validate(const OpaParams& p, double tol = 1e-6,
                                      const CertifyOptions& opt = {}) {
  AgreementReport rep;
  rep.params = p;
  rep.closed = closed_form_quantities(p);
  rep.in_boundary_band = std::abs(rep.closed.lhs - rep.closed.rhs) <= tol * rep.closed.rhs;

  const OpaSystem sys = build_opa_model(p);
  try {
    const QsiqcParams q = qsiqc_params(sys.uncertainty, opt.hinf);
    rep.generic_gamma = q.gamma;
    rep.generic_delta1 = q.delta1;
    rep.generic = certify(sys.model, q.gamma, q.delta1, q.delta2, opt);
  } catch (const NumericError& e) {
    rep.mismatches.push_back(std::string("generic pipeline failed at ") + e.what());
    return rep;
  }

  const CertificationReport& g = *rep.generic;
  const bool generic_certified = g.verdict == Verdict::kCertified;
  rep.verdict_match = generic_certified == rep.closed.certified;
  if (!rep.verdict_match && !rep.in_boundary_band)
    rep.mismatches.push_back(std::string("verdict: generic ") + to_string(g.verdict) +
                             ", closed form " +
                             (rep.closed.certified ? "certified" : "not certified"));
  if (!detail::rel_close(rep.generic_gamma, rep.closed.gamma, tol))
    rep.mismatches.push_back("gamma");
  if (std::abs(rep.generic_delta1 - rep.closed.delta1) > tol * std::max(1.0, rep.closed.delta1))
    rep.mismatches.push_back("delta1");
  if (g.hinf && !detail::rel_close(*g.hinf, rep.closed.h0_mag, tol))
    rep.mismatches.push_back("hinf");
  if (std::abs(g.abscissa - rep.closed.eig_hi) > 1e-10 * std::max(1.0, p.kappa_a))
    rep.mismatches.push_back("spectral abscissa");
  return rep;
}

/// Log-uniform OPA parameters: chi in [1e-3, 2], kappa in [0.1, 10],
/// |abar|, |bbar| in [0.05, 5], phases uniform.
inline std::vector<OpaParams> sample_opa_params(std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto log_uniform = [&](double lo, double hi) {
    return std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * u(rng));
  };
  auto phase = [&] { return std::polar(1.0, 2.0 * std::numbers::pi * u(rng)); };
  std::vector<OpaParams> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    OpaParams p;
    p.chi = log_uniform(1e-3, 2.0);
    p.kappa_a = log_uniform(0.1, 10.0);
    p.kappa_b = log_uniform(0.1, 10.0);
    // Separate statements keep the draw order fixed.
    const double abar_mag = log_uniform(0.05, 5.0);
    p.abar = abar_mag * phase();
    const double bbar_mag = log_uniform(0.05, 5.0);
    p.bbar = bbar_mag * phase();
    out.push_back(p);
  }
  return out;
}

}  // namespace qsgain
