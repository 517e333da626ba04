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

// Small-gain certification of robust mean-square stability.
//
// For a plant with doubled-up matrices (M, N_a, E_tilde) the certificate
// needs
//   F = -i J M - 1/2 J N_a^H J N_a              Hurwitz, and
//   || C (sI - F)^{-1} B ||_inf < gamma / 2,    B = J Sigma E~^T, C = E~^# Sigma.
// The bounded real lemma then yields a doubled-up P > 0 with
//   F^H P + P F + 4 P B B^H P + C^H C / gamma^2 < 0,
// from which the mean-square bound
//   c = (lambda~ + |mu|^2 / 4 + delta1 + delta2) / delta0
// follows.

#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qsgain/error.hpp"
#include "qsgain/linalg.hpp"
#include "qsgain/model.hpp"

namespace qsgain {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Coefficient in mu = kMuCoefficient * (-E~ Sigma J P^# J E~^T). The value is
/// fixed by the truncated-Fock double-commutator oracle in fockcheck.hpp.
inline constexpr double kMuCoefficient = 2.0;

/// Drift F and the input/output maps of the small-gain loop.
struct PlantMatrices {
  CMatrix F;
  CMatrix B;  // 2n x 1
  CMatrix C;  // 1 x 2n
};

inline PlantMatrices compute_F(const QuantumModel& model) {
  const Eigen::Index n = model.n_a();
  const CMatrix j = doubled_j(n);
  const CMatrix jm = doubled_j(model.m_a());
  const CMatrix s = doubled_sigma(n);
  const CMatrix& na = model.N_a();
  PlantMatrices plant;
  plant.F = -kI * j * model.M() - 0.5 * j * na.adjoint() * jm * na;
  plant.B = j * s * model.E_tilde().transpose();
  plant.C = model.E_tilde().conjugate() * s;
  return plant;
}

struct HurwitzResult {
  bool hurwitz = false;
  double abscissa = 0.0;
  CVector eigenvalues;
};

/// Hurwitz iff the spectral abscissa is below -margin_tol.
inline HurwitzResult is_hurwitz(const CMatrix& f, double margin_tol = 1e-9) {
  if (f.rows() != f.cols()) throw DimensionError("is_hurwitz: matrix must be square");
  HurwitzResult r;
  r.eigenvalues = eigenvalues(f);
  r.abscissa = -kInf;
  for (Eigen::Index i = 0; i < r.eigenvalues.size(); ++i)
    r.abscissa = std::max(r.abscissa, r.eigenvalues(i).real());
  r.hurwitz = r.abscissa < -margin_tol;
  return r;
}

/// C (i omega I - A)^{-1} B for a single-input single-output realization.
inline Complex freq_response(const CMatrix& a, const CMatrix& b, const CMatrix& c,
                             double omega) {
  const Eigen::Index n = a.rows();
  const CMatrix resolvent = Complex(0.0, omega) * CMatrix::Identity(n, n) - a;
  Eigen::PartialPivLU<CMatrix> lu(resolvent);
  if (!(lu.rcond() > 1e-14))
    throw NumericError("freqresp", "i*omega is (numerically) a pole, omega = " +
                                       std::to_string(omega));
  return (c * lu.solve(b))(0, 0);
}

inline Complex freq_response(const PlantMatrices& plant, double omega) {
  return freq_response(plant.F, plant.B, plant.C, omega);
}

struct HinfOptions {
  double rel_tol = 1e-10;
  /// Absolute threshold on |Re| for "eigenvalue on the imaginary axis".
  double imag_axis_tol = 1e-8;
  /// Points per sign of the pre-bracketing grid.
  int grid_points = 512;
  double grid_lo = 1e-4;
  double grid_hi = 1e4;
};

namespace detail {

/// Log-spaced frequencies in [lo, hi] mirrored to negative values, plus zero.
inline std::vector<double> symmetric_log_grid(double lo, double hi, int points) {
  std::vector<double> w;
  w.reserve(2 * static_cast<std::size_t>(points) + 1);
  w.push_back(0.0);
  const double llo = std::log10(lo), lhi = std::log10(hi);
  for (int k = 0; k < points; ++k) {
    const double e = points == 1 ? llo : llo + (lhi - llo) * k / (points - 1);
    const double v = std::pow(10.0, e);
    w.push_back(v);
    w.push_back(-v);
  }
  return w;
}

/// Frequencies of Hamiltonian eigenvalues within `tol` of the imaginary axis
/// for level g. Empty means ||H||_inf < g.
inline std::vector<double> imaginary_axis_crossings(const CMatrix& a, const CMatrix& bb,
                                                    const CMatrix& cc, double g, double tol) {
  const Eigen::Index n = a.rows();
  CMatrix h(2 * n, 2 * n);
  h << a, bb / g, -cc / g, -a.adjoint();
  const CVector ev = eigenvalues(h);
  std::vector<double> w;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (std::abs(ev(i).real()) <= tol) w.push_back(ev(i).imag());
  return w;
}

}  // namespace detail

/// ||C (sI - A)^{-1} B||_inf by bisection on the Hamiltonian imaginary-axis
/// test. A must be Hurwitz.
inline double hinf_norm(const CMatrix& a, const CMatrix& b, const CMatrix& c,
                        const HinfOptions& opt = {}) {
  if (a.rows() != a.cols() || b.rows() != a.rows() || c.cols() != a.rows() ||
      b.cols() != 1 || c.rows() != 1)
    throw DimensionError("hinf_norm: expected square A, column B and row C");
  if (spectral_abscissa(a) >= 0.0)
    throw PreconditionError("hinf_norm: drift matrix is not Hurwitz");
  if (max_abs(b) == 0.0 || max_abs(c) == 0.0) return 0.0;

  const double scale = spectral_norm(a);
  double lo = 0.0;
  for (double w : detail::symmetric_log_grid(opt.grid_lo * scale, opt.grid_hi * scale,
                                             opt.grid_points))
    lo = std::max(lo, std::abs(freq_response(a, b, c, w)));
  if (lo == 0.0) return 0.0;

  const CMatrix bb = b * b.adjoint();
  const CMatrix cc = c.adjoint() * c;
  auto crossings = [&](double g) {
    return detail::imaginary_axis_crossings(a, bb, cc, g, opt.imag_axis_tol);
  };

  double hi = 10.0 * lo;
  for (int expand = 0; !crossings(hi).empty(); ++expand) {
    if (expand > 60) throw NumericError("hinf", "could not bracket the norm");
    lo = hi;
    hi *= 10.0;
  }
  for (int iter = 0; hi - lo > opt.rel_tol * hi; ++iter) {
    if (iter > 200) throw NumericError("hinf", "bisection did not converge");
    const double g = 0.5 * (lo + hi);
    const auto w = crossings(g);
    if (w.empty()) {
      hi = g;
      continue;
    }
    lo = g;
    // Evaluating the crossings gives certified lower bounds.
    for (double wk : w) {
      double v = 0.0;
      try {
        v = std::abs(freq_response(a, b, c, wk));
      } catch (const NumericError&) {
        continue;
      }
      lo = std::min(hi, std::max(lo, v));
    }
  }
  return 0.5 * (lo + hi);
}

inline double hinf_norm(const PlantMatrices& plant, const HinfOptions& opt = {}) {
  return hinf_norm(plant.F, plant.B, plant.C, opt);
}

/// How the certificate P was obtained.
enum class QmiMethod {
  kRiccatiProjection,  // structured part of the stabilizing Riccati solution
  kStructuredLmi,      // barrier search over doubled-up Hermitian P
};

inline const char* to_string(QmiMethod m) {
  return m == QmiMethod::kRiccatiProjection ? "riccati-projection" : "structured-lmi";
}

/// Doubled-up Hermitian P > 0 with a strictly negative QMI left side.
struct StructuredP {
  CMatrix P;
  QmiMethod method = QmiMethod::kRiccatiProjection;
  double epsilon = 0.0;  // Riccati slack (LMI slack for kStructuredLmi)
  // ||F^H P + P F + 4 P B B^H P + C^H C/g^2 + eps I||_max of the returned P
  double are_residual = 0.0;
  // same, for the unprojected Riccati solution; NaN when no solve succeeded
  double riccati_residual = std::numeric_limits<double>::quiet_NaN();
  double hermitian_residual = 0.0;  // ||P - P^H||_max
  double structure_residual = 0.0;  // ||Sigma P^# Sigma - P||_max
  double min_eigenvalue = 0.0;
  double qmi_max_eigenvalue = 0.0;  // of the QMI left side without eps
};

/// F^H P + P F + 4 P B B^H P + C^H C / gamma^2 (gamma = inf drops the last term).
inline CMatrix qmi_lhs(const PlantMatrices& plant, double gamma, const CMatrix& p) {
  CMatrix lhs = plant.F.adjoint() * p + p * plant.F +
                4.0 * p * plant.B * plant.B.adjoint() * p;
  if (std::isfinite(gamma)) lhs += plant.C.adjoint() * plant.C / (gamma * gamma);
  return lhs;
}

struct QmiOptions {
  double are_rel_tol = 1e-8;
  double imag_tol = 1e-10;
  bool lmi_fallback = true;
};

namespace detail {

inline CMatrix qmi_constant(const PlantMatrices& plant, double gamma) {
  const Eigen::Index n2 = plant.F.rows();
  if (!std::isfinite(gamma)) return CMatrix::Zero(n2, n2);
  return plant.C.adjoint() * plant.C / (gamma * gamma);
}

/// Fills the residual and eigenvalue fields of a candidate certificate.
inline StructuredP describe(const PlantMatrices& plant, double gamma, CMatrix p,
                            QmiMethod method, double eps) {
  const Eigen::Index n2 = p.rows();
  StructuredP out;
  out.method = method;
  out.epsilon = eps;
  out.P = std::move(p);
  out.hermitian_residual = max_abs(CMatrix(out.P - out.P.adjoint()));
  out.structure_residual = structure_residual(out.P);
  out.min_eigenvalue = min_hermitian_eigenvalue(out.P);
  const CMatrix lhs = qmi_lhs(plant, gamma, out.P);
  out.are_residual = max_abs(CMatrix(lhs + eps * CMatrix::Identity(n2, n2)));
  out.qmi_max_eigenvalue = max_hermitian_eigenvalue(lhs);
  return out;
}

inline bool is_certificate(const StructuredP& s) {
  return s.min_eigenvalue > 0.0 && s.qmi_max_eigenvalue < 0.0;
}

/// Real basis of the doubled-up Hermitian 2n x 2n matrices.
inline std::vector<CMatrix> structured_hermitian_basis(Eigen::Index n) {
  std::vector<CMatrix> basis;
  const CMatrix zero = CMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) {
      CMatrix e = zero;
      e(i, j) = e(j, i) = 1.0;
      basis.push_back(make_doubled(e, zero));
      if (i != j) {
        e(i, j) = kI;
        e(j, i) = -kI;
        basis.push_back(make_doubled(e, zero));
      }
    }
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) {
      CMatrix e = zero;
      e(i, j) = e(j, i) = 1.0;
      basis.push_back(make_doubled(zero, e));
      e(i, j) = e(j, i) = kI;
      basis.push_back(make_doubled(zero, e));
    }
  return basis;
}

/// Coordinates of a doubled-up Hermitian matrix in the basis above.
inline Eigen::VectorXd structured_coordinates(const CMatrix& p, Eigen::Index n) {
  std::vector<double> c;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) {
      c.push_back(p(i, j).real());
      if (i != j) c.push_back(p(i, j).imag());
    }
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) {
      c.push_back(p(i, n + j).real());
      c.push_back(p(i, n + j).imag());
    }
  return Eigen::Map<Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size()));
}

/// Affine Hermitian matrix function A(y) = A0 + sum_k y_k A_k.
struct AffineLmi {
  CMatrix a0;
  std::vector<CMatrix> ak;

  CMatrix at(const Eigen::VectorXd& y) const {
    CMatrix a = a0;
    for (std::size_t k = 0; k < ak.size(); ++k) a += y(static_cast<Eigen::Index>(k)) * ak[k];
    return a;
  }
};

/// -logdet A(y) with gradient and Hessian; false when A(y) is not positive definite.
inline bool barrier_terms(const AffineLmi& lmi, const Eigen::VectorXd& y, double& value,
                          Eigen::VectorXd* grad, Eigen::MatrixXd* hess) {
  const CMatrix a = lmi.at(y);
  Eigen::LLT<CMatrix> llt(a);
  if (llt.info() != Eigen::Success) return false;
  const CMatrix& l = llt.matrixL();
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < l.rows(); ++i) {
    const double d = l(i, i).real();
    if (!(d > 0.0)) return false;
    logdet += 2.0 * std::log(d);
  }
  value -= logdet;
  if (!grad) return true;
  const Eigen::Index m = static_cast<Eigen::Index>(lmi.ak.size());
  std::vector<CMatrix> w(lmi.ak.size());
  for (Eigen::Index k = 0; k < m; ++k) {
    w[k] = llt.solve(lmi.ak[k]);
    (*grad)(k) -= w[k].trace().real();
  }
  for (Eigen::Index k = 0; k < m; ++k)
    for (Eigen::Index j = k; j < m; ++j) {
      const double h = (w[k].cwiseProduct(w[j].transpose())).sum().real();
      (*hess)(k, j) += h;
      if (j != k) (*hess)(j, k) += h;
    }
  return true;
}

/// Maximizes s subject to P - s I >= 0 and -[[F^H P + P F + Q, 2 P B],
/// [2 B^H P, -1]] - s I >= 0 over doubled-up Hermitian P, stopping as soon as
/// a centred point with s > 0 is found. The second constraint is the Schur
/// complement of the QMI, so s > 0 certifies P.
inline std::optional<CMatrix> structured_lmi_search(const PlantMatrices& plant, double gamma,
                                                    const CMatrix& start) {
  const Eigen::Index n2 = plant.F.rows(), n = n2 / 2;
  const auto basis = structured_hermitian_basis(n);
  const Eigen::Index nx = static_cast<Eigen::Index>(basis.size());
  const Eigen::Index m = nx + 1;  // last coordinate is s
  const CMatrix& f = plant.F;
  const CMatrix& b = plant.B;

  AffineLmi qmi, pos;
  qmi.a0 = CMatrix::Zero(n2 + 1, n2 + 1);
  qmi.a0.topLeftCorner(n2, n2) = -qmi_constant(plant, gamma);
  qmi.a0(n2, n2) = 1.0;
  pos.a0 = CMatrix::Zero(n2, n2);
  for (const CMatrix& e : basis) {
    CMatrix g = CMatrix::Zero(n2 + 1, n2 + 1);
    g.topLeftCorner(n2, n2) = -(f.adjoint() * e + e * f);
    g.topRightCorner(n2, 1) = -2.0 * e * b;
    g.bottomLeftCorner(1, n2) = -2.0 * b.adjoint() * e;
    qmi.ak.push_back(std::move(g));
    pos.ak.push_back(e);
  }
  qmi.ak.push_back(-CMatrix::Identity(n2 + 1, n2 + 1));
  pos.ak.push_back(-CMatrix::Identity(n2, n2));

  Eigen::VectorXd y(m);
  y.head(nx) = structured_coordinates(start, n);
  {
    Eigen::VectorXd z = y;
    z(nx) = 0.0;
    const double low =
        std::min(min_hermitian_eigenvalue(qmi.at(z)), min_hermitian_eigenvalue(pos.at(z)));
    y(nx) = low - 0.1 * std::max(std::abs(low), 1e-3 * std::max(1.0, max_abs(start)));
  }

  const double rank = static_cast<double>(2 * n2 + 1);
  auto eval = [&](const Eigen::VectorXd& v, double t, double& val, Eigen::VectorXd* g,
                  Eigen::MatrixXd* h) {
    val = -t * v(nx);
    if (g) {
      g->setZero(m);
      (*g)(nx) = -t;
      h->setZero(m, m);
    }
    return barrier_terms(qmi, v, val, g, h) && barrier_terms(pos, v, val, g, h);
  };

  double t = 1.0 / std::max(1e-300, std::abs(y(nx)));
  for (int outer = 0; outer < 60; ++outer) {
    for (int inner = 0; inner < 100; ++inner) {
      double val = 0.0;
      Eigen::VectorXd g(m);
      Eigen::MatrixXd h(m, m);
      if (!eval(y, t, val, &g, &h)) return std::nullopt;
      const Eigen::VectorXd step = h.ldlt().solve(-g);
      const double dec2 = -g.dot(step);
      if (!std::isfinite(dec2) || dec2 / 2.0 < 1e-10) break;
      double alpha = 1.0;
      for (int ls = 0; ls < 60; ++ls, alpha *= 0.5) {
        double trial = 0.0;
        const Eigen::VectorXd yn = y + alpha * step;
        if (eval(yn, t, trial, nullptr, nullptr) && trial <= val - 0.25 * alpha * dec2) {
          y = yn;
          break;
        }
      }
    }
    if (y(nx) > 0.0) {
      CMatrix p = CMatrix::Zero(n2, n2);
      for (Eigen::Index k = 0; k < nx; ++k) p += y(k) * basis[static_cast<std::size_t>(k)];
      return p;
    }
    // Duality gap rank / t: s cannot become positive once the gap is
    // below roundoff of the current s.
    if (rank / t < 1e-14 * std::max(1.0, std::abs(y(nx)))) break;
    t *= 8.0;
  }
  return std::nullopt;
}

}  // namespace detail

/// Riccati step at fixed eps: the stabilizing solution X of
/// F^H X + X F + 4 X B B^H X + C^H C / gamma^2 + eps I = 0, projected onto the
/// doubled-up Hermitian matrices. Throws InfeasibleEpsilon when the Riccati
/// solve fails or the projection is not a certificate.
inline StructuredP solve_qmi(const PlantMatrices& plant, double gamma, double eps,
                             const QmiOptions& opt = {}) {
  const Eigen::Index n2 = plant.F.rows();
  if (!(gamma > 0.0)) throw PreconditionError("solve_qmi: gamma must be positive");
  if (!(eps > 0.0)) throw PreconditionError("solve_qmi: eps must be positive");
  if (spectral_abscissa(plant.F) >= 0.0)
    throw PreconditionError("solve_qmi: F is not Hurwitz");

  const CMatrix q = detail::qmi_constant(plant, gamma) + eps * CMatrix::Identity(n2, n2);
  const CMatrix r = 4.0 * plant.B * plant.B.adjoint();
  const RiccatiSolution sol = solve_stabilizing_riccati(plant.F, r, q, eps, opt.imag_tol);
  const CMatrix x = hermitian_part(sol.x);
  const double raw = max_abs(CMatrix(plant.F.adjoint() * x + x * plant.F + x * r * x + q));
  const double tol = opt.are_rel_tol * std::max(1.0, max_abs(plant.F));
  if (!(raw <= tol))
    throw InfeasibleEpsilon(eps, "Riccati residual " + std::to_string(raw) + " exceeds tolerance");

  StructuredP out = detail::describe(plant, gamma, symmetrize_structured_hermitian(x),
                                     QmiMethod::kRiccatiProjection, eps);
  out.riccati_residual = raw;
  if (!(out.min_eigenvalue > 0.0))
    throw InfeasibleEpsilon(eps, "projected solution is not positive definite");
  if (!(out.qmi_max_eigenvalue < 0.0))
    throw InfeasibleEpsilon(eps, "QMI left side of the projected solution is not negative");
  return out;
}

struct EpsilonSchedule {
  double start_factor = 1e-2;  // eps_0 = start_factor * ||F||_2
  double floor_factor = 1e-10;
};

/// Halves eps from start_factor * ||F||_2 until the Riccati step yields a
/// certificate. If none does, searches the doubled-up Hermitian matrices
/// directly, starting from the last projected Riccati solution.
inline StructuredP solve_qmi_backtracking(const PlantMatrices& plant, double gamma,
                                          const EpsilonSchedule& sched = {},
                                          const QmiOptions& opt = {}) {
  const Eigen::Index n2 = plant.F.rows();
  const double fn = spectral_norm(plant.F);
  const double floor = sched.floor_factor * fn;
  const CMatrix r = 4.0 * plant.B * plant.B.adjoint();
  std::string last;
  std::optional<CMatrix> seed;
  double seed_residual = std::numeric_limits<double>::quiet_NaN();
  for (double eps = sched.start_factor * fn; eps >= floor; eps *= 0.5) {
    try {
      return solve_qmi(plant, gamma, eps, opt);
    } catch (const InfeasibleEpsilon& e) {
      last = e.what();
      if (seed) continue;
      // Keep the first usable Riccati solution as the LMI starting point.
      try {
        const CMatrix q = detail::qmi_constant(plant, gamma) + eps * CMatrix::Identity(n2, n2);
        const CMatrix x =
            hermitian_part(solve_stabilizing_riccati(plant.F, r, q, eps, opt.imag_tol).x);
        seed = symmetrize_structured_hermitian(x);
        seed_residual = max_abs(CMatrix(plant.F.adjoint() * x + x * plant.F + x * r * x + q));
      } catch (const InfeasibleEpsilon&) {
      }
    }
  }
  if (opt.lmi_fallback) {
    // Without a Riccati solution, start from F^H P + P F = -I.
    const CMatrix start =
        seed ? *seed
             : symmetrize_structured_hermitian(
                   solve_lyapunov(plant.F.adjoint(), CMatrix::Identity(n2, n2)));
    if (auto p = detail::structured_lmi_search(plant, gamma, start)) {
      const CMatrix ps = symmetrize_structured_hermitian(*p);
      const double slack = -max_hermitian_eigenvalue(qmi_lhs(plant, gamma, ps));
      StructuredP out = detail::describe(plant, gamma, ps, QmiMethod::kStructuredLmi, slack);
      out.riccati_residual = seed_residual;
      if (detail::is_certificate(out)) return out;
      last = "structured search returned a non-certificate";
    } else {
      last = "structured search found no certificate";
    }
  }
  throw NumericError("qmi", "no certificate above the epsilon floor (" + last + ")");
}

/// -E~ Sigma J P J E~^T, the single-coefficient closed form of the double
/// commutator without the conjugation of P.
inline Complex mu_unscaled(const CMatrix& p, const CMatrix& e_tilde) {
  const Eigen::Index n = e_tilde.cols() / 2;
  if (p.rows() != 2 * n || p.cols() != 2 * n || e_tilde.rows() != 1)
    throw DimensionError("mu_unscaled: P must be 2n x 2n and E~ 1 x 2n");
  const CMatrix j = doubled_j(n), s = doubled_sigma(n);
  return -(e_tilde * s * j * p * j * e_tilde.transpose())(0, 0);
}

/// mu = [z, [z, V]] for V = x^H P x and z = E~ x.
inline Complex compute_mu(const CMatrix& p, const CMatrix& e_tilde) {
  return kMuCoefficient * mu_unscaled(p.conjugate(), e_tilde);
}

/// tr(P J N_a^H diag(I, 0) N_a J), clamped at zero.
inline double compute_lambda_tilde(const CMatrix& p, const CMatrix& n_a) {
  const Eigen::Index n = p.rows() / 2;
  const Eigen::Index m = n_a.rows() / 2;
  if (p.rows() != p.cols() || n_a.cols() != p.rows() || n_a.rows() % 2 != 0)
    throw DimensionError("compute_lambda_tilde: P is 2n x 2n and N_a is 2m x 2n");
  CMatrix pick = CMatrix::Zero(2 * m, 2 * m);
  pick.topLeftCorner(m, m).setIdentity();
  const CMatrix j = doubled_j(n);
  const Complex tr = (p * j * n_a.adjoint() * pick * n_a * j).trace();
  const double scale = std::max(1.0, max_abs(p) * std::max(1.0, max_abs(n_a) * max_abs(n_a)));
  if (std::abs(tr.imag()) > 1e-10 * scale)
    throw NumericError("lambda", "trace has imaginary part " + std::to_string(tr.imag()));
  if (tr.real() < -1e-10 * scale)
    throw NumericError("lambda", "trace is negative: " + std::to_string(tr.real()));
  return std::max(0.0, tr.real());
}

/// Smallest eigenvalue of minus the QMI left side.
inline double compute_delta0(const PlantMatrices& plant, double gamma, const CMatrix& p) {
  const double d0 = -max_hermitian_eigenvalue(qmi_lhs(plant, gamma, p));
  if (!(d0 > 0.0))
    throw NumericError("delta0", "inconsistent certificate: QMI slack " + std::to_string(d0) +
                                     " is not positive");
  return d0;
}

inline double compute_c_bound(double lambda_tilde, Complex mu, double delta0, double delta1,
                              double delta2) {
  if (!(delta0 > 0.0)) throw PreconditionError("compute_c_bound: delta0 must be positive");
  if (delta1 < 0.0 || delta2 < 0.0)
    throw PreconditionError("compute_c_bound: delta1 and delta2 must be nonnegative");
  return (lambda_tilde + std::norm(mu) / 4.0 + delta1 + delta2) / delta0;
}

enum class Verdict { kCertified, kGainViolated, kNotHurwitz };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::kCertified: return "certified";
    case Verdict::kGainViolated: return "gain-violated";
    case Verdict::kNotHurwitz: return "not-hurwitz";
  }
  return "unknown";
}

struct CertifyOptions {
  double hurwitz_tol = 1e-9;
  HinfOptions hinf;
  EpsilonSchedule epsilon;
  QmiOptions qmi;
};

/// Everything the certificate computes. Optional fields are absent when the
/// pipeline stopped before the stage that produces them.
struct CertificationReport {
  Verdict verdict = Verdict::kNotHurwitz;
  bool hurwitz = false;
  double abscissa = 0.0;
  CVector f_eigenvalues;
  double gamma = kInf;
  double delta1 = 0.0;
  double delta2 = 0.0;
  std::optional<double> hinf;
  std::optional<double> margin;  // gamma/2 - ||H||_inf; +inf when gamma = inf
  std::optional<StructuredP> P;
  std::optional<Complex> mu;
  std::optional<Complex> mu_unscaled;
  std::optional<double> lambda_tilde;
  std::optional<double> delta0;
  std::optional<double> c_bound;
  std::vector<std::string> warnings;
};

/// Runs F -> Hurwitz -> H-inf -> margin -> QMI -> (mu, lambda~, delta0, c).
/// gamma = inf means no gain constraint.
inline CertificationReport certify(const QuantumModel& model, double gamma, double delta1,
                                   double delta2, const CertifyOptions& opt = {}) {
  if (!(gamma > 0.0)) throw PreconditionError("certify: gamma must be positive");
  if (!(delta1 >= 0.0) || !(delta2 >= 0.0))
    throw PreconditionError("certify: delta1 and delta2 must be nonnegative");

  CertificationReport rep;
  rep.gamma = gamma;
  rep.delta1 = delta1;
  rep.delta2 = delta2;

  const PlantMatrices plant = compute_F(model);
  const HurwitzResult hur = is_hurwitz(plant.F, opt.hurwitz_tol);
  rep.hurwitz = hur.hurwitz;
  rep.abscissa = hur.abscissa;
  rep.f_eigenvalues = hur.eigenvalues;
  if (!hur.hurwitz) {
    rep.verdict = Verdict::kNotHurwitz;
    return rep;
  }

  rep.hinf = hinf_norm(plant, opt.hinf);
  rep.margin = std::isfinite(gamma) ? gamma / 2.0 - *rep.hinf : kInf;
  if (!(*rep.margin > 0.0)) {
    rep.verdict = Verdict::kGainViolated;
    return rep;
  }

  rep.P = solve_qmi_backtracking(plant, gamma, opt.epsilon, opt.qmi);
  if (rep.P->method == QmiMethod::kStructuredLmi)
    rep.warnings.push_back("projected Riccati solutions were not certificates; P is from the "
                           "structured search");
  const CMatrix& p = rep.P->P;
  rep.mu = compute_mu(p, model.E_tilde());
  rep.mu_unscaled = qsgain::mu_unscaled(p, model.E_tilde());
  rep.lambda_tilde = compute_lambda_tilde(p, model.N_a());
  rep.delta0 = compute_delta0(plant, gamma, p);
  rep.c_bound = compute_c_bound(*rep.lambda_tilde, *rep.mu, *rep.delta0, delta1, delta2);
  rep.verdict = Verdict::kCertified;
  return rep;
}

}  // namespace qsgain
