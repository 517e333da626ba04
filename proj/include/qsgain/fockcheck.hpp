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

// Brute-force verification of the operator identities behind the certificate
// on a truncated Fock space.
//
// Ladder matrices truncated at N levels are exact on every basis state whose
// path under a word of d ladder operators stays below level N. Comparing
// operator identities of degree d on the states with occupation < N - d
// therefore checks them up to rounding only.

#pragma once

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "qsgain/error.hpp"
#include "qsgain/linalg.hpp"
#include "qsgain/model.hpp"
#include "qsgain/random.hpp"
#include "qsgain/smallgain.hpp"

namespace qsgain {

using SparseOp = Eigen::SparseMatrix<Complex>;

/// Matrix of a mode operator on the truncated space. `dim` is the per-mode
/// truncation level N; the matrix is N x N or N^2 x N^2 (ordering a (x) b).
struct TruncatedOperator {
  Eigen::Index dim = 0;
  SparseOp matrix;

  TruncatedOperator adjoint() const { return {dim, SparseOp(matrix.adjoint())}; }
};

struct ModeOps {
  Eigen::Index dim = 0;
  int n_modes = 0;
  std::vector<TruncatedOperator> annihilation;
  std::vector<TruncatedOperator> creation;
  SparseOp identity;
};

inline ModeOps build_mode_ops(int n_modes, Eigen::Index dim) {
  if (n_modes != 1 && n_modes != 2)
    throw DimensionError("build_mode_ops: n_modes must be 1 or 2");
  if (dim < 4) throw DimensionError("build_mode_ops: truncation level must be >= 4");
  const Eigen::Index total = n_modes == 1 ? dim : dim * dim;
  ModeOps ops;
  ops.dim = dim;
  ops.n_modes = n_modes;
  ops.identity = SparseOp(total, total);
  ops.identity.setIdentity();
  for (int mode = 0; mode < n_modes; ++mode) {
    std::vector<Eigen::Triplet<Complex>> trip;
    // a|k> = sqrt(k)|k-1>, tensored with the identity on the other mode.
    for (Eigen::Index s = 0; s < total; ++s) {
      const Eigen::Index occ = n_modes == 1 ? s : (mode == 0 ? s / dim : s % dim);
      if (occ == 0) continue;
      const Eigen::Index target = n_modes == 1 ? s - 1 : (mode == 0 ? s - dim : s - 1);
      trip.emplace_back(target, s, std::sqrt(static_cast<double>(occ)));
    }
    SparseOp a(total, total);
    a.setFromTriplets(trip.begin(), trip.end());
    ops.annihilation.push_back({dim, a});
    ops.creation.push_back({dim, SparseOp(a.adjoint())});
  }
  return ops;
}

namespace fock {

inline SparseOp comm(const SparseOp& x, const SparseOp& y) {
  return SparseOp(x * y - y * x);
}

inline SparseOp adj(const SparseOp& x) { return SparseOp(x.adjoint()); }

/// x = [a; a^*] of one mode.
inline std::vector<SparseOp> doubled_vector(const ModeOps& ops, int mode) {
  return {ops.annihilation[mode].matrix, ops.creation[mode].matrix};
}

/// sum_i e_i x_i
inline SparseOp linear_form(const CMatrix& row, const std::vector<SparseOp>& x) {
  SparseOp out(x[0].rows(), x[0].cols());
  for (std::size_t i = 0; i < x.size(); ++i) out += row(0, static_cast<Eigen::Index>(i)) * x[i];
  return out;
}

/// x^H Q x = sum_ij Q_ij x_i^* x_j
inline SparseOp quad_form(const CMatrix& q, const std::vector<SparseOp>& x) {
  SparseOp out(x[0].rows(), x[0].cols());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const SparseOp xi_adj = adj(x[i]);
    for (std::size_t j = 0; j < x.size(); ++j) {
      const Complex c = q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (c != Complex(0.0, 0.0)) out += c * SparseOp(xi_adj * x[j]);
    }
  }
  return out;
}

inline SparseOp power(const SparseOp& x, int k, const SparseOp& identity) {
  SparseOp out = identity;
  for (int i = 0; i < k; ++i) out = SparseOp(out * x);
  return out;
}

/// Basis states kept by the comparison: occupations below N - drop per mode.
struct LowLying {
  std::vector<char> keep;

  LowLying(const ModeOps& ops, Eigen::Index drop_a, Eigen::Index drop_b = 0) {
    const Eigen::Index n = ops.dim;
    const Eigen::Index total = ops.n_modes == 1 ? n : n * n;
    keep.assign(static_cast<std::size_t>(total), 0);
    for (Eigen::Index s = 0; s < total; ++s) {
      const Eigen::Index oa = ops.n_modes == 1 ? s : s / n;
      const Eigen::Index ob = ops.n_modes == 1 ? 0 : s % n;
      keep[static_cast<std::size_t>(s)] = (oa < n - drop_a) && (ob < n - drop_b);
    }
  }

  bool operator()(Eigen::Index i, Eigen::Index j) const {
    return keep[static_cast<std::size_t>(i)] && keep[static_cast<std::size_t>(j)];
  }
};

inline double max_on(const SparseOp& x, const LowLying& low) {
  double best = 0.0;
  for (Eigen::Index k = 0; k < x.outerSize(); ++k)
    for (SparseOp::InnerIterator it(x, k); it; ++it)
      if (low(it.row(), it.col())) best = std::max(best, std::abs(it.value()));
  return best;
}

}  // namespace fock

/// Residual of `lhs = rhs` on the low-lying block, with the scale it should be
/// compared against (max entry of either side, at least 1).
struct IdentityResidual {
  double residual = 0.0;
  double scale = 1.0;

  bool passes(double rel_tol) const { return residual <= rel_tol * scale; }
  double relative() const { return residual / scale; }
};

inline IdentityResidual compare_on(const SparseOp& lhs, const SparseOp& rhs,
                                   const fock::LowLying& low) {
  IdentityResidual r;
  r.residual = fock::max_on(SparseOp(lhs - rhs), low);
  r.scale = std::max({1.0, fock::max_on(lhs, low), fock::max_on(rhs, low)});
  return r;
}

namespace detail {

inline void require_structured_hermitian(const CMatrix& p, const char* who) {
  if (p.rows() != p.cols() || p.rows() % 2 != 0)
    throw DimensionError(std::string(who) + ": P must be 2n x 2n");
  const double tol = 1e-10 * std::max(1.0, max_abs(p));
  if (max_abs(CMatrix(p - p.adjoint())) > tol || structure_residual(p) > tol)
    throw PreconditionError(std::string(who) + ": P is not a doubled-up Hermitian matrix");
}

}  // namespace detail

struct MuCheck {
  Complex fock;      // scalar c with [z, [z, V]] = c I on the low-lying block
  Complex formula;   // compute_mu(P, E~)
  Complex unscaled;  // -E~ Sigma J P J E~^T
  IdentityResidual scalar_residual;  // off-scalar part of the double commutator
};

/// Double commutator [z, [z, V]] for V = x^H P x, z = E~ x, one mode.
inline MuCheck check_mu_identity(const CMatrix& p, const CMatrix& e_tilde, Eigen::Index dim) {
  detail::require_structured_hermitian(p, "check_mu_identity");
  if (p.rows() != 2 || e_tilde.rows() != 1 || e_tilde.cols() != 2)
    throw DimensionError("check_mu_identity: single plant mode only (P 2x2, E~ 1x2)");
  if (dim < 10) throw DimensionError("check_mu_identity: truncation level must be >= 10");

  const ModeOps ops = build_mode_ops(1, dim);
  const auto x = fock::doubled_vector(ops, 0);
  const SparseOp v = fock::quad_form(p, x);
  const SparseOp z = fock::linear_form(e_tilde, x);
  const SparseOp dc = fock::comm(z, fock::comm(z, v));
  const fock::LowLying low(ops, 4);

  MuCheck out;
  out.fock = dc.coeff(0, 0);
  out.scalar_residual = compare_on(dc, SparseOp(out.fock * ops.identity), low);
  out.formula = compute_mu(p, e_tilde);
  out.unscaled = mu_unscaled(p, e_tilde);
  return out;
}

struct MuArbitration {
  int trials = 0;
  Complex coefficient;          // least-squares fit of fock = k * (-E~ Sigma J P^# J E~^T)
  double max_deviation = 0.0;   // max |fock - kMuCoefficient * base| / scale
  double max_unconjugated_deviation = 0.0;  // same with P in place of P^#
  double max_scalar_residual = 0.0;
};

/// Fits the coefficient of the mu closed form against the brute-force double
/// commutator over seeded random P and E~.
inline MuArbitration arbitrate_mu_coefficient(int trials, std::uint64_t seed,
                                              Eigen::Index dim = 30) {
  Rng rng(seed);
  MuArbitration out;
  out.trials = trials;
  std::vector<Complex> fock_vals, bases, unconj;
  std::vector<double> scales;
  for (int t = 0; t < trials; ++t) {
    const CMatrix p = random_structured_pd(1, rng);
    const CMatrix e = random_centered(1, 2, rng);
    const MuCheck c = check_mu_identity(p, e, dim);
    fock_vals.push_back(c.fock);
    bases.push_back(mu_unscaled(p.conjugate(), e));
    unconj.push_back(c.unscaled);
    scales.push_back(std::max(1.0, max_abs(p) * max_abs(e) * max_abs(e)));
    out.max_scalar_residual = std::max(out.max_scalar_residual, c.scalar_residual.relative());
  }
  Complex num(0.0, 0.0);
  double den = 0.0;
  for (std::size_t i = 0; i < bases.size(); ++i) {
    num += std::conj(bases[i]) * fock_vals[i];
    den += std::norm(bases[i]);
  }
  out.coefficient = den > 0.0 ? num / den : Complex(0.0, 0.0);
  for (std::size_t i = 0; i < bases.size(); ++i) {
    out.max_deviation = std::max(
        out.max_deviation, std::abs(fock_vals[i] - kMuCoefficient * bases[i]) / scales[i]);
    out.max_unconjugated_deviation =
        std::max(out.max_unconjugated_deviation,
                 std::abs(fock_vals[i] - kMuCoefficient * unconj[i]) / scales[i]);
  }
  return out;
}

struct LemmaL2Report {
  IdentityResidual hamiltonian;   // [V, x^H M x / 2] = x^H (P J M - M J P) x
  IdentityResidual dissipation;   // L_a^H [V, L_a]/2 + [L_a^H, V] L_a/2 = trace - ...
  IdentityResidual commutator;    // [x, x^H P x] = 2 J P x, worst component

  bool passes(double rel_tol) const {
    return hamiltonian.passes(rel_tol) && dissipation.passes(rel_tol) &&
           commutator.passes(rel_tol);
  }
};

/// The three quadratic-form identities used by the dissipation inequality,
/// for one plant mode and any number of output channels m (N_a is 2m x 2).
inline LemmaL2Report check_lemma_l2(const CMatrix& p, const CMatrix& m, const CMatrix& n_a,
                                    Eigen::Index dim) {
  detail::require_structured_hermitian(p, "check_lemma_l2");
  if (p.rows() != 2 || m.rows() != 2 || m.cols() != 2 || n_a.cols() != 2 ||
      n_a.rows() % 2 != 0 || n_a.rows() < 2)
    throw DimensionError("check_lemma_l2: single plant mode only (P, M 2x2; N_a 2m x 2)");
  if (max_abs(CMatrix(m - m.adjoint())) > 1e-10 * std::max(1.0, max_abs(m)) ||
      structure_residual(m) > 1e-10 * std::max(1.0, max_abs(m)))
    throw PreconditionError("check_lemma_l2: M is not a doubled-up Hermitian matrix");
  if (structure_residual(n_a) > 1e-10 * std::max(1.0, max_abs(n_a)))
    throw PreconditionError("check_lemma_l2: N_a is not doubled-up");
  if (dim < 20) throw DimensionError("check_lemma_l2: truncation level must be >= 20");

  const ModeOps ops = build_mode_ops(1, dim);
  const auto x = fock::doubled_vector(ops, 0);
  const fock::LowLying low(ops, 4);
  const CMatrix j = doubled_j(1);
  const Eigen::Index nch = n_a.rows() / 2;
  const CMatrix jm = doubled_j(nch);
  const SparseOp v = fock::quad_form(p, x);

  LemmaL2Report rep;
  {
    const SparseOp lhs = fock::comm(v, SparseOp(0.5 * fock::quad_form(m, x)));
    const SparseOp rhs = fock::quad_form(CMatrix(p * j * m - m * j * p), x);
    rep.hamiltonian = compare_on(lhs, rhs, low);
  }
  {
    SparseOp lhs(ops.identity.rows(), ops.identity.cols());
    for (Eigen::Index i = 0; i < nch; ++i) {
      const SparseOp li = fock::linear_form(CMatrix(n_a.row(i)), x);
      const SparseOp li_adj = fock::adj(li);
      lhs += 0.5 * SparseOp(li_adj * fock::comm(v, li));
      lhs += 0.5 * SparseOp(fock::comm(li_adj, v) * li);
    }
    CMatrix pick = CMatrix::Zero(2 * nch, 2 * nch);
    pick.topLeftCorner(nch, nch).setIdentity();
    const Complex trace = (p * j * n_a.adjoint() * pick * n_a * j).trace();
    const CMatrix q = n_a.adjoint() * jm * n_a * j * p + p * j * n_a.adjoint() * jm * n_a;
    const SparseOp rhs = SparseOp(trace * ops.identity) - 0.5 * fock::quad_form(q, x);
    rep.dissipation = compare_on(lhs, rhs, low);
  }
  {
    const CMatrix jp2 = 2.0 * j * p;
    for (Eigen::Index i = 0; i < 2; ++i) {
      const SparseOp lhs = fock::comm(x[static_cast<std::size_t>(i)], v);
      const SparseOp rhs = fock::linear_form(CMatrix(jp2.row(i)), x);
      const IdentityResidual r = compare_on(lhs, rhs, low);
      if (i == 0 || r.relative() > rep.commutator.relative()) rep.commutator = r;
    }
  }
  return rep;
}

/// Uncertainty-mode coefficient S(b, b^#) of a perturbation monomial.
enum class CoeffShape { kIdentity, kB, kBDag, kBDagB };

inline const char* to_string(CoeffShape s) {
  switch (s) {
    case CoeffShape::kIdentity: return "I";
    case CoeffShape::kB: return "b";
    case CoeffShape::kBDag: return "b^*";
    case CoeffShape::kBDagB: return "b^*b";
  }
  return "?";
}

inline int degree(CoeffShape s) {
  switch (s) {
    case CoeffShape::kIdentity: return 0;
    case CoeffShape::kB:
    case CoeffShape::kBDag: return 1;
    case CoeffShape::kBDagB: return 2;
  }
  return 0;
}

struct GeneratorReport {
  int k = 0;
  int l = 0;
  CoeffShape shape = CoeffShape::kIdentity;
  /// [V, f] = [V,z] w1^* - w1 [z^*,V] + nu w2^*/2 - w2 nu^*/2 with
  /// nu = [z, [V, z]] = -mu.
  IdentityResidual residual;
  /// Same right-hand side with +mu in place of nu.
  IdentityResidual residual_plus_mu;
};

/// Checks the generator decomposition for the self-adjoint perturbation
/// f = S z^k (z^*)^l + h.c. on two modes (plant a, uncertainty b).
inline GeneratorReport check_generator_decomposition(int k, int l, CoeffShape shape,
                                                     const CMatrix& p, const CMatrix& e_tilde,
                                                     Eigen::Index dim) {
  if (k < 0 || l < 0 || k + l > 3)
    throw PreconditionError("check_generator_decomposition: unsupported monomial degree k+l > 3");
  detail::require_structured_hermitian(p, "check_generator_decomposition");
  if (p.rows() != 2 || e_tilde.rows() != 1 || e_tilde.cols() != 2)
    throw DimensionError("check_generator_decomposition: single plant mode only");
  if (dim < 16 || dim * dim > 1600)
    throw DimensionError("check_generator_decomposition: truncation level must be in [16, 40]");

  const ModeOps ops = build_mode_ops(2, dim);
  const SparseOp& id = ops.identity;
  const auto x = fock::doubled_vector(ops, 0);
  const SparseOp& b = ops.annihilation[1].matrix;
  const SparseOp& bd = ops.creation[1].matrix;
  SparseOp s;
  switch (shape) {
    case CoeffShape::kIdentity: s = id; break;
    case CoeffShape::kB: s = b; break;
    case CoeffShape::kBDag: s = bd; break;
    case CoeffShape::kBDagB: s = SparseOp(bd * b); break;
  }
  const SparseOp sd = fock::adj(s);

  const SparseOp v = fock::quad_form(p, x);
  const SparseOp z = fock::linear_form(e_tilde, x);
  const SparseOp zs = fock::adj(z);
  auto zp = [&](int e) { return fock::power(z, std::max(e, 0), id); };
  auto zsp = [&](int e) { return fock::power(zs, std::max(e, 0), id); };

  const SparseOp f = SparseOp(s * zp(k) * zsp(l)) + SparseOp(sd * zp(l) * zsp(k));
  // Formal z-derivatives of f; w1 = (df/dz)^*, w2 = (d2f/dz2)^*.
  SparseOp w1s(id.rows(), id.cols()), w2s(id.rows(), id.cols());
  if (k >= 1) w1s += static_cast<double>(k) * SparseOp(s * zp(k - 1) * zsp(l));
  if (l >= 1) w1s += static_cast<double>(l) * SparseOp(sd * zp(l - 1) * zsp(k));
  if (k >= 2) w2s += static_cast<double>(k * (k - 1)) * SparseOp(s * zp(k - 2) * zsp(l));
  if (l >= 2) w2s += static_cast<double>(l * (l - 1)) * SparseOp(sd * zp(l - 2) * zsp(k));
  const SparseOp w1 = fock::adj(w1s);
  const SparseOp w2 = fock::adj(w2s);

  const Complex mu = compute_mu(p, e_tilde);
  const SparseOp lhs = fock::comm(v, f);
  const SparseOp base = SparseOp(fock::comm(v, z) * w1s) - SparseOp(w1 * fock::comm(zs, v));
  auto rhs_with = [&](Complex c) {
    return SparseOp(base + 0.5 * c * w2s - 0.5 * std::conj(c) * w2);
  };

  const fock::LowLying low(ops, 2 + k + l, degree(shape));
  GeneratorReport rep;
  rep.k = k;
  rep.l = l;
  rep.shape = shape;
  rep.residual = compare_on(lhs, rhs_with(-mu), low);
  rep.residual_plus_mu = compare_on(lhs, rhs_with(mu), low);
  return rep;
}

/// [a, a^*] = I on the first N-1 states, and mode operators of different
/// modes commute.
struct CcrReport {
  double single_mode = 0.0;
  double cross_mode = 0.0;
};

inline CcrReport check_ccr(Eigen::Index dim) {
  CcrReport r;
  const ModeOps one = build_mode_ops(1, dim);
  const SparseOp c = fock::comm(one.annihilation[0].matrix, one.creation[0].matrix);
  r.single_mode = fock::max_on(SparseOp(c - one.identity), fock::LowLying(one, 1));
  const Eigen::Index dim2 = std::min<Eigen::Index>(dim, 40);
  const ModeOps two = build_mode_ops(2, dim2);
  const auto& a = two.annihilation[0].matrix;
  const auto& ad = two.creation[0].matrix;
  const auto& b = two.annihilation[1].matrix;
  const auto& bd = two.creation[1].matrix;
  const fock::LowLying all(two, 0, 0);
  for (const SparseOp& cm : {fock::comm(a, b), fock::comm(a, bd), fock::comm(ad, b),
                             fock::comm(ad, bd)})
    r.cross_mode = std::max(r.cross_mode, fock::max_on(cm, all));
  return r;
}

/// One row of the oracle suite.
struct FockCheckRow {
  std::string name;
  double worst = 0.0;  // worst relative residual
  double tolerance = 0.0;
  bool pass = false;
};

/// CCR, mu identity + arbitration, the quadratic-form identities and the
/// generator decomposition for every monomial with k + l <= 3 and every
/// coefficient shape.
inline std::vector<FockCheckRow> run_fock_suite(Eigen::Index dim, std::uint64_t seed, int trials) {
  if (dim < 20) throw DimensionError("fockcheck: --dim must be >= 20");
  if (trials < 1) throw PreconditionError("fockcheck: --trials must be >= 1");
  std::vector<FockCheckRow> rows;
  auto add = [&](std::string name, double worst, double tol) {
    rows.push_back({std::move(name), worst, tol, worst <= tol});
  };

  const CcrReport ccr = check_ccr(dim);
  add("ccr_single_mode", ccr.single_mode, 1e-12);
  add("ccr_cross_mode", ccr.cross_mode, 0.0);

  Rng rng(seed);
  const MuArbitration arb = arbitrate_mu_coefficient(trials, rng(), dim);
  add("mu_double_commutator_scalar", arb.max_scalar_residual, 1e-8);
  add("mu_coefficient", arb.max_deviation, 1e-8);

  double l2_ham = 0.0, l2_diss = 0.0, l2_comm = 0.0;
  for (int t = 0; t < trials; ++t) {
    const CMatrix p = random_structured_pd(1, rng);
    const CMatrix m = random_structured_hermitian(1, rng);
    const CMatrix n_a = t % 2 == 0 ? CMatrix(std::sqrt(2.0) * CMatrix::Identity(2, 2))
                                   : random_structured_coupling(1 + t % 3, 1, rng);
    const LemmaL2Report r = check_lemma_l2(p, m, n_a, dim);
    l2_ham = std::max(l2_ham, r.hamiltonian.relative());
    l2_diss = std::max(l2_diss, r.dissipation.relative());
    l2_comm = std::max(l2_comm, r.commutator.relative());
  }
  add("quadratic_hamiltonian_commutator", l2_ham, 1e-8);
  add("coupling_dissipation", l2_diss, 1e-8);
  add("mode_commutator_2JPx", l2_comm, 1e-8);

  const Eigen::Index dim2 = std::clamp<Eigen::Index>(dim, 16, 40);
  double gen = 0.0;
  const CoeffShape shapes[] = {CoeffShape::kIdentity, CoeffShape::kB, CoeffShape::kBDag,
                               CoeffShape::kBDagB};
  for (int k = 0; k <= 3; ++k)
    for (int l = 0; k + l <= 3; ++l)
      for (CoeffShape s : shapes) {
        const CMatrix p = random_structured_pd(1, rng);
        const CMatrix e = random_centered(1, 2, rng);
        gen = std::max(gen, check_generator_decomposition(k, l, s, p, e, dim2).residual.relative());
      }
  add("generator_decomposition", gen, 1e-7);
  return rows;
}

}  // namespace qsgain
