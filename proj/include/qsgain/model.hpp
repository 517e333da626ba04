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

// Nominal linear quantum plant in the doubled-up representation.
//
// Mode vectors are stacked as x = [a; a^#]. Quadratic Hamiltonians, linear
// couplings and Lyapunov weights then become matrices X with the block
// pattern [[X1, X2], [X2^#, X1^#]], equivalently Sigma X^# Sigma = X.

#pragma once

#include <cmath>
#include <sstream>
#include <string>

#include "qsgain/error.hpp"
#include "qsgain/linalg.hpp"

namespace qsgain {

/// Relative tolerance of every structural check on user-supplied matrices.
inline constexpr double kStructureRelTol = 1e-12;

/// Commutation matrix J = diag(I, -I) and swap matrix Sigma = [[0, I], [I, 0]].
struct Constants {
  Eigen::Index n = 0;
  CMatrix J;
  CMatrix Sigma;
};

inline CMatrix doubled_j(Eigen::Index n) {
  CMatrix j = CMatrix::Zero(2 * n, 2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    j(i, i) = 1.0;
    j(n + i, n + i) = -1.0;
  }
  return j;
}

inline CMatrix doubled_sigma(Eigen::Index n) {
  CMatrix s = CMatrix::Zero(2 * n, 2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    s(i, n + i) = 1.0;
    s(n + i, i) = 1.0;
  }
  return s;
}

inline Constants constants(Eigen::Index n) {
  if (n < 1) throw DimensionError("constants: mode count must be >= 1, got " + std::to_string(n));
  return {n, doubled_j(n), doubled_sigma(n)};
}

/// Assembles [[X1, X2], [X2^#, X1^#]].
inline CMatrix make_doubled(const CMatrix& x1, const CMatrix& x2) {
  if (x1.rows() != x2.rows() || x1.cols() != x2.cols())
    throw DimensionError("make_doubled: blocks differ in shape");
  CMatrix x(2 * x1.rows(), 2 * x1.cols());
  x << x1, x2, x2.conjugate(), x1.conjugate();
  return x;
}

/// Sigma_rows X^# Sigma_cols - X for an even-by-even (possibly rectangular) X.
inline CMatrix structure_defect(const CMatrix& x) {
  if (x.rows() % 2 != 0 || x.cols() % 2 != 0)
    throw DimensionError("structure_defect: matrix dimensions must be even");
  return doubled_sigma(x.rows() / 2) * x.conjugate() * doubled_sigma(x.cols() / 2) - x;
}

/// Max-entry magnitude of Sigma X^# Sigma - X; zero iff X is doubled-up.
inline double structure_residual(const CMatrix& x) { return max_abs(structure_defect(x)); }

inline double structure_residual(const CMatrix& x, Eigen::Index n) {
  if (x.rows() != 2 * n || x.cols() != 2 * n)
    throw DimensionError("structure_residual: expected " + std::to_string(2 * n) + "x" +
                         std::to_string(2 * n) + ", got " + std::to_string(x.rows()) +
                         "x" + std::to_string(x.cols()));
  return structure_residual(x);
}

/// Projects onto the doubled-up Hermitian matrices: (X + X^H)/2 then
/// (X + Sigma X^# Sigma)/2.
inline CMatrix symmetrize_structured_hermitian(const CMatrix& x) {
  const Eigen::Index n = x.rows() / 2;
  const CMatrix s = doubled_sigma(n);
  CMatrix h = hermitian_part(x);
  return 0.5 * (h + s * h.conjugate() * s);
}

/// Unvalidated matrices as read from a file or built by hand.
struct RawModel {
  Eigen::Index n_a = 0;
  Eigen::Index n_b = 0;
  CMatrix M;
  CMatrix N_a;
  CMatrix N_b;
  CMatrix E_tilde;
};

/// Validated nominal plant plus uncertainty channel. Only `validate_model`
/// constructs one, so every instance satisfies the structural invariants.
class QuantumModel {
 public:
  Eigen::Index n_a() const noexcept { return n_a_; }
  Eigen::Index n_b() const noexcept { return n_b_; }
  /// Number of plant output channels (rows of L_a).
  Eigen::Index m_a() const noexcept { return N_a_.rows() / 2; }
  Eigen::Index m_b() const noexcept { return N_b_.rows() / 2; }

  const CMatrix& M() const noexcept { return M_; }
  const CMatrix& N_a() const noexcept { return N_a_; }
  const CMatrix& N_b() const noexcept { return N_b_; }
  const CMatrix& E_tilde() const noexcept { return E_tilde_; }

  CMatrix N_a1() const { return N_a_.topLeftCorner(m_a(), n_a_); }
  CMatrix N_a2() const { return N_a_.topRightCorner(m_a(), n_a_); }

  RawModel raw() const { return {n_a_, n_b_, M_, N_a_, N_b_, E_tilde_}; }

 private:
  friend QuantumModel validate_model(RawModel raw);
  QuantumModel() = default;

  Eigen::Index n_a_ = 0;
  Eigen::Index n_b_ = 0;
  CMatrix M_;
  CMatrix N_a_;
  CMatrix N_b_;
  CMatrix E_tilde_;
};

namespace detail {

inline std::string fmt_shape(const CMatrix& x) {
  return std::to_string(x.rows()) + "x" + std::to_string(x.cols());
}

inline void check_shape(const char* field, const CMatrix& x, Eigen::Index rows,
                        Eigen::Index cols) {
  if (x.rows() == rows && x.cols() == cols) return;
  throw ModelError(Violation::kDimension, field, -1, -1, 0.0,
                   std::string(field) + ": dimension mismatch, expected " +
                       std::to_string(rows) + "x" + std::to_string(cols) + ", got " +
                       fmt_shape(x));
}

inline void check_finite(const char* field, const CMatrix& x) {
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const Complex v = x(i, j);
      if (std::isfinite(v.real()) && std::isfinite(v.imag())) continue;
      throw ModelError(Violation::kNonFinite, field, i, j, std::abs(v),
                       std::string(field) + ": non-finite entry at (" + std::to_string(i) +
                           "," + std::to_string(j) + ")");
    }
}

/// Throws when max |defect| exceeds kStructureRelTol * max |x|.
inline void check_defect(const char* field, Violation violation, const char* invariant,
                         const CMatrix& x, const CMatrix& defect) {
  Eigen::Index wi = 0, wj = 0;
  const double worst = defect.size() ? defect.cwiseAbs().maxCoeff(&wi, &wj) : 0.0;
  const double tol = kStructureRelTol * max_abs(x);
  if (worst <= tol) return;
  std::ostringstream os;
  os.precision(6);
  os << field << ": violates " << invariant << "; worst entry (" << wi << "," << wj
     << ") off by " << worst << " (tolerance " << tol << ")";
  throw ModelError(violation, field, wi, wj, worst, os.str());
}

}  // namespace detail

/// Checks dimensions, finiteness, Hermiticity of M and the doubled-up block
/// pattern of M, N_a, N_b. The first violation found is thrown as ModelError.
inline QuantumModel validate_model(RawModel raw) {
  using detail::check_shape;
  if (raw.n_a < 1)
    throw ModelError(Violation::kDimension, "n_a", -1, -1, 0.0, "n_a: must be >= 1");
  if (raw.n_b < 1)
    throw ModelError(Violation::kDimension, "n_b", -1, -1, 0.0, "n_b: must be >= 1");
  const Eigen::Index na2 = 2 * raw.n_a;
  const Eigen::Index nb2 = 2 * raw.n_b;

  check_shape("M", raw.M, na2, na2);
  if (raw.N_a.rows() < 2 || raw.N_a.rows() % 2 != 0)
    throw ModelError(Violation::kDimension, "N_a", -1, -1, 0.0,
                     "N_a: row count must be even and >= 2, got " + detail::fmt_shape(raw.N_a));
  check_shape("N_a", raw.N_a, raw.N_a.rows(), na2);
  if (raw.N_b.rows() < 2 || raw.N_b.rows() % 2 != 0)
    throw ModelError(Violation::kDimension, "N_b", -1, -1, 0.0,
                     "N_b: row count must be even and >= 2, got " + detail::fmt_shape(raw.N_b));
  check_shape("N_b", raw.N_b, raw.N_b.rows(), nb2);
  check_shape("E_tilde", raw.E_tilde, 1, na2);

  detail::check_finite("M", raw.M);
  detail::check_finite("N_a", raw.N_a);
  detail::check_finite("N_b", raw.N_b);
  detail::check_finite("E_tilde", raw.E_tilde);

  detail::check_defect("M", Violation::kNotHermitian, "M = M^H", raw.M,
                       CMatrix(raw.M.adjoint()) - raw.M);
  detail::check_defect("M", Violation::kBrokenStructure, "Sigma M^# Sigma = M", raw.M,
                       structure_defect(raw.M));
  detail::check_defect("N_a", Violation::kBrokenStructure, "Sigma N_a^# Sigma = N_a", raw.N_a,
                       structure_defect(raw.N_a));
  detail::check_defect("N_b", Violation::kBrokenStructure, "Sigma N_b^# Sigma = N_b", raw.N_b,
                       structure_defect(raw.N_b));

  QuantumModel model;
  model.n_a_ = raw.n_a;
  model.n_b_ = raw.n_b;
  model.M_ = std::move(raw.M);
  model.N_a_ = std::move(raw.N_a);
  model.N_b_ = std::move(raw.N_b);
  model.E_tilde_ = std::move(raw.E_tilde);
  return model;
}

}  // namespace qsgain
