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

// Dense complex kernels shared by the certification pipeline: ordered complex
// Schur forms, Lyapunov and Riccati solvers, spectral helpers.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include "qsgain/error.hpp"

namespace qsgain {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr Complex kI{0.0, 1.0};

template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& x) {
  if (x.size() == 0) return 0.0;
  return x.cwiseAbs().maxCoeff();
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& x) {
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const Complex v = x(i, j);
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    }
  return true;
}

inline CMatrix hermitian_part(const CMatrix& x) {
  return 0.5 * (x + x.adjoint());
}

inline CVector eigenvalues(const CMatrix& a) {
  if (a.rows() == 0) return CVector();
  Eigen::ComplexEigenSolver<CMatrix> solver(a, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success)
    throw NumericError("eigen", "eigenvalue iteration did not converge");
  return solver.eigenvalues();
}

/// Largest real part over the spectrum of `a`.
inline double spectral_abscissa(const CMatrix& a) {
  const CVector ev = eigenvalues(a);
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < ev.size(); ++i) best = std::max(best, ev(i).real());
  return best;
}

inline double spectral_norm(const CMatrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(a);
  return svd.singularValues()(0);
}

/// Smallest eigenvalue of the Hermitian part of `a`.
inline double min_hermitian_eigenvalue(const CMatrix& a) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian_part(a),
                                                Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

inline double max_hermitian_eigenvalue(const CMatrix& a) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian_part(a),
                                                Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(solver.eigenvalues().size() - 1);
}

/// Complex Schur form A = U T U^H whose diagonal can be reordered.
class OrderedSchur {
 public:
  explicit OrderedSchur(const CMatrix& a) {
    Eigen::ComplexSchur<CMatrix> schur(a);
    if (schur.info() != Eigen::Success)
      throw NumericError("schur", "QR iteration did not converge");
    t_ = schur.matrixT();
    u_ = schur.matrixU();
  }

  const CMatrix& t() const noexcept { return t_; }
  const CMatrix& u() const noexcept { return u_; }
  Eigen::Index size() const noexcept { return t_.rows(); }

  /// Swaps the diagonal entries k and k+1 with a unitary rotation.
  void swap_adjacent(Eigen::Index k) {
    const Complex t11 = t_(k, k);
    const Complex t22 = t_(k + 1, k + 1);
    // Eigenvector of the 2x2 block for eigenvalue t22.
    Eigen::Vector2cd v(t_(k, k + 1), t22 - t11);
    const double nv = v.norm();
    if (nv == 0.0) return;  // equal, uncoupled eigenvalues
    v /= nv;
    Eigen::Matrix2cd g;
    g << v(0), -std::conj(v(1)), v(1), std::conj(v(0));
    t_.middleRows(k, 2) = (g.adjoint() * t_.middleRows(k, 2)).eval();
    t_.middleCols(k, 2) = (t_.middleCols(k, 2) * g).eval();
    u_.middleCols(k, 2) = (u_.middleCols(k, 2) * g).eval();
    t_(k + 1, k) = Complex(0.0, 0.0);
    t_(k, k) = t22;
    t_(k + 1, k + 1) = t11;
  }

  /// Moves every eigenvalue satisfying `select` to the leading block, keeping
  /// relative order. Returns the size of the leading block.
  template <typename Pred>
  Eigen::Index reorder(Pred select) {
    Eigen::Index target = 0;
    for (Eigen::Index k = 0; k < size(); ++k) {
      if (!select(t_(k, k))) continue;
      for (Eigen::Index j = k; j > target; --j) swap_adjacent(j - 1);
      ++target;
    }
    return target;
  }

 private:
  CMatrix t_;
  CMatrix u_;
};

/// Solves A X + X A^H + Q = 0 by the Bartels-Stewart method on the complex
/// Schur form of A. Requires lambda_i(A) + conj(lambda_j(A)) != 0 for all i, j.
inline CMatrix solve_lyapunov(const CMatrix& a, const CMatrix& q) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n || q.rows() != n || q.cols() != n)
    throw DimensionError("solve_lyapunov: A and Q must be square and equal-sized");
  if (n == 0) return CMatrix(0, 0);

  OrderedSchur schur(a);
  const CMatrix& t = schur.t();
  const CMatrix& u = schur.u();
  const CMatrix qt = u.adjoint() * q * u;
  const double scale = std::max(1.0, max_abs(t));

  // T Y + Y T^H = -Qt, solved backwards since T is upper triangular.
  CMatrix y = CMatrix::Zero(n, n);
  for (Eigen::Index j = n - 1; j >= 0; --j) {
    for (Eigen::Index i = n - 1; i >= 0; --i) {
      Complex s = -qt(i, j);
      for (Eigen::Index k = i + 1; k < n; ++k) s -= t(i, k) * y(k, j);
      for (Eigen::Index k = j + 1; k < n; ++k) s -= y(i, k) * std::conj(t(j, k));
      const Complex d = t(i, i) + std::conj(t(j, j));
      if (std::abs(d) <= 1e-14 * scale)
        throw NumericError("lyapunov",
                           "operator is singular (eigenvalues symmetric about "
                           "the imaginary axis)");
      y(i, j) = s / d;
    }
  }
  return u * y * u.adjoint();
}

/// Result of the stabilizing Riccati solve.
struct RiccatiSolution {
  CMatrix x;
  /// Eigenvalues of the Hamiltonian closest to the imaginary axis (|Re|).
  double min_abs_real = 0.0;
};

/// Stabilizing solution of A^H X + X A + X R X + Q = 0 via the stable
/// invariant subspace of [[A, R], [-Q, -A^H]]. Throws InfeasibleEpsilon when
/// the Hamiltonian has eigenvalues within `imag_tol * scale` of the imaginary
/// axis or the subspace is not a graph.
inline RiccatiSolution solve_stabilizing_riccati(const CMatrix& a, const CMatrix& r,
                                                 const CMatrix& q, double epsilon,
                                                 double imag_tol = 1e-10) {
  const Eigen::Index n = a.rows();
  CMatrix h(2 * n, 2 * n);
  h << a, r, -q, -a.adjoint();
  const double scale = std::max(1.0, max_abs(h));

  OrderedSchur schur(h);
  double min_abs_real = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < 2 * n; ++i)
    min_abs_real = std::min(min_abs_real, std::abs(schur.t()(i, i).real()));
  if (min_abs_real <= imag_tol * scale)
    throw InfeasibleEpsilon(epsilon, "Hamiltonian has eigenvalues on the imaginary axis");

  const Eigen::Index stable = schur.reorder([](const Complex& l) { return l.real() < 0.0; });
  if (stable != n)
    throw InfeasibleEpsilon(epsilon, "stable subspace has dimension " +
                                         std::to_string(stable) + ", expected " +
                                         std::to_string(n));

  const CMatrix u1 = schur.u().topLeftCorner(n, n);
  const CMatrix u2 = schur.u().bottomLeftCorner(n, n);
  Eigen::FullPivLU<CMatrix> lu(u1.transpose());
  if (!lu.isInvertible() || lu.rcond() < 1e-13)
    throw InfeasibleEpsilon(epsilon, "stable subspace is not a graph subspace");
  // X U1 = U2  <=>  U1^T X^T = U2^T
  CMatrix x = lu.solve(u2.transpose()).transpose();
  return {std::move(x), min_abs_real};
}

}  // namespace qsgain
