// Copyright 2026 The sffsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

/// @file
/// Dense complex linear algebra on the 2^L-dimensional qubit Hilbert space.
///
/// Basis convention: computational basis |s_1 ... s_L> with site 1 as the most
/// significant bit of the basis index. sigma^z|0> = +|0>, and
/// sigma^{+-} = (sigma^x +- i sigma^y)/2, so sigma^+ = |0><1| has its single
/// nonzero entry in row 0, column 1.
///
/// Matrices are stored row-major: entry (i, j) lives at data()[i * cols + j].

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sffsim/error.hpp"

namespace sffsim {

using Complex = std::complex<double>;
using ComplexMatrix =
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr Eigen::Index kMaxKronSide = Eigen::Index{1} << 16;
inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kUnitaryTolerance = 1e-10;
inline constexpr double kPi = 3.141592653589793238462643383279502884;

inline double max_norm(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

namespace pauli {
inline ComplexMatrix identity() { return ComplexMatrix::Identity(2, 2); }
inline ComplexMatrix x() {
  ComplexMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}
inline ComplexMatrix y() {
  ComplexMatrix m(2, 2);
  m << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
  return m;
}
inline ComplexMatrix z() {
  ComplexMatrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}
/// |0><1|
inline ComplexMatrix plus() {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 1) = 1.0;
  return m;
}
/// |1><0|
inline ComplexMatrix minus() {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(1, 0) = 1.0;
  return m;
}
}  // namespace pauli

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b,
                          Eigen::Index max_side = kMaxKronSide) {
  const Eigen::Index rows = a.rows() * b.rows();
  const Eigen::Index cols = a.cols() * b.cols();
  if (rows > max_side || cols > max_side) {
    throw DimensionError("kron: result " + std::to_string(rows) + "x" +
                         std::to_string(cols) + " exceeds limit " +
                         std::to_string(max_side));
  }
  ComplexMatrix out(rows, cols);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

/// I^{(m-1)} (x) op (x) I^{(L-m)} for 1-based site m.
inline ComplexMatrix embed_site_operator(const ComplexMatrix& op, int site, int num_sites) {
  if (op.rows() != 2 || op.cols() != 2) {
    throw DimensionError("embed_site_operator: operator must be 2x2");
  }
  if (num_sites < 1 || site < 1 || site > num_sites) {
    throw IndexError("embed_site_operator: site " + std::to_string(site) +
                     " out of range [1, " + std::to_string(num_sites) + "]");
  }
  const auto left = ComplexMatrix::Identity(Eigen::Index{1} << (site - 1),
                                            Eigen::Index{1} << (site - 1));
  const auto right = ComplexMatrix::Identity(Eigen::Index{1} << (num_sites - site),
                                             Eigen::Index{1} << (num_sites - site));
  return kron(kron(left, op), right);
}

/// Bit mask selecting 1-based site m inside a basis index of an L-site chain.
inline std::size_t site_mask(int site, int num_sites) {
  return std::size_t{1} << (num_sites - site);
}

class HermitianOperator {
 public:
  explicit HermitianOperator(ComplexMatrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() == 0) {
      throw DimensionError("HermitianOperator: matrix must be square and nonempty");
    }
    if (!m_.allFinite()) throw DomainError("HermitianOperator: non-finite entry");
    const double scale = max_norm(m_);
    const double asym = max_norm(m_ - m_.adjoint());
    if (asym > kHermitianTolerance * scale) {
      throw DomainError("HermitianOperator: |H - H^dag|_max = " + std::to_string(asym));
    }
  }

  const ComplexMatrix& matrix() const noexcept { return m_; }
  Eigen::Index dim() const noexcept { return m_.rows(); }

 private:
  ComplexMatrix m_;
};

class UnitaryOperator {
 public:
  /// Validates |U^dag U - I|_max <= tolerance.
  explicit UnitaryOperator(ComplexMatrix m, double tolerance = kUnitaryTolerance)
      : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() == 0) {
      throw DimensionError("UnitaryOperator: matrix must be square and nonempty");
    }
    if (!m_.allFinite()) throw DomainError("UnitaryOperator: non-finite entry");
    const double defect =
        max_norm(m_.adjoint() * m_ - ComplexMatrix::Identity(m_.rows(), m_.cols()));
    if (defect > tolerance) {
      throw NonUnitaryError("UnitaryOperator: |U^dag U - I|_max = " + std::to_string(defect));
    }
  }

  const ComplexMatrix& matrix() const noexcept { return m_; }
  Eigen::Index dim() const noexcept { return m_.rows(); }

 private:
  ComplexMatrix m_;
};

enum class SpectrumKind {
  kHamiltonian,  ///< eigenenergies in rad/ns
  kFloquet,      ///< quasienergy phases in (-pi, pi]
};

struct Spectrum {
  SpectrumKind kind;
  RealVector eigenvalues;  ///< ascending
  ComplexMatrix eigenvectors;  ///< columns; unitary

  Eigen::Index dim() const noexcept { return eigenvalues.size(); }
};

inline Spectrum eigh(const HermitianOperator& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h.matrix());
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eigh: eigensolver did not converge",
                         std::numeric_limits<double>::quiet_NaN());
  }
  Spectrum s{SpectrumKind::kHamiltonian, solver.eigenvalues(), solver.eigenvectors()};
  const ComplexMatrix rebuilt =
      s.eigenvectors * s.eigenvalues.cast<Complex>().asDiagonal() * s.eigenvectors.adjoint();
  const double residual = max_norm(rebuilt - h.matrix());
  if (residual > 1e-9 * std::max(1.0, max_norm(h.matrix()))) {
    throw NumericalError("eigh: reconstruction residual too large", residual);
  }
  return s;
}

/// U(t) from a spectrum: exp(-i H t) for Hamiltonians and U^t (t in cycles)
/// for Floquet phases.
inline ComplexMatrix evolve(const Spectrum& s, double t) {
  const double sign = s.kind == SpectrumKind::kHamiltonian ? -1.0 : 1.0;
  ComplexVector phases(s.dim());
  for (Eigen::Index a = 0; a < s.dim(); ++a) {
    phases[a] = std::polar(1.0, sign * s.eigenvalues[a] * t);
  }
  return s.eigenvectors * phases.asDiagonal() * s.eigenvectors.adjoint();
}

/// exp(-i H t) through the eigendecomposition of H.
inline UnitaryOperator unitary_from_hamiltonian(const HermitianOperator& h, double t) {
  if (!(t >= 0.0)) throw UsageError("unitary_from_hamiltonian: t must be >= 0");
  return UnitaryOperator(evolve(eigh(h), t));
}

/// Eigenphases theta_a in (-pi, pi] with U = V diag(e^{i theta}) V^dag.
inline Spectrum eigenphases(const UnitaryOperator& u) {
  // U is normal, so its complex Schur form is diagonal and the Schur vectors
  // are the eigenvectors.
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(u.matrix());
  if (schur.info() != Eigen::Success) {
    throw NumericalError("eigenphases: Schur iteration did not converge",
                         std::numeric_limits<double>::quiet_NaN());
  }
  const Eigen::MatrixXcd& tri = schur.matrixT();
  const Eigen::Index n = tri.rows();
  std::vector<double> phases(static_cast<std::size_t>(n));
  for (Eigen::Index a = 0; a < n; ++a) {
    const Complex lambda = tri(a, a);
    if (std::abs(std::abs(lambda) - 1.0) > 1e-6) {
      throw NonUnitaryError("eigenphases: eigenvalue modulus " +
                            std::to_string(std::abs(lambda)));
    }
    double theta = std::arg(lambda);
    if (theta <= -kPi) theta = kPi;
    phases[static_cast<std::size_t>(a)] = theta;
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index l, Eigen::Index r) {
    return phases[static_cast<std::size_t>(l)] < phases[static_cast<std::size_t>(r)];
  });
  Spectrum s{SpectrumKind::kFloquet, RealVector(n), ComplexMatrix(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    s.eigenvalues[k] = phases[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])];
    s.eigenvectors.col(k) = schur.matrixU().col(order[static_cast<std::size_t>(k)]);
  }
  return s;
}

}  // namespace sffsim
