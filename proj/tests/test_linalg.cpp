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

#include <gtest/gtest.h>

#include <random>

#include "sffsim/linalg.hpp"

namespace sffsim {
namespace {

using namespace std::complex_literals;

ComplexMatrix random_hermitian(int n, std::mt19937_64& gen) {
  std::normal_distribution<double> d;
  ComplexMatrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = Complex(d(gen), d(gen));
  return (a + a.adjoint()) / 2.0;
}

TEST(Kron, IdentityAndZZ) {
  EXPECT_EQ(kron(pauli::identity(), pauli::identity()), ComplexMatrix::Identity(4, 4));
  ComplexMatrix zz = ComplexMatrix::Zero(4, 4);
  zz.diagonal() << 1.0, -1.0, -1.0, 1.0;
  EXPECT_EQ(kron(pauli::z(), pauli::z()), zz);
}

TEST(Kron, DimensionsAndLimit) {
  const ComplexMatrix b = ComplexMatrix::Identity(4, 4);
  const ComplexMatrix k = kron(pauli::x(), b);
  EXPECT_EQ(k.rows(), 8);
  EXPECT_EQ(k.cols(), 8);
  EXPECT_THROW(kron(b, b, 8), DimensionError);
}

// Small-integer entries keep every product exact, so equality is bitwise.
TEST(Kron, Associative) {
  std::mt19937_64 gen(3);
  std::uniform_int_distribution<int> d(-4, 4);
  auto integer_matrix = [&](int n) {
    ComplexMatrix m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = Complex(d(gen), d(gen));
    return m;
  };
  const ComplexMatrix a = integer_matrix(2), b = integer_matrix(3), c = integer_matrix(4);
  EXPECT_EQ(kron(kron(a, b), c), kron(a, kron(b, c)));
}

TEST(Embed, SiteOneIsMostSignificant) {
  EXPECT_EQ(embed_site_operator(pauli::z(), 1, 1), pauli::z());
  ComplexMatrix d1 = ComplexMatrix::Zero(4, 4), d2 = ComplexMatrix::Zero(4, 4);
  d1.diagonal() << 1.0, 1.0, -1.0, -1.0;
  d2.diagonal() << 1.0, -1.0, 1.0, -1.0;
  EXPECT_EQ(embed_site_operator(pauli::z(), 1, 2), d1);
  EXPECT_EQ(embed_site_operator(pauli::z(), 2, 2), d2);
  EXPECT_EQ(site_mask(1, 3), 4u);
  EXPECT_EQ(site_mask(3, 3), 1u);
}

TEST(Embed, Errors) {
  EXPECT_THROW(embed_site_operator(pauli::z(), 0, 2), IndexError);
  EXPECT_THROW(embed_site_operator(pauli::z(), 3, 2), IndexError);
  EXPECT_THROW(embed_site_operator(ComplexMatrix::Identity(4, 4), 1, 2), DimensionError);
}

TEST(Embed, DistinctSitesCommute) {
  for (int L = 2; L <= 4; ++L) {
    for (int m = 1; m <= L; ++m) {
      for (int k = m + 1; k <= L; ++k) {
        const ComplexMatrix a = embed_site_operator(pauli::y(), m, L);
        const ComplexMatrix b = embed_site_operator(pauli::x(), k, L);
        EXPECT_EQ(a * b, b * a);
      }
    }
  }
}

TEST(Pauli, LadderConvention) {
  EXPECT_EQ(pauli::plus()(0, 1), Complex(1.0));
  EXPECT_EQ(pauli::plus()(1, 0), Complex(0.0));
  EXPECT_LT(max_norm(pauli::plus() - (pauli::x() + 1i * pauli::y()) / 2.0), 1e-15);
  EXPECT_LT(max_norm(pauli::minus() - (pauli::x() - 1i * pauli::y()) / 2.0), 1e-15);
}

TEST(HermitianOperator, RejectsNonHermitian) {
  ComplexMatrix m = pauli::x();
  m(0, 1) = 2.0;
  EXPECT_THROW(HermitianOperator{m}, DomainError);
  EXPECT_THROW(HermitianOperator(ComplexMatrix(2, 3)), DimensionError);
}

TEST(Eigh, ClosedForms) {
  ComplexMatrix d = ComplexMatrix::Zero(3, 3);
  d.diagonal() << 3.0, 1.0, 2.0;
  const Spectrum s = eigh(HermitianOperator(d));
  EXPECT_EQ(s.kind, SpectrumKind::kHamiltonian);
  EXPECT_NEAR(s.eigenvalues[0], 1.0, 1e-14);
  EXPECT_NEAR(s.eigenvalues[1], 2.0, 1e-14);
  EXPECT_NEAR(s.eigenvalues[2], 3.0, 1e-14);
  const Spectrum x = eigh(HermitianOperator(pauli::x()));
  EXPECT_NEAR(x.eigenvalues[0], -1.0, 1e-14);
  EXPECT_NEAR(x.eigenvalues[1], 1.0, 1e-14);
}

TEST(Eigh, ReconstructionProperty) {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 31;
    const ComplexMatrix h = random_hermitian(n, gen);
    const Spectrum s = eigh(HermitianOperator(h));
    const ComplexMatrix back = s.eigenvectors * s.eigenvalues.cast<Complex>().asDiagonal() * s.eigenvectors.adjoint();
    EXPECT_LT(max_norm(back - h), 1e-9 * max_norm(h));
  }
}

TEST(UnitaryFromHamiltonian, ClosedForms) {
  std::mt19937_64 gen(5);
  const HermitianOperator h(random_hermitian(8, gen));
  EXPECT_LT(max_norm(unitary_from_hamiltonian(h, 0.0).matrix() - ComplexMatrix::Identity(8, 8)), 1e-12);
  const double w = 0.7, t = 2.3;
  const UnitaryOperator u = unitary_from_hamiltonian(HermitianOperator(w * pauli::z()), t);
  EXPECT_LT(std::abs(u.matrix()(0, 0) - std::exp(-1i * w * t)), 1e-14);
  EXPECT_LT(std::abs(u.matrix()(1, 1) - std::exp(1i * w * t)), 1e-14);
  EXPECT_LT(std::abs(u.matrix()(0, 1)), 1e-14);
}

TEST(UnitaryFromHamiltonian, GroupPropertyAndUnitarity) {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 10; ++trial) {
    const HermitianOperator h(random_hermitian(16, gen));
    const double t1 = 0.3 + trial, t2 = 1.7 * trial;
    const UnitaryOperator a = unitary_from_hamiltonian(h, t1);
    const UnitaryOperator b = unitary_from_hamiltonian(h, t2);
    const UnitaryOperator ab = unitary_from_hamiltonian(h, t1 + t2);
    EXPECT_LT(max_norm(a.matrix() * b.matrix() - ab.matrix()), 1e-9);
    EXPECT_LT(max_norm(ab.matrix().adjoint() * ab.matrix() - ComplexMatrix::Identity(16, 16)), 1e-10);
  }
}

TEST(UnitaryOperator, RejectsNonUnitary) {
  EXPECT_THROW(UnitaryOperator(2.0 * pauli::x()), NonUnitaryError);
}

TEST(Eigenphases, ClosedForms) {
  const Spectrum id = eigenphases(UnitaryOperator(ComplexMatrix::Identity(4, 4)));
  EXPECT_EQ(id.kind, SpectrumKind::kFloquet);
  for (double p : id.eigenvalues) EXPECT_NEAR(p, 0.0, 1e-14);
  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = std::exp(1i * kPi / 3.0);
  d(1, 1) = std::exp(-1i * kPi / 3.0);
  const Spectrum s = eigenphases(UnitaryOperator(d));
  EXPECT_NEAR(s.eigenvalues[0], -kPi / 3.0, 1e-14);
  EXPECT_NEAR(s.eigenvalues[1], kPi / 3.0, 1e-14);
  ComplexMatrix minus_one = -ComplexMatrix::Identity(2, 2);
  for (double p : eigenphases(UnitaryOperator(minus_one)).eigenvalues) EXPECT_NEAR(p, kPi, 1e-14);
}

TEST(Eigenphases, ReconstructsRandomUnitary) {
  std::mt19937_64 gen(13);
  const UnitaryOperator u = unitary_from_hamiltonian(HermitianOperator(random_hermitian(16, gen)), 1.3);
  const Spectrum s = eigenphases(u);
  for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i) {
    EXPECT_GT(s.eigenvalues[i], -kPi);
    EXPECT_LE(s.eigenvalues[i], kPi);
  }
  EXPECT_LT(max_norm(evolve(s, 1.0) - u.matrix()), 1e-10);
}

}  // namespace
}  // namespace sffsim
