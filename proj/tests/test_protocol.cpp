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

#include <cmath>
#include <random>

#include "sffsim/models.hpp"
#include "sffsim/protocol.hpp"
#include "sffsim/spectral.hpp"

namespace sffsim {
namespace {

using namespace std::complex_literals;

UnitaryOperator random_unitary(int L, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> d;
  const auto n = Eigen::Index{1} << L;
  ComplexMatrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = Complex(d(gen), d(gen));
  return unitary_from_hamiltonian(HermitianOperator((a + a.adjoint()) / 2.0), 1.0);
}

// Exact average of an estimator term over the full Clifford product group.
template <class Term>
double clifford_average(const UnitaryOperator& u, int L, Term term) {
  const int total = L == 1 ? 24 : 24 * 24;
  double sum = 0.0;
  for (int k = 0; k < total; ++k) {
    std::vector<int> c(static_cast<std::size_t>(L));
    c[0] = k % 24;
    if (L == 2) c[1] = k / 24;
    sum += term(simulate_run_exact(u, c));
  }
  return sum / total;
}

TEST(CliffordTable, Structure) {
  const auto& t = clifford_table();
  EXPECT_LT((t[0] - Matrix2::Identity()).cwiseAbs().maxCoeff(), 1e-15);
  Matrix2 h;
  h << 1.0, 1.0, 1.0, -1.0;
  h /= std::sqrt(2.0);
  EXPECT_EQ(t.index_of(h), 1);
  EXPECT_EQ(t.index_of(Complex(0.0, 1.0) * h), 1);
  for (int i = 0; i < 24; ++i) {
    EXPECT_LT((t[i].adjoint() * t[i] - Matrix2::Identity()).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_EQ(t.index_of(t[i]), i);
  }
}

TEST(CliffordTable, ClosedUnderMultiplication) {
  const auto& t = clifford_table();
  std::vector<int> hits(24, 0);
  for (int i = 0; i < 24; ++i) {
    for (int j = 0; j < 24; ++j) {
      const int k = t.index_of(t[i] * t[j]);
      ASSERT_GE(k, 0) << i << " * " << j;
      ++hits[static_cast<std::size_t>(k)];
    }
  }
  // Group multiplication table is a Latin square: each element appears 24 times.
  for (int h : hits) EXPECT_EQ(h, 24);
}

TEST(SimulateRunExact, Cases) {
  for (int a = 0; a < 24; ++a) {
    for (int b = 0; b < 24; b += 5) {
      const std::vector<int> c{a, b};
      const auto d = simulate_run_exact(UnitaryOperator(ComplexMatrix::Identity(4, 4)), c);
      EXPECT_NEAR(d.probabilities[0], 1.0, 1e-14);
      EXPECT_NEAR(sff_estimator_term(d), 1.0, 1e-14);
    }
  }
  const auto x = simulate_run_exact(UnitaryOperator(pauli::x()), std::vector<int>{0});
  EXPECT_NEAR(x.probabilities[1], 1.0, 1e-15);
  const UnitaryOperator u = random_unitary(3, 4);
  const auto d = simulate_run_exact(u, std::vector<int>{3, 17, 22});
  double total = 0.0;
  for (double p : d.probabilities) total += p;
  EXPECT_NEAR(total, 1.0, 1e-10);
  EXPECT_THROW(simulate_run_exact(u, std::vector<int>{1, 2}), UsageError);
  EXPECT_THROW(simulate_run_exact(u, std::vector<int>{1, 2, 24}), UsageError);
}

TEST(Estimator, SingleQubitPhaseGateClosedForm) {
  for (double theta : {0.0, 0.4, 1.3, kPi}) {
    ComplexMatrix u = ComplexMatrix::Identity(2, 2);
    u(1, 1) = std::exp(1i * theta);
    const double avg = clifford_average(UnitaryOperator(u), 1, [](const auto& d) { return sff_estimator_term(d); });
    EXPECT_NEAR(avg, (2.0 + 2.0 * std::cos(theta)) / 4.0, 1e-12);
  }
}

TEST(Estimator, ExhaustiveAverageIsExact) {
  for (int L = 1; L <= 2; ++L) {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      const UnitaryOperator u = random_unitary(L, 100 + seed);
      const double n = static_cast<double>(u.dim());
      const double exact = std::norm(u.matrix().trace()) / (n * n);
      EXPECT_NEAR(clifford_average(u, L, [](const auto& d) { return sff_estimator_term(d); }), exact, 1e-10);
      for (int site = 1; site <= L; ++site) {
        const SubsystemSpec a({site}, L);
        const double avg = clifford_average(u, L, [&](const auto& d) { return psff_estimator_term(d, a); });
        EXPECT_NEAR(avg, psff_exact(u, a), 1e-10) << "L = " << L << " site " << site;
      }
    }
  }
}

TEST(Estimator, SubsystemLimits) {
  const UnitaryOperator u = random_unitary(3, 9);
  const auto d = simulate_run_exact(u, std::vector<int>{4, 9, 13});
  EXPECT_NEAR(psff_estimator_term(d, SubsystemSpec::prefix(3, 3)), sff_estimator_term(d), 1e-15);
  EXPECT_NEAR(psff_estimator_term(d, SubsystemSpec({}, 3)), 1.0, 1e-14);
  EXPECT_THROW(psff_estimator_term(d, SubsystemSpec::prefix(1, 2)), UsageError);
}

TEST(Estimator, RunCollections) {
  EXPECT_THROW(estimate_sff(std::span<const RandomizedRun>()), UsageError);
  const UnitaryOperator id(ComplexMatrix::Identity(2, 2));
  std::vector<RandomizedRun> runs{{0, {5}, 3.0, simulate_run_exact(id, std::vector<int>{5})}};
  EXPECT_NEAR(estimate_sff(runs), 1.0, 1e-14);
  runs.push_back({1, {7}, 4.0, simulate_run_exact(id, std::vector<int>{7})});
  EXPECT_THROW(estimate_sff(runs), UsageError);
  runs[1].time = 3.0;
  EXPECT_NEAR(estimate_psff(runs, SubsystemSpec({1}, 1)), 1.0, 1e-14);
}

TEST(DrawCliffords, DeterministicAndInRange) {
  const auto a = draw_cliffords(3, 5, 7, 5);
  EXPECT_EQ(a, draw_cliffords(3, 5, 7, 5));
  EXPECT_NE(a, draw_cliffords(3, 5, 8, 5));
  for (int c : a) {
    EXPECT_GE(c, 0);
    EXPECT_LT(c, 24);
  }
}

TEST(SampleShots, BasicContracts) {
  OutcomeDistribution d;
  d.L = 2;
  d.probabilities = {0.0, 0.0, 1.0, 0.0};
  CounterStream rng(1, 0, StreamTag::kShots);
  const auto s = sample_shots(d, 3000, rng);
  EXPECT_EQ(s.mode, OutcomeMode::kShots);
  EXPECT_EQ(s.counts[2], 3000u);
  EXPECT_THROW(sample_shots(d, 0, rng), UsageError);
  EXPECT_THROW(sample_shots(s, 10, rng), UsageError);

  const auto r = simulate_run_exact(random_unitary(3, 2), std::vector<int>{1, 2, 3});
  const auto shots = sample_shots(r, 3000, rng);
  std::uint64_t total = 0;
  for (auto c : shots.counts) total += c;
  EXPECT_EQ(total, 3000u);
}

TEST(SampleShots, FrequenciesWithinBinomialBounds) {
  const auto r = simulate_run_exact(random_unitary(3, 21), std::vector<int>{0, 0, 0});
  CounterStream rng(11, 0, StreamTag::kShots);
  const std::uint64_t n = 1000000;
  const auto s = sample_shots(r, n, rng);
  for (std::size_t i = 0; i < r.probabilities.size(); ++i) {
    const double p = r.probabilities[i];
    const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
    EXPECT_NEAR(s.probability(i), p, 5.0 * sigma + 1e-12) << "outcome " << i;
  }
}

TEST(SampleShots, UnbiasedForExactEstimate) {
  const auto r = simulate_run_exact(random_unitary(2, 5), std::vector<int>{6, 19});
  const double exact = sff_estimator_term(r);
  const int trials = 200;
  double sum = 0.0, sq = 0.0;
  for (int k = 0; k < trials; ++k) {
    CounterStream rng(3, static_cast<std::uint64_t>(k), StreamTag::kShots);
    const double v = sff_estimator_term(sample_shots(r, 3000, rng));
    sum += v;
    sq += v * v;
  }
  const double mean = sum / trials;
  const double se = std::sqrt((sq / trials - mean * mean) / (trials - 1));
  EXPECT_LT(std::abs(mean - exact), 4.0 * se);
}

TEST(Estimator, StandardErrorScalesAsInverseSqrtR) {
  const auto p = FloquetModelParams::defaults(3);
  auto se_for = [&](int R) {
    double sum = 0.0, sq = 0.0;
    for (int r = 0; r < R; ++r) {
      const auto rid = static_cast<std::uint64_t>(r);
      const auto u = build_floquet_unitary(p, sample_disorder(p.W, 3, {Axis::kX, Axis::kY, Axis::kZ}, {5, R}, rid));
      const ComplexMatrix u5 = evolve(eigenphases(u), 5.0);
      CounterStream rng(5, rid, StreamTag::kShots, 5);
      const double v = sff_estimator_term(sample_shots(detail::simulate_run_exact(u5, draw_cliffords(5, rid, 5, 3)), 3000, rng));
      sum += v;
      sq += v * v;
    }
    const double mean = sum / R;
    return std::sqrt((sq / R - mean * mean) * R / (R - 1) / R);
  };
  const double s100 = se_for(100), s400 = se_for(400), s1600 = se_for(1600);
  EXPECT_GT(s100 / s400, 2.0 / 1.5);
  EXPECT_LT(s100 / s400, 2.0 * 1.5);
  EXPECT_GT(s400 / s1600, 2.0 / 1.5);
  EXPECT_LT(s400 / s1600, 2.0 * 1.5);
}

}  // namespace
}  // namespace sffsim
