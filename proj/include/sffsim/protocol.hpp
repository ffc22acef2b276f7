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
/// Randomized-measurement emulation: local Clifford twirl u = (x)_m u_m,
/// evolution U, inverse twirl, and z-basis readout of
///   P(s) = |<s| u^dag U u |0...0>|^2,
/// followed by the estimators
///   K   ~ mean_r sum_s   P_r(s)   (-2)^{-|s|}
///   K_A ~ mean_r sum_s_A P_r(s_A) (-2)^{-|s_A|}.
/// Averaged over the Clifford group (a unitary 2-design) the estimators are
/// exactly |Tr U|^2 / N^2 and K_A.

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "sffsim/linalg.hpp"
#include "sffsim/rng.hpp"
#include "sffsim/spectral.hpp"

namespace sffsim {

using Matrix2 = Eigen::Matrix2cd;

/// The 24 single-qubit Cliffords modulo global phase.
///
/// Enumeration: breadth-first closure of {I} under left multiplication by
/// H and then S, in discovery order. Each element is phase-fixed so that its
/// first nonzero entry in row-major order is real and positive. Index 0 is the
/// identity and index 1 is the Hadamard.
class CliffordTable {
 public:
  static constexpr int kSize = 24;

  static const CliffordTable& instance() {
    static const CliffordTable table;
    return table;
  }

  const Matrix2& operator[](int i) const { return gates_.at(static_cast<std::size_t>(i)); }
  const std::array<Matrix2, kSize>& gates() const noexcept { return gates_; }

  /// Index of m up to global phase, or -1.
  int index_of(const Matrix2& m) const {
    const Matrix2 c = canonical(m);
    for (int i = 0; i < kSize; ++i) {
      if ((gates_[static_cast<std::size_t>(i)] - c).cwiseAbs().maxCoeff() < 1e-9) return i;
    }
    return -1;
  }

  static Matrix2 canonical(const Matrix2& m) {
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) {
        const Complex v = m(r, c);
        if (std::abs(v) > 1e-9) return m * (std::conj(v) / std::abs(v));
      }
    }
    return m;
  }

 private:
  CliffordTable() {
    const double s = 1.0 / std::sqrt(2.0);
    Matrix2 h;
    h << s, s, s, -s;
    Matrix2 phase;
    phase << 1.0, 0.0, 0.0, Complex(0.0, 1.0);
    std::vector<Matrix2> found{Matrix2::Identity()};
    for (std::size_t head = 0; head < found.size(); ++head) {
      for (const Matrix2& gen : {h, phase}) {
        const Matrix2 candidate = canonical(gen * found[head]);
        const bool seen = std::any_of(found.begin(), found.end(), [&](const Matrix2& g) {
          return (g - candidate).cwiseAbs().maxCoeff() < 1e-9;
        });
        if (!seen) found.push_back(candidate);
      }
    }
    if (found.size() != kSize) throw NumericalError("Clifford closure did not yield 24 elements", 0.0);
    std::copy(found.begin(), found.end(), gates_.begin());
  }

  std::array<Matrix2, kSize> gates_;
};

inline const CliffordTable& clifford_table() { return CliffordTable::instance(); }

enum class OutcomeMode { kExact, kShots };

struct OutcomeDistribution {
  OutcomeMode mode = OutcomeMode::kExact;
  int L = 0;
  std::vector<double> probabilities;   ///< exact mode, length 2^L
  std::vector<std::uint64_t> counts;   ///< shots mode, length 2^L
  std::uint64_t n_shots = 0;

  std::size_t size() const noexcept { return std::size_t{1} << L; }

  /// P(s) for exact mode, empirical frequency for shots mode.
  double probability(std::size_t s) const {
    if (mode == OutcomeMode::kExact) return probabilities[s];
    return static_cast<double>(counts[s]) / static_cast<double>(n_shots);
  }
};

struct RandomizedRun {
  std::uint64_t realization_id = 0;
  std::vector<int> clifford_indices;  ///< one per site, site 1 first
  double time = 0.0;
  OutcomeDistribution outcome;
};

/// One uniform Clifford per site for (realization, time index).
inline std::vector<int> draw_cliffords(std::uint64_t base_seed, std::uint64_t realization_id,
                                       std::uint32_t time_index, int L) {
  const CounterStream stream(base_seed, realization_id, StreamTag::kClifford, time_index);
  std::vector<int> out(static_cast<std::size_t>(L));
  for (int m = 0; m < L; ++m) {
    out[static_cast<std::size_t>(m)] =
        static_cast<int>(stream.below_at(static_cast<std::uint32_t>(m), CliffordTable::kSize));
  }
  return out;
}

namespace detail {

inline void check_cliffords(std::span<const int> cliffords, Eigen::Index dim) {
  if ((Eigen::Index{1} << cliffords.size()) != dim) {
    throw UsageError("protocol: operator dimension does not match 2^(number of Cliffords)");
  }
  for (int c : cliffords) {
    if (c < 0 || c >= CliffordTable::kSize) throw UsageError("protocol: Clifford index out of range");
  }
}

/// psi <- (op on site) psi, site 1-based.
inline void apply_site_gate(ComplexVector& psi, const Matrix2& op, int site, int L) {
  const std::size_t mask = site_mask(site, L);
  const auto dim = static_cast<std::size_t>(psi.size());
  for (std::size_t s = 0; s < dim; ++s) {
    if (s & mask) continue;
    const auto i0 = static_cast<Eigen::Index>(s);
    const auto i1 = static_cast<Eigen::Index>(s | mask);
    const Complex a = psi[i0];
    const Complex b = psi[i1];
    psi[i0] = op(0, 0) * a + op(0, 1) * b;
    psi[i1] = op(1, 0) * a + op(1, 1) * b;
  }
}

/// (x)_m u_m |0...0>
inline ComplexVector twirled_initial_state(std::span<const int> cliffords) {
  const int L = static_cast<int>(cliffords.size());
  ComplexVector psi = ComplexVector::Zero(Eigen::Index{1} << L);
  psi[0] = 1.0;
  for (int m = 1; m <= L; ++m) {
    apply_site_gate(psi, clifford_table()[cliffords[static_cast<std::size_t>(m - 1)]], m, L);
  }
  return psi;
}

inline void apply_inverse_twirl(ComplexVector& psi, std::span<const int> cliffords) {
  const int L = static_cast<int>(cliffords.size());
  for (int m = 1; m <= L; ++m) {
    apply_site_gate(psi, clifford_table()[cliffords[static_cast<std::size_t>(m - 1)]].adjoint(), m, L);
  }
}

inline OutcomeDistribution simulate_run_exact(const ComplexMatrix& u, std::span<const int> cliffords) {
  check_cliffords(cliffords, u.rows());
  ComplexVector psi = u * twirled_initial_state(cliffords);
  apply_inverse_twirl(psi, cliffords);
  OutcomeDistribution d;
  d.mode = OutcomeMode::kExact;
  d.L = static_cast<int>(cliffords.size());
  d.probabilities.resize(static_cast<std::size_t>(psi.size()));
  for (Eigen::Index s = 0; s < psi.size(); ++s) d.probabilities[static_cast<std::size_t>(s)] = std::norm(psi[s]);
  return d;
}

/// (-2)^{-k} for k = 0..L
inline std::vector<double> estimator_weights(int L) {
  std::vector<double> w(static_cast<std::size_t>(L) + 1);
  w[0] = 1.0;
  for (std::size_t k = 1; k < w.size(); ++k) w[k] = w[k - 1] * -0.5;
  return w;
}

}  // namespace detail

inline OutcomeDistribution simulate_run_exact(const UnitaryOperator& u, std::span<const int> cliffords) {
  return detail::simulate_run_exact(u.matrix(), cliffords);
}

/// Multinomial resampling by inverse-CDF lookup, one stream draw per shot.
inline OutcomeDistribution sample_shots(const OutcomeDistribution& dist, std::uint64_t n_shots,
                                        CounterStream& rng) {
  if (dist.mode != OutcomeMode::kExact) throw UsageError("sample_shots: input must be exact-mode");
  if (n_shots == 0) throw UsageError("sample_shots: n_shots must be > 0");
  std::vector<double> cdf(dist.probabilities.size());
  std::partial_sum(dist.probabilities.begin(), dist.probabilities.end(), cdf.begin());
  const double total = cdf.back();
  OutcomeDistribution out;
  out.mode = OutcomeMode::kShots;
  out.L = dist.L;
  out.n_shots = n_shots;
  out.counts.assign(cdf.size(), 0);
  for (std::uint64_t k = 0; k < n_shots; ++k) {
    const double u = rng.uniform() * total;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    ++out.counts[static_cast<std::size_t>(it - cdf.begin())];
  }
  return out;
}

/// sum_s P(s) (-2)^{-|s|} for one run.
inline double sff_estimator_term(const OutcomeDistribution& dist) {
  const auto w = detail::estimator_weights(dist.L);
  double sum = 0.0;
  for (std::size_t s = 0; s < dist.size(); ++s) {
    sum += dist.probability(s) * w[static_cast<std::size_t>(std::popcount(s))];
  }
  return sum;
}

/// sum_{s_A} P(s_A) (-2)^{-|s_A|}, marginalizing the sites outside A.
inline double psff_estimator_term(const OutcomeDistribution& dist, const SubsystemSpec& a) {
  if (a.L() != dist.L) throw UsageError("psff estimator: subsystem L does not match outcomes");
  const auto w = detail::estimator_weights(dist.L);
  double sum = 0.0;
  for (std::size_t s = 0; s < dist.size(); ++s) {
    sum += dist.probability(s) * w[static_cast<std::size_t>(std::popcount(s & a.mask_a()))];
  }
  return sum;
}

namespace detail {
inline void check_runs(std::span<const RandomizedRun> runs) {
  if (runs.empty()) throw UsageError("estimator: no runs");
  for (const auto& r : runs) {
    if (r.time != runs.front().time) throw UsageError("estimator: runs have different time points");
  }
}
}  // namespace detail

inline double estimate_sff(std::span<const RandomizedRun> runs) {
  detail::check_runs(runs);
  double sum = 0.0;
  for (const auto& r : runs) sum += sff_estimator_term(r.outcome);
  return sum / static_cast<double>(runs.size());
}

inline double estimate_psff(std::span<const RandomizedRun> runs, const SubsystemSpec& a) {
  detail::check_runs(runs);
  double sum = 0.0;
  for (const auto& r : runs) sum += psff_estimator_term(r.outcome, a);
  return sum / static_cast<double>(runs.size());
}

}  // namespace sffsim
