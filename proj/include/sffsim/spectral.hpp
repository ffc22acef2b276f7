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
/// Exact spectral form factors (SFF, connected SFF, partial SFF) and the
/// closed-form random-matrix reference curves.
///
/// All curves use the normalization K(0) = 1:
///   K(t)   = |Tr U(t)|^2 / N^2
///   K_A(t) = Tr_B[(Tr_A U)(Tr_A U)^dag] / (N N_A)

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "sffsim/linalg.hpp"

namespace sffsim {

enum class GridKind {
  kFloquetCycles,  ///< integer numbers of drive periods
  kContinuousNs,
};

class TimeGrid {
 public:
  TimeGrid(GridKind kind, std::vector<double> points) : kind_(kind), points_(std::move(points)) {
    if (points_.empty()) throw UsageError("TimeGrid: no points");
    if (points_.front() < 0.0) throw UsageError("TimeGrid: first point must be >= 0");
    for (std::size_t i = 1; i < points_.size(); ++i) {
      if (!(points_[i] > points_[i - 1])) throw UsageError("TimeGrid: points must ascend strictly");
    }
    if (kind_ == GridKind::kFloquetCycles) {
      for (double p : points_) {
        if (p != std::floor(p)) throw UsageError("TimeGrid: cycle grid needs integer points");
      }
    }
  }

  /// 0, 1, ..., max_cycles
  static TimeGrid cycles(int max_cycles) {
    std::vector<double> pts;
    for (int k = 0; k <= max_cycles; ++k) pts.push_back(k);
    return TimeGrid(GridKind::kFloquetCycles, std::move(pts));
  }

  /// 0, step, 2 step, ... up to and including t_max (within rounding).
  static TimeGrid uniform_ns(double t_max, double step) {
    if (!(step > 0.0)) throw UsageError("TimeGrid: step must be > 0");
    std::vector<double> pts;
    const auto n = static_cast<long>(std::floor(t_max / step + 1e-9));
    for (long k = 0; k <= n; ++k) pts.push_back(static_cast<double>(k) * step);
    return TimeGrid(GridKind::kContinuousNs, std::move(pts));
  }

  GridKind kind() const noexcept { return kind_; }
  const std::vector<double>& points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  double operator[](std::size_t i) const { return points_[i]; }

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

 private:
  GridKind kind_;
  std::vector<double> points_;
};

/// Ensemble of curves on a common grid. per_realization may be empty for
/// ensemble-level curves (connected SFF, mitigated curves).
struct SffCurve {
  TimeGrid grid;
  Eigen::MatrixXd per_realization;  ///< R x |grid|
  std::vector<double> mean;
  std::vector<double> std_error;  ///< sample std / sqrt(R)
  int n_realizations = 0;

  /// Mean and standard error per column, summed in realization order.
  static SffCurve from_realizations(TimeGrid grid, Eigen::MatrixXd values) {
    const auto R = values.rows();
    if (R < 1 || values.cols() != static_cast<Eigen::Index>(grid.size())) {
      throw DimensionError("SffCurve: realization matrix does not match grid");
    }
    SffCurve c{std::move(grid), std::move(values), {}, {}, static_cast<int>(R)};
    const auto n = static_cast<std::size_t>(c.per_realization.cols());
    c.mean.resize(n);
    c.std_error.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      const auto col = static_cast<Eigen::Index>(j);
      double sum = 0.0;
      for (Eigen::Index r = 0; r < R; ++r) sum += c.per_realization(r, col);
      const double mu = sum / static_cast<double>(R);
      double ss = 0.0;
      for (Eigen::Index r = 0; r < R; ++r) {
        const double d = c.per_realization(r, col) - mu;
        ss += d * d;
      }
      c.mean[j] = mu;
      c.std_error[j] = R > 1 ? std::sqrt(ss / static_cast<double>(R - 1) / static_cast<double>(R)) : 0.0;
    }
    return c;
  }

  static SffCurve from_mean(TimeGrid grid, std::vector<double> mean, std::vector<double> std_error,
                            int n_realizations) {
    if (mean.size() != grid.size() || std_error.size() != grid.size()) {
      throw DimensionError("SffCurve: mean/stderr length does not match grid");
    }
    return SffCurve{std::move(grid), Eigen::MatrixXd(), std::move(mean), std::move(std_error),
                    n_realizations};
  }
};

/// Subsystem A as sorted distinct 1-based sites of an L-site chain; B is the rest.
class SubsystemSpec {
 public:
  SubsystemSpec(std::vector<int> sites, int num_sites) : sites_(std::move(sites)), L_(num_sites) {
    if (L_ < 1) throw UsageError("SubsystemSpec: L must be >= 1");
    std::sort(sites_.begin(), sites_.end());
    for (std::size_t i = 0; i < sites_.size(); ++i) {
      if (sites_[i] < 1 || sites_[i] > L_) {
        throw UsageError("SubsystemSpec: site " + std::to_string(sites_[i]) + " out of range");
      }
      if (i > 0 && sites_[i] == sites_[i - 1]) throw UsageError("SubsystemSpec: duplicate site");
    }
    for (int s : sites_) mask_a_ |= site_mask(s, L_);
  }

  /// Sites 1..k.
  static SubsystemSpec prefix(int k, int num_sites) {
    std::vector<int> s;
    for (int i = 1; i <= k; ++i) s.push_back(i);
    return SubsystemSpec(std::move(s), num_sites);
  }

  const std::vector<int>& sites() const noexcept { return sites_; }
  int L() const noexcept { return L_; }
  int size_a() const noexcept { return static_cast<int>(sites_.size()); }
  std::size_t dim_a() const noexcept { return std::size_t{1} << sites_.size(); }
  std::size_t dim_b() const noexcept { return std::size_t{1} << (L_ - size_a()); }
  std::size_t mask_a() const noexcept { return mask_a_; }

  /// "A1-2" style label; "A" for the empty set.
  std::string label() const {
    std::string s = "A";
    for (std::size_t i = 0; i < sites_.size(); ++i) {
      if (i) s += '-';
      s += std::to_string(sites_[i]);
    }
    return s;
  }

 private:
  std::vector<int> sites_;
  int L_;
  std::size_t mask_a_ = 0;
};

namespace detail {

inline void check_grid_kind(const Spectrum& s, const TimeGrid& grid) {
  const bool ok = (s.kind == SpectrumKind::kFloquet) == (grid.kind() == GridKind::kFloquetCycles);
  if (!ok) throw UsageError("time grid kind does not match spectrum kind");
}

/// Packs the bits of `index` selected by `mask` into a dense integer.
inline std::size_t compress_bits(std::size_t index, std::size_t mask) {
  std::size_t out = 0;
  std::size_t bit = 0;
  for (std::size_t m = mask; m; m &= m - 1) {
    const std::size_t low = m & (~m + 1);
    if (index & low) out |= std::size_t{1} << bit;
    ++bit;
  }
  return out;
}

}  // namespace detail

/// Tr U(t) = sum_a e^{-i E_a t} (Hamiltonian) or sum_a e^{i theta_a t} (Floquet).
inline Complex trace_at(const Spectrum& s, double t) {
  const double sign = s.kind == SpectrumKind::kHamiltonian ? -1.0 : 1.0;
  Complex sum = 0.0;
  for (Eigen::Index a = 0; a < s.dim(); ++a) sum += std::polar(1.0, sign * s.eigenvalues[a] * t);
  return sum;
}

inline std::vector<double> sff_exact(const Spectrum& s, const TimeGrid& grid) {
  detail::check_grid_kind(s, grid);
  const double n2 = static_cast<double>(s.dim()) * static_cast<double>(s.dim());
  std::vector<double> k(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) k[i] = std::norm(trace_at(s, grid[i])) / n2;
  return k;
}

/// mean_r K_r(t) - |mean_r Tr U_r(t)|^2 / N^2
inline std::vector<double> connected_sff(std::span<const Spectrum> ensemble, const TimeGrid& grid) {
  if (ensemble.empty()) throw UsageError("connected_sff: empty ensemble");
  const double n = static_cast<double>(ensemble.front().dim());
  const double r = static_cast<double>(ensemble.size());
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double full = 0.0;
    Complex tr = 0.0;
    for (const Spectrum& s : ensemble) {
      detail::check_grid_kind(s, grid);
      if (static_cast<double>(s.dim()) != n) throw DimensionError("connected_sff: mixed dimensions");
      const Complex z = trace_at(s, grid[i]);
      full += std::norm(z) / (n * n);
      tr += z;
    }
    out[i] = full / r - std::norm(tr / r) / (n * n);
  }
  return out;
}

/// K_A for a single evolution operator.
inline double psff_of(const ComplexMatrix& u, const SubsystemSpec& a) {
  const auto dim = static_cast<std::size_t>(u.rows());
  if (dim != (std::size_t{1} << a.L())) throw DimensionError("psff: operator dimension != 2^L");
  const std::size_t mask_a = a.mask_a();
  const std::size_t mask_b = (dim - 1) & ~mask_a;
  const std::size_t nb = a.dim_b();
  std::vector<std::size_t> b_index(dim);
  for (std::size_t s = 0; s < dim; ++s) b_index[s] = detail::compress_bits(s, mask_b);
  // reduced(b, b') = sum_a <a b| U |a b'>
  ComplexMatrix reduced = ComplexMatrix::Zero(static_cast<Eigen::Index>(nb), static_cast<Eigen::Index>(nb));
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      if ((i & mask_a) != (j & mask_a)) continue;
      reduced(static_cast<Eigen::Index>(b_index[i]), static_cast<Eigen::Index>(b_index[j])) +=
          u(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  return reduced.squaredNorm() / (static_cast<double>(dim) * static_cast<double>(a.dim_a()));
}

inline std::vector<double> psff_exact(const Spectrum& s, const SubsystemSpec& a, const TimeGrid& grid) {
  detail::check_grid_kind(s, grid);
  std::vector<double> k(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) k[i] = psff_of(evolve(s, grid[i]), a);
  return k;
}

inline double psff_exact(const UnitaryOperator& u, const SubsystemSpec& a) {
  return psff_of(u.matrix(), a);
}

/// CUE ramp-plateau: tau / N^2 up to tau_H = N, then 1/N; 1 at tau = 0.
inline double k_cue_reference(double tau, double n) {
  if (tau < 0.0) throw DomainError("k_cue_reference: tau must be >= 0");
  if (tau == 0.0) return 1.0;
  return tau <= n ? tau / (n * n) : 1.0 / n;
}

/// GOE connected SFF with Heisenberg time t_H; 1 at t = 0.
inline double k_goe_reference(double t, double t_heisenberg, double n) {
  if (t < 0.0 || !(t_heisenberg > 0.0)) throw DomainError("k_goe_reference: need t >= 0, t_H > 0");
  if (t == 0.0) return 1.0;
  const double x = t / t_heisenberg;
  if (x <= 1.0) return (2.0 * x - x * std::log1p(2.0 * x)) / n;
  return (2.0 - x * std::log1p(2.0 / (2.0 * x - 1.0))) / n;
}

inline double k_poisson_reference(double n) {
  if (n < 1.0) throw DomainError("k_poisson_reference: N must be >= 1");
  return 1.0 / n;
}

/// RMT prediction for K_A given K: [N^2 (N_A^2 - 1) K + (N^2 - N_A^2)] / [N_A^2 (N^2 - 1)].
inline double k_psff_rmt(double k, double n, double n_a) {
  if (n <= 1.0) throw DomainError("k_psff_rmt: N must be > 1");
  if (n_a < 1.0 || n_a > n) throw DomainError("k_psff_rmt: need 1 <= N_A <= N");
  const double n2 = n * n;
  const double na2 = n_a * n_a;
  return (n2 * (na2 - 1.0) * k + (n2 - na2)) / (na2 * (n2 - 1.0));
}

/// Floquet: tau_H = N cycles.
inline double heisenberg_time(double n) { return n; }

/// Floquet: tau_H = N. Hamiltonian: 2 pi / mean spacing over the full band.
inline double heisenberg_time(const Spectrum& s) {
  const auto n = s.dim();
  if (s.kind == SpectrumKind::kFloquet) return static_cast<double>(n);
  if (n < 2) throw DomainError("heisenberg_time: need at least two levels");
  const double spacing = (s.eigenvalues.maxCoeff() - s.eigenvalues.minCoeff()) / static_cast<double>(n - 1);
  if (!(spacing > 0.0)) throw DomainError("heisenberg_time: degenerate spectrum");
  return 2.0 * kPi / spacing;
}

}  // namespace sffsim
