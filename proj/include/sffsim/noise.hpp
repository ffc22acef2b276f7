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
/// Lindblad evolution with amplitude-damping and dephasing jump operators.
///
/// The master equation is integrated in the form
///   drho/dt = -i[H, rho] + sum_k g (C_k rho C_k^dag) - c {C_k^dag C_k, rho}
/// with (g, c) = (2, 1) for LindbladConvention::kPaper and (1, 1/2) for the
/// textbook kHalved form. Under kPaper an excited population decays as
/// exp(-2 t / T1).
///
/// Jump operators per site m:
///   C_1,m = sqrt(1/T1_m) |0><1|_m   (relaxation of the excited state |1>)
///   C_2,m = sqrt(2/T2_m) |1><1|_m   (dephasing)

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "sffsim/linalg.hpp"
#include "sffsim/protocol.hpp"

namespace sffsim {

struct NoiseParams {
  std::vector<double> T1;  ///< ns, per site
  std::vector<double> T2;  ///< ns, per site (spin echo)

  void validate(int L) const {
    if (static_cast<int>(T1.size()) != L || static_cast<int>(T2.size()) != L) {
      throw ConfigError("noise: need one T1 and one T2 per site");
    }
    for (std::size_t m = 0; m < T1.size(); ++m) {
      if (!(T1[m] > 0.0) || !(T2[m] > 0.0)) throw ConfigError("noise: T1 and T2 must be > 0");
    }
  }

  /// Per-qubit lifetimes of the five-qubit processors, first L sites.
  /// Processor 1 averages T1 = 90.2 us, T2 = 14.0 us; processor 2 averages
  /// T1 = 24.9 us, T2 = 15.3 us.
  static NoiseParams processor(int which, int L) {
    static constexpr double t1_p1[] = {84.5, 51.9, 119.7, 114.9, 79.8};
    static constexpr double t2_p1[] = {17.0, 13.4, 12.9, 13.5, 13.4};
    static constexpr double t1_p2[] = {24.0, 26.5, 30.7, 17.4, 25.8};
    static constexpr double t2_p2[] = {16.5, 19.5, 13.3, 10.8, 16.6};
    if (which != 1 && which != 2) throw ConfigError("noise: processor must be 1 or 2");
    if (L < 1 || L > 5) throw ConfigError("noise: bundled tables cover 1..5 qubits");
    NoiseParams p;
    for (int m = 0; m < L; ++m) {
      p.T1.push_back(1e3 * (which == 1 ? t1_p1[m] : t1_p2[m]));
      p.T2.push_back(1e3 * (which == 1 ? t2_p1[m] : t2_p2[m]));
    }
    return p;
  }

  static NoiseParams uniform(int L, double t1_ns, double t2_ns) {
    NoiseParams p;
    p.T1.assign(static_cast<std::size_t>(L), t1_ns);
    p.T2.assign(static_cast<std::size_t>(L), t2_ns);
    return p;
  }
};

/// Parses "site T1_ns T2_ns" rows (whitespace or comma separated, '#'
/// comments) and keeps sites 1..L.
inline NoiseParams parse_noise_table(const std::string& text, int L) {
  NoiseParams p;
  p.T1.assign(static_cast<std::size_t>(L), 0.0);
  p.T2.assign(static_cast<std::size_t>(L), 0.0);
  std::vector<bool> seen(static_cast<std::size_t>(L), false);
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    int site;
    double t1, t2;
    if (!(row >> site)) continue;
    if (!(row >> t1 >> t2)) throw ConfigError("noise table line " + std::to_string(line_no) + ": expected site T1_ns T2_ns");
    if (site < 1) throw ConfigError("noise table line " + std::to_string(line_no) + ": bad site");
    if (site > L) continue;
    p.T1[static_cast<std::size_t>(site - 1)] = t1;
    p.T2[static_cast<std::size_t>(site - 1)] = t2;
    seen[static_cast<std::size_t>(site - 1)] = true;
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw ConfigError("noise table does not cover sites 1.." + std::to_string(L));
  }
  p.validate(L);
  return p;
}

inline NoiseParams load_noise_table(const std::string& path, int L) {
  std::ifstream f(path);
  if (!f) throw IoError(path, "cannot open noise table");
  std::stringstream buf;
  buf << f.rdbuf();
  return parse_noise_table(buf.str(), L);
}

/// 2L operators: C_1,m for m = 1..L, then C_2,m for m = 1..L.
inline std::vector<ComplexMatrix> jump_operators(const NoiseParams& noise, int L) {
  noise.validate(L);
  ComplexMatrix lower = ComplexMatrix::Zero(2, 2);
  lower(0, 1) = 1.0;
  ComplexMatrix excited = ComplexMatrix::Zero(2, 2);
  excited(1, 1) = 1.0;
  std::vector<ComplexMatrix> out;
  out.reserve(2 * static_cast<std::size_t>(L));
  for (int m = 1; m <= L; ++m) {
    out.push_back(std::sqrt(1.0 / noise.T1[static_cast<std::size_t>(m - 1)]) * embed_site_operator(lower, m, L));
  }
  for (int m = 1; m <= L; ++m) {
    out.push_back(std::sqrt(2.0 / noise.T2[static_cast<std::size_t>(m - 1)]) * embed_site_operator(excited, m, L));
  }
  return out;
}

class DensityMatrix {
 public:
  /// Checks Hermiticity (1e-10), unit trace (1e-8) and min eigenvalue >= -positivity_tolerance.
  explicit DensityMatrix(ComplexMatrix m, double positivity_tolerance = 1e-8) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() == 0) throw DimensionError("DensityMatrix: must be square");
    if (!m_.allFinite()) throw InvalidStateError("DensityMatrix: non-finite entry");
    if (max_norm(m_ - m_.adjoint()) > 1e-10) throw InvalidStateError("DensityMatrix: not Hermitian");
    if (std::abs(m_.trace() - Complex(1.0)) > 1e-8) throw InvalidStateError("DensityMatrix: trace != 1");
    if (min_eigenvalue() < -positivity_tolerance) throw InvalidStateError("DensityMatrix: not positive");
  }

  static DensityMatrix pure(const ComplexVector& psi) {
    return DensityMatrix(psi * psi.adjoint());
  }

  const ComplexMatrix& matrix() const noexcept { return m_; }
  Eigen::Index dim() const noexcept { return m_.rows(); }
  double purity() const { return m_.cwiseAbs2().sum(); }
  double min_eigenvalue() const {
    const Eigen::MatrixXcd herm = 0.5 * (m_ + m_.adjoint());
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(herm, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  }

 private:
  ComplexMatrix m_;
};

/// Piecewise-constant Hamiltonian; the segment list repeats periodically.
struct PiecewiseHamiltonian {
  struct Segment {
    HermitianOperator h;
    double duration;  ///< ns
  };
  std::vector<Segment> segments;

  static PiecewiseHamiltonian constant(HermitianOperator h) {
    return PiecewiseHamiltonian{{Segment{std::move(h), std::numeric_limits<double>::infinity()}}};
  }

  double period() const {
    double t = 0.0;
    for (const auto& s : segments) t += s.duration;
    return t;
  }
};

enum class LindbladConvention { kPaper, kHalved };

struct LindbladOptions {
  double dt = 0.5;  ///< ns
  LindbladConvention convention = LindbladConvention::kPaper;
};

namespace detail {

using SparseComplex = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;

/// D(rho) = g sum_k C_k rho C_k^dag - c {sum_k C_k^dag C_k, rho}
struct Dissipator {
  ComplexMatrix anti;  ///< c sum_k C_k^dag C_k
  std::vector<SparseComplex> jumps;
  std::vector<SparseComplex> jumps_adj;
  double gain = 0.0;

  ComplexMatrix operator()(const ComplexMatrix& rho) const {
    ComplexMatrix out = -(anti * rho) - rho * anti;
    for (std::size_t k = 0; k < jumps.size(); ++k) {
      const ComplexMatrix left = jumps[k] * rho;
      out.noalias() += gain * (left * jumps_adj[k]);
    }
    return out;
  }
};

inline Dissipator make_dissipator(Eigen::Index dim, std::span<const ComplexMatrix> jumps,
                                  LindbladConvention convention) {
  const bool paper = convention == LindbladConvention::kPaper;
  Dissipator d{ComplexMatrix::Zero(dim, dim), {}, {}, paper ? 2.0 : 1.0};
  for (const ComplexMatrix& c : jumps) {
    if (c.rows() != dim || c.cols() != dim) throw DimensionError("lindblad: jump operator dimension");
    d.anti += (paper ? 1.0 : 0.5) * (c.adjoint() * c);
    d.jumps.push_back(c.sparseView(0.0, 0.0));
    d.jumps_adj.push_back(ComplexMatrix(c.adjoint()).sparseView(0.0, 0.0));
  }
  return d;
}

/// One RK4 step in the interaction picture of H. The coherent part is
/// propagated exactly by u_half = exp(-i H h / 2); RK4 handles only the
/// dissipator, so the truncation error scales with the decay rates.
inline void rk4ip_step(const Dissipator& d, const ComplexMatrix& u_half, ComplexMatrix& rho, double h) {
  const ComplexMatrix u_half_adj = u_half.adjoint();
  auto propagate = [&](const ComplexMatrix& m) -> ComplexMatrix { return u_half * m * u_half_adj; };
  const ComplexMatrix rho_i = propagate(rho);
  const ComplexMatrix k1 = propagate(d(rho));
  const ComplexMatrix k2 = d(rho_i + 0.5 * h * k1);
  const ComplexMatrix k3 = d(rho_i + 0.5 * h * k2);
  const ComplexMatrix k4 = d(propagate(rho_i + h * k3));
  rho = propagate(rho_i + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3)) + (h / 6.0) * k4;
}

}  // namespace detail

/// Fixed-step fourth-order Runge-Kutta over [0, t_end] in the interaction
/// picture of the piecewise-constant Hamiltonian, cycling through the
/// segments. Each (possibly truncated) segment is split into
/// ceil(duration / dt) equal steps so that segment boundaries fall on step
/// boundaries.
inline DensityMatrix lindblad_integrate(const DensityMatrix& rho0, const PiecewiseHamiltonian& h,
                                        std::span<const ComplexMatrix> jumps, double t_end,
                                        const LindbladOptions& options = {}) {
  if (!(options.dt > 0.0)) throw UsageError("lindblad_integrate: dt must be > 0");
  if (!(t_end >= 0.0)) throw UsageError("lindblad_integrate: t_end must be >= 0");
  if (h.segments.empty()) throw UsageError("lindblad_integrate: no Hamiltonian segments");
  for (const auto& seg : h.segments) {
    if (!(seg.duration > 0.0)) throw UsageError("lindblad_integrate: segment durations must be > 0");
    if (options.dt > seg.duration) throw UsageError("lindblad_integrate: dt exceeds a segment duration");
    if (seg.h.dim() != rho0.dim()) throw DimensionError("lindblad_integrate: Hamiltonian dimension");
  }
  const detail::Dissipator dissipator = detail::make_dissipator(rho0.dim(), jumps, options.convention);
  std::vector<Spectrum> spectra;
  for (const auto& seg : h.segments) spectra.push_back(eigh(seg.h));

  // Half-step propagators, cached per segment for the full-segment step size.
  std::vector<double> cached_step(h.segments.size(), 0.0);
  std::vector<ComplexMatrix> cached_u(h.segments.size());

  ComplexMatrix rho = rho0.matrix();
  double remaining = t_end;
  for (std::size_t k = 0; remaining > 0.0; k = (k + 1) % h.segments.size()) {
    // Guard against a remainder that is only rounding noise.
    if (remaining < 1e-9 * std::max(1.0, t_end)) break;
    const double span = std::min(h.segments[k].duration, remaining);
    const auto steps = std::max(1L, static_cast<long>(std::ceil(span / options.dt - 1e-9)));
    const double step = span / static_cast<double>(steps);
    if (cached_step[k] != step) {
      cached_u[k] = evolve(spectra[k], 0.5 * step);
      cached_step[k] = step;
    }
    for (long s = 0; s < steps; ++s) detail::rk4ip_step(dissipator, cached_u[k], rho, step);
    remaining -= span;
  }
  if (!rho.allFinite()) throw StepSizeError("lindblad_integrate: integration diverged; reduce dt");
  rho = 0.5 * (rho + rho.adjoint()).eval();
  const Eigen::MatrixXcd dense = rho;
  const double min_eig =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(dense, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  if (min_eig < -1e-6) {
    throw StepSizeError("lindblad_integrate: density matrix lost positivity (min eigenvalue " +
                        std::to_string(min_eig) + "); reduce dt");
  }
  return DensityMatrix(std::move(rho), 1e-6);
}

/// Twirled |0..0><0..0| evolved with decoherence, then inverse-twirled.
/// Clifford gates and readout are instantaneous and noiseless.
inline DensityMatrix noisy_final_state(std::span<const int> cliffords, const PiecewiseHamiltonian& h,
                                       const NoiseParams& noise, double t_end,
                                       const LindbladOptions& options = {}) {
  const int L = static_cast<int>(cliffords.size());
  if (h.segments.empty() || h.segments.front().h.dim() != (Eigen::Index{1} << L)) {
    throw DimensionError("noisy run: Hamiltonian dimension does not match 2^L");
  }
  detail::check_cliffords(cliffords, Eigen::Index{1} << L);
  const auto jumps = jump_operators(noise, L);
  const DensityMatrix start = DensityMatrix::pure(detail::twirled_initial_state(cliffords));
  const DensityMatrix evolved = lindblad_integrate(start, h, jumps, t_end, options);
  // rho -> u^dag rho u, applied column-wise then row-wise.
  ComplexMatrix rho = evolved.matrix();
  for (Eigen::Index c = 0; c < rho.cols(); ++c) {
    ComplexVector col = rho.col(c);
    detail::apply_inverse_twirl(col, cliffords);
    rho.col(c) = col;
  }
  ComplexMatrix rho_t = rho.adjoint();
  for (Eigen::Index c = 0; c < rho_t.cols(); ++c) {
    ComplexVector col = rho_t.col(c);
    detail::apply_inverse_twirl(col, cliffords);
    rho_t.col(c) = col;
  }
  return DensityMatrix(rho_t.adjoint(), 1e-6);
}

inline OutcomeDistribution outcome_from_state(const DensityMatrix& rho) {
  OutcomeDistribution d;
  d.mode = OutcomeMode::kExact;
  d.L = static_cast<int>(std::countr_zero(static_cast<std::size_t>(rho.dim())));
  d.probabilities.resize(static_cast<std::size_t>(rho.dim()));
  for (Eigen::Index s = 0; s < rho.dim(); ++s) {
    d.probabilities[static_cast<std::size_t>(s)] = std::max(0.0, rho.matrix()(s, s).real());
  }
  return d;
}

inline OutcomeDistribution simulate_run_noisy(std::span<const int> cliffords, const PiecewiseHamiltonian& h,
                                              const NoiseParams& noise, double t_end,
                                              const LindbladOptions& options = {}) {
  return outcome_from_state(noisy_final_state(cliffords, h, noise, t_end, options));
}

/// alpha = sqrt((N Tr rho^2 - 1) / (N - 1)), the surviving fraction of a
/// global depolarizing channel with the same purity.
inline double depolarization_alpha(const DensityMatrix& rho, double n) {
  if (n < 2.0) throw DomainError("depolarization_alpha: N must be >= 2");
  const double radicand = (n * rho.purity() - 1.0) / (n - 1.0);
  if (radicand < -1e-10) throw InvalidStateError("depolarization_alpha: purity below 1/N");
  return std::min(1.0, std::sqrt(std::max(0.0, radicand)));
}

}  // namespace sffsim
