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

// Error mitigation, GOE curve fitting, plateau-time extraction, pSFF shift
// and purity / second Renyi entropy estimates.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sffsim/spectral.hpp"

namespace sffsim {

namespace detail {
inline void check_common_grid(const SffCurve& a, const SffCurve& b) {
  if (!(a.grid == b.grid)) throw UsageError("curves are not on a common grid");
}
}  // namespace detail

/// K_em1 = (K_sim / K_dec) K_exp. The standard error of K_exp is scaled by the
/// same factor.
inline SffCurve mitigate_rescale(const SffCurve& k_exp, const SffCurve& k_sim, const SffCurve& k_dec,
                                 double eps_div = 1e-6) {
  detail::check_common_grid(k_exp, k_sim);
  detail::check_common_grid(k_exp, k_dec);
  std::vector<double> mean(k_exp.grid.size()), err(k_exp.grid.size());
  for (std::size_t i = 0; i < mean.size(); ++i) {
    if (!(k_dec.mean[i] > eps_div)) {
      throw DivisionGuardError("mitigate_rescale: K_dec = " + std::to_string(k_dec.mean[i]) +
                                   " below guard at t = " + std::to_string(k_exp.grid[i]),
                               k_exp.grid[i]);
    }
    const double factor = k_sim.mean[i] / k_dec.mean[i];
    mean[i] = factor * k_exp.mean[i];
    err[i] = std::abs(factor) * k_exp.std_error[i];
  }
  return SffCurve::from_mean(k_exp.grid, std::move(mean), std::move(err), k_exp.n_realizations);
}

/// K_em2 = (K - (1 - alpha) / N^2) / alpha, inverting a global depolarizing channel.
inline SffCurve mitigate_depolarization(const SffCurve& k, std::span<const double> alpha, double n,
                                        double eps_alpha = 1e-3) {
  if (alpha.size() != k.grid.size()) throw DimensionError("mitigate_depolarization: alpha length");
  std::vector<double> mean(k.grid.size()), err(k.grid.size());
  const double n2 = n * n;
  for (std::size_t i = 0; i < mean.size(); ++i) {
    if (!(alpha[i] > eps_alpha)) {
      throw DegenerateChannelError("mitigate_depolarization: alpha = " + std::to_string(alpha[i]) +
                                   " at t = " + std::to_string(k.grid[i]));
    }
    mean[i] = (k.mean[i] - (1.0 - alpha[i]) / n2) / alpha[i];
    err[i] = k.std_error[i] / alpha[i];
  }
  return SffCurve::from_mean(k.grid, std::move(mean), std::move(err), k.n_realizations);
}

struct FitOptions {
  double t_start = 48.0;          ///< window start (ns or cycles)
  std::optional<double> t_end;    ///< defaults to the last grid point
  std::optional<double> initial_t_heisenberg;
  int max_iterations = 200;
  bool relative_residuals = false;
};

struct FitResult {
  double mu = 1.0;
  double t_heisenberg = 0.0;
  double residual = 0.0;  ///< RMS misfit over the window
  double window_start = 0.0;
  double window_end = 0.0;
  bool converged = false;
  int iterations = 0;
  /// K'(t) = N K(t) / mu on the full grid.
  std::vector<double> normalized;
};

class FitFailure : public Error {
 public:
  FitFailure(const std::string& what, FitResult best) : Error(what), best_(std::move(best)) {}
  const FitResult& best() const noexcept { return best_; }

 private:
  FitResult best_;
};

namespace detail {

/// N K_GOE as a function of x = t / t_H, and its derivative in x.
inline double goe_shape(double x) {
  if (x <= 1.0) return 2.0 * x - x * std::log1p(2.0 * x);
  return 2.0 - x * std::log1p(2.0 / (2.0 * x - 1.0));
}

inline double goe_shape_derivative(double x) {
  if (x <= 1.0) return 2.0 - std::log1p(2.0 * x) - 2.0 * x / (1.0 + 2.0 * x);
  return -std::log1p(2.0 / (2.0 * x - 1.0)) + 4.0 * x / (4.0 * x * x - 1.0);
}

}  // namespace detail

/// Least-squares fit of mu K_GOE(t; t_H) to the curve mean over the window,
/// by Levenberg-damped Gauss-Newton in (mu, log t_H).
inline FitResult fit_goe(const SffCurve& curve, double n, const FitOptions& options = {}) {
  const auto& grid = curve.grid.points();
  const double t_end = options.t_end.value_or(grid.back());
  std::vector<double> ts, ys;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] >= options.t_start && grid[i] <= t_end) {
      ts.push_back(grid[i]);
      ys.push_back(curve.mean[i]);
    }
  }
  if (ts.size() < 8) throw UsageError("fit_goe: window holds fewer than 8 grid points");
  for (double y : ys) {
    if (!(y > 0.0)) throw UsageError("fit_goe: curve must be positive on the window");
  }
  const auto [lo, hi] = std::minmax_element(ys.begin(), ys.end());
  if (*hi - *lo <= 1e-12 * std::abs(*hi)) throw DegenerateDataError("fit_goe: curve is constant on the window");

  double mu = 1.0;
  double log_th = 0.0;
  if (options.initial_t_heisenberg) {
    if (!(*options.initial_t_heisenberg > 0.0)) throw UsageError("fit_goe: initial t_H must be > 0");
    log_th = std::log(*options.initial_t_heisenberg);
  } else {
    // First window time where the curve reaches 90% of its late-time level.
    const std::size_t tail = std::max<std::size_t>(1, ys.size() / 4);
    double late = 0.0;
    for (std::size_t i = ys.size() - tail; i < ys.size(); ++i) late += ys[i];
    late /= static_cast<double>(tail);
    double guess = ts.back();
    for (std::size_t i = 0; i < ys.size(); ++i) {
      if (ys[i] >= 0.9 * late) {
        guess = ts[i];
        break;
      }
    }
    log_th = std::log(std::max(guess, 1e-12));
  }

  const std::size_t m = ts.size();
  auto weight = [&](std::size_t i) { return options.relative_residuals ? 1.0 / ys[i] : 1.0; };
  auto cost = [&](double mu_, double lt) {
    const double th = std::exp(lt);
    double c = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double r = (ys[i] - mu_ * detail::goe_shape(ts[i] / th) / n) * weight(i);
      c += r * r;
    }
    return c;
  };

  double current = cost(mu, log_th);
  double lambda = 1e-3;
  bool converged = false;
  int iter = 0;
  for (; iter < options.max_iterations && !converged; ++iter) {
    const double th = std::exp(log_th);
    Eigen::Matrix2d jtj = Eigen::Matrix2d::Zero();
    Eigen::Vector2d jtr = Eigen::Vector2d::Zero();
    for (std::size_t i = 0; i < m; ++i) {
      const double x = ts[i] / th;
      const double w = weight(i);
      const Eigen::Vector2d grad(w * detail::goe_shape(x) / n, -w * mu * x * detail::goe_shape_derivative(x) / n);
      const double r = (ys[i] - mu * detail::goe_shape(x) / n) * w;
      jtj += grad * grad.transpose();
      jtr += grad * r;
    }
    const double scale = jtj.trace();
    if (!(scale > 0.0) || std::abs(jtj.determinant()) <= 1e-14 * scale * scale) {
      throw DegenerateDataError("fit_goe: singular normal equations");
    }
    bool accepted = false;
    while (!accepted && lambda < 1e12) {
      Eigen::Matrix2d damped = jtj;
      damped.diagonal() *= 1.0 + lambda;
      const Eigen::Vector2d step = damped.ldlt().solve(jtr);
      const double trial = cost(mu + step[0], log_th + step[1]);
      if (trial <= current) {
        mu += step[0];
        log_th += step[1];
        current = trial;
        lambda = std::max(lambda / 10.0, 1e-12);
        accepted = true;
        converged = std::max(std::abs(step[0]) / std::max(std::abs(mu), 1e-300), std::abs(step[1])) < 1e-6;
      } else {
        lambda *= 10.0;
      }
    }
    // No descent direction left at any damping: the iterate is stationary.
    if (!accepted) converged = true;
  }

  FitResult result;
  result.mu = mu;
  result.t_heisenberg = std::exp(log_th);
  result.window_start = ts.front();
  result.window_end = ts.back();
  result.iterations = iter;
  result.converged = converged;
  double ss = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = ys[i] - mu * detail::goe_shape(ts[i] / result.t_heisenberg) / n;
    ss += r * r;
  }
  result.residual = std::sqrt(ss / static_cast<double>(m));
  result.normalized.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) result.normalized[i] = n * curve.mean[i] / mu;
  if (!converged) throw FitFailure("fit_goe: no convergence after " + std::to_string(iter) + " iterations", result);
  if (!(result.t_heisenberg > 0.0) || !std::isfinite(result.t_heisenberg)) {
    throw FitFailure("fit_goe: non-finite Heisenberg time", result);
  }
  return result;
}

enum class PlateauMethod { kGoeFit, kThreshold };

struct PlateauEstimate {
  double t_plateau = 0.0;
  PlateauMethod method = PlateauMethod::kThreshold;
  double plateau_value = 0.0;
};

inline constexpr double kPlateauBand = 0.2;
inline constexpr double kPlateauWindowFraction = 0.25;

/// goe_fit: t_p = fitted t_H, plateau value mu / N.
/// threshold: plateau value = mean over the final 25% of the grid; t_p = the
/// earliest grid time after which every point stays within 20% of it.
inline PlateauEstimate plateau_time(const SffCurve& curve, double n, PlateauMethod method,
                                    const FitOptions& fit_options = {}) {
  const auto& grid = curve.grid.points();
  if (method == PlateauMethod::kGoeFit) {
    const FitResult fit = fit_goe(curve, n, fit_options);
    if (fit.t_heisenberg < grid.front() || fit.t_heisenberg > grid.back()) {
      throw NoPlateauError("plateau_time: fitted Heisenberg time lies outside the grid");
    }
    return {fit.t_heisenberg, method, fit.mu / n};
  }
  const std::size_t count = grid.size();
  const auto tail = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(kPlateauWindowFraction * static_cast<double>(count))));
  double plateau = 0.0;
  for (std::size_t i = count - tail; i < count; ++i) plateau += curve.mean[i];
  plateau /= static_cast<double>(tail);
  if (!(plateau > 0.0)) throw NoPlateauError("plateau_time: nonpositive plateau value");
  // Scan backwards for the last point outside the band.
  std::size_t first_inside = count;
  for (std::size_t i = count; i-- > 0;) {
    if (std::abs(curve.mean[i] - plateau) > kPlateauBand * plateau) break;
    first_inside = i;
  }
  if (first_inside == count) throw NoPlateauError("plateau_time: no qualifying plateau onset");
  return {grid[first_inside], method, plateau};
}

struct ShiftEstimate {
  double shift = 0.0;      ///< mean of K_A - K over the window
  double reference = 0.0;  ///< 1 / N_A^2
  std::size_t points = 0;
};

inline ShiftEstimate psff_shift(const SffCurve& k_a, const SffCurve& k, double n_a, double t_start, double t_end) {
  detail::check_common_grid(k_a, k);
  const auto& grid = k.grid.points();
  if (t_start > t_end || t_start < grid.front() || t_end > grid.back()) {
    throw UsageError("psff_shift: window outside the grid");
  }
  ShiftEstimate out{0.0, 1.0 / (n_a * n_a), 0};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < t_start || grid[i] > t_end) continue;
    out.shift += k_a.mean[i] - k.mean[i];
    ++out.points;
  }
  if (out.points == 0) throw UsageError("psff_shift: window holds no grid points");
  out.shift /= static_cast<double>(out.points);
  return out;
}

struct PurityEstimate {
  int L_A = 0;
  double P_tilde_B = 0.0;
  double S2_tilde = 0.0;  ///< -ln P_tilde_B
  double eta = 1.2;
  double t_eval = 0.0;    ///< grid point actually used
  double std_error = 0.0; ///< of P_tilde_B
};

/// P_B ~ K_A(eta t_H) N_A at the grid point nearest eta t_H.
inline PurityEstimate purity_estimate(const SffCurve& k_a, int size_a, double t_heisenberg, double eta = 1.2) {
  const auto& grid = k_a.grid.points();
  const double target = eta * t_heisenberg;
  if (grid.back() < target) {
    throw UsageError("purity_estimate: grid ends at " + std::to_string(grid.back()) + " before eta t_H = " +
                     std::to_string(target));
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (std::abs(grid[i] - target) < std::abs(grid[best] - target)) best = i;
  }
  const double n_a = std::ldexp(1.0, size_a);
  PurityEstimate p;
  p.L_A = size_a;
  p.eta = eta;
  p.t_eval = grid[best];
  p.P_tilde_B = k_a.mean[best] * n_a;
  p.S2_tilde = -std::log(p.P_tilde_B);
  p.std_error = k_a.std_error[best] * n_a;
  return p;
}

}  // namespace sffsim
