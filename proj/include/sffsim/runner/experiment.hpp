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
/// Ensemble execution. Work is partitioned by realization id; every worker
/// owns a realization end to end and writes into its own slot, and all
/// reductions run afterwards in realization order. Exact-mode results are
/// therefore bit-identical for any worker count.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "sffsim/analysis.hpp"
#include "sffsim/models.hpp"
#include "sffsim/noise.hpp"
#include "sffsim/protocol.hpp"
#include "sffsim/runner/config.hpp"
#include "sffsim/spectral.hpp"

#ifndef SFFSIM_VERSION
#define SFFSIM_VERSION "0.1.0"
#endif

namespace sffsim {

struct NamedCurve {
  std::string id;
  SffCurve curve;
};

struct AnalysisRow {
  std::string analysis;
  std::string curve_id;
  std::string quantity;
  double value = 0.0;
};

struct RunManifest {
  std::string software_version = SFFSIM_VERSION;
  std::string config_echo;
  std::uint64_t base_seed = 0;
  int R = 0;
  double wall_seconds = 0.0;
  std::string lindblad_convention;
  bool j_two_pi = true;
  std::vector<std::string> notes;  ///< analysis steps that could not run
  std::vector<std::pair<std::string, std::string>> digests;  ///< file name, digest
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<NamedCurve> curves;
  std::vector<AnalysisRow> analyses;
  RunManifest manifest;

  const SffCurve& curve(const std::string& id) const {
    for (const auto& c : curves) {
      if (c.id == id) return c.curve;
    }
    throw UsageError("no curve named '" + id + "'");
  }

  bool has_curve(const std::string& id) const {
    return std::any_of(curves.begin(), curves.end(), [&](const NamedCurve& c) { return c.id == id; });
  }

  std::optional<double> analysis(const std::string& name, const std::string& curve_id,
                                 const std::string& quantity) const {
    for (const auto& a : analyses) {
      if (a.analysis == name && a.curve_id == curve_id && a.quantity == quantity) return a.value;
    }
    return std::nullopt;
  }
};

/// A module error raised while processing one realization.
class RealizationError : public Error {
 public:
  RealizationError(std::uint64_t realization_id, long time_index, const std::string& what)
      : Error("realization " + std::to_string(realization_id) +
              (time_index >= 0 ? ", time index " + std::to_string(time_index) : std::string()) + ": " + what),
        realization_id_(realization_id),
        time_index_(time_index) {}
  std::uint64_t realization_id() const noexcept { return realization_id_; }
  long time_index() const noexcept { return time_index_; }

 private:
  std::uint64_t realization_id_;
  long time_index_;
};

namespace detail {

struct RealizationOutput {
  std::vector<double> sff;
  std::vector<Complex> trace;
  std::vector<std::vector<double>> psff;
  std::vector<double> sff_est;
  std::vector<std::vector<double>> psff_est;
  std::vector<double> sff_dec;
  std::vector<std::vector<double>> psff_dec;
  std::vector<double> sff_exp;
  std::vector<std::vector<double>> psff_exp;
  std::vector<double> alpha;
  double t_heisenberg = 0.0;
};

inline RealizationOutput run_realization(const ExperimentConfig& c, std::uint64_t rid) {
  long time_index = -1;
  try {
    const SeededEnsembleSpec ensemble{c.base_seed, c.R};
    const TimeGrid& grid = c.grid;
    const std::size_t g = grid.size();
    const std::size_t n_sub = c.subsystems.size();
    const double n = static_cast<double>(c.dim());

    Spectrum spectrum;
    std::optional<PiecewiseHamiltonian> schedule;
    double ns_per_unit = 1.0;
    if (c.model == ModelKind::kFloquet) {
      const auto params = c.floquet_params();
      const auto disorder = sample_disorder(c.W, c.L, {Axis::kX, Axis::kY, Axis::kZ}, ensemble, rid);
      spectrum = eigenphases(build_floquet_unitary(params, disorder));
      ns_per_unit = c.T;
      if (c.noise) {
        schedule = PiecewiseHamiltonian{{{build_h_alpha(params, disorder, Axis::kX), c.T / 3.0},
                                         {build_h_alpha(params, disorder, Axis::kZ), c.T / 3.0},
                                         {build_h_alpha(params, disorder, Axis::kY), c.T / 3.0}}};
      }
    } else {
      const auto disorder = sample_disorder(c.W, c.L, {Axis::kZ}, ensemble, rid);
      auto h = build_static_hamiltonian(c.static_params(), disorder);
      spectrum = eigh(h);
      if (c.noise) schedule = PiecewiseHamiltonian::constant(std::move(h));
    }

    RealizationOutput out;
    out.t_heisenberg = heisenberg_time(spectrum);
    out.sff = sff_exact(spectrum, grid);
    out.trace.resize(g);
    for (std::size_t i = 0; i < g; ++i) out.trace[i] = trace_at(spectrum, grid[i]);

    const bool evolve_needed = n_sub > 0 || c.protocol || c.noise;
    if (!evolve_needed) return out;

    auto sized = [&](bool on) { return on ? std::vector<std::vector<double>>(n_sub, std::vector<double>(g)) : std::vector<std::vector<double>>{}; };
    out.psff = sized(true);
    if (c.protocol) {
      out.sff_est.resize(g);
      out.psff_est = sized(true);
    }
    if (c.noise) {
      out.sff_dec.resize(g);
      out.alpha.resize(g);
      out.psff_dec = sized(true);
      if (c.mode.shots) {
        out.sff_exp.resize(g);
        out.psff_exp = sized(true);
      }
    }

    for (std::size_t i = 0; i < g; ++i) {
      time_index = static_cast<long>(i);
      const ComplexMatrix ut = evolve(spectrum, grid[i]);
      for (std::size_t k = 0; k < n_sub; ++k) out.psff[k][i] = psff_of(ut, c.subsystems[k]);
      if (!c.protocol && !c.noise) continue;

      const auto cliffords = draw_cliffords(c.base_seed, rid, static_cast<std::uint32_t>(i), c.L);
      if (c.protocol) {
        OutcomeDistribution dist = detail::simulate_run_exact(ut, cliffords);
        if (c.mode.shots) {
          CounterStream rng(c.base_seed, rid, StreamTag::kShots, static_cast<std::uint32_t>(i));
          dist = sample_shots(dist, c.mode.n_shots, rng);
        }
        out.sff_est[i] = sff_estimator_term(dist);
        for (std::size_t k = 0; k < n_sub; ++k) out.psff_est[k][i] = psff_estimator_term(dist, c.subsystems[k]);
      }
      if (c.noise) {
        const DensityMatrix rho =
            noisy_final_state(cliffords, *schedule, c.noise_params, grid[i] * ns_per_unit, c.lindblad);
        out.alpha[i] = depolarization_alpha(rho, n);
        const OutcomeDistribution dist = outcome_from_state(rho);
        out.sff_dec[i] = sff_estimator_term(dist);
        for (std::size_t k = 0; k < n_sub; ++k) out.psff_dec[k][i] = psff_estimator_term(dist, c.subsystems[k]);
        if (c.mode.shots) {
          CounterStream rng(c.base_seed, rid, StreamTag::kNoisyShots, static_cast<std::uint32_t>(i));
          const OutcomeDistribution sampled = sample_shots(dist, c.mode.n_shots, rng);
          out.sff_exp[i] = sff_estimator_term(sampled);
          for (std::size_t k = 0; k < n_sub; ++k) out.psff_exp[k][i] = psff_estimator_term(sampled, c.subsystems[k]);
        }
      }
    }
    return out;
  } catch (const RealizationError&) {
    throw;
  } catch (const Error& e) {
    throw RealizationError(rid, time_index, e.what());
  }
}

inline std::vector<RealizationOutput> run_ensemble(const ExperimentConfig& c) {
  const auto R = static_cast<std::size_t>(c.R);
  std::vector<RealizationOutput> outputs(R);
  std::vector<std::exception_ptr> errors(R);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t r; (r = next.fetch_add(1)) < R;) {
      try {
        outputs[r] = run_realization(c, r);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  const auto n_threads = std::min<std::size_t>(static_cast<std::size_t>(std::max(1, c.workers)), R);
  if (n_threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return outputs;
}

template <class Get>
SffCurve collect(const ExperimentConfig& c, const std::vector<RealizationOutput>& outputs, Get get) {
  Eigen::MatrixXd values(static_cast<Eigen::Index>(outputs.size()), static_cast<Eigen::Index>(c.grid.size()));
  for (std::size_t r = 0; r < outputs.size(); ++r) {
    const std::vector<double>& row = get(outputs[r]);
    for (std::size_t i = 0; i < row.size(); ++i) values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) = row[i];
  }
  return SffCurve::from_realizations(c.grid, std::move(values));
}

/// Window over which K_A - K is averaged: [2N, 4N] cycles for Floquet grids,
/// the final 25% of the grid otherwise.
inline std::pair<double, double> shift_window(const ExperimentConfig& c) {
  const auto& p = c.grid.points();
  double lo, hi = p.back();
  if (c.grid.kind() == GridKind::kFloquetCycles) {
    lo = std::min(2.0 * static_cast<double>(c.dim()), p.back());
    hi = std::min(4.0 * static_cast<double>(c.dim()), p.back());
  } else {
    const auto tail = static_cast<std::size_t>(std::ceil(kPlateauWindowFraction * static_cast<double>(p.size())));
    lo = p[p.size() - std::max<std::size_t>(1, tail)];
  }
  return {c.shift_t_start.value_or(lo), c.shift_t_end.value_or(hi)};
}

inline void run_analyses(ExperimentResult& result, const std::vector<RealizationOutput>& outputs) {
  const ExperimentConfig& c = result.config;
  const double n = static_cast<double>(c.dim());
  auto row = [&](std::string a, std::string id, std::string q, double v) {
    result.analyses.push_back({std::move(a), std::move(id), std::move(q), v});
  };
  auto attempt = [&](const std::string& what, auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      result.manifest.notes.push_back(what + ": " + e.what());
    }
  };

  double t_h = 0.0;
  for (const auto& o : outputs) t_h += o.t_heisenberg;
  t_h /= static_cast<double>(outputs.size());
  row("heisenberg_time", "sff", "t_H", t_h);

  const SffCurve& sff = result.curve("sff");
  attempt("plateau_threshold(sff)", [&] {
    const auto p = plateau_time(sff, n, PlateauMethod::kThreshold);
    row("plateau_threshold", "sff", "t_p", p.t_plateau);
    row("plateau_threshold", "sff", "plateau_value", p.plateau_value);
  });

  if (c.model == ModelKind::kFloquet) {
    double ss = 0.0;
    int count = 0;
    for (std::size_t i = 0; i < sff.grid.size(); ++i) {
      const double tau = sff.grid[i];
      if (tau < 2.0 || tau > 3.0 * n) continue;
      const double ref = k_cue_reference(tau, n);
      ss += std::pow((sff.mean[i] - ref) / ref, 2);
      ++count;
    }
    if (count > 0) row("cue_comparison", "sff", "rms_relative_error", std::sqrt(ss / count));
  } else {
    FitOptions fit;
    fit.t_start = c.fit_t_start;
    fit.t_end = c.fit_t_end;
    fit.initial_t_heisenberg = t_h;
    std::vector<std::string> targets{"sff_connected"};
    if (result.has_curve("sff_em1")) targets.push_back("sff_em1");
    for (const auto& id : targets) {
      attempt("fit_goe(" + id + ")", [&] {
        const FitResult f = fit_goe(result.curve(id), n, fit);
        row("fit_goe", id, "mu", f.mu);
        row("fit_goe", id, "t_H", f.t_heisenberg);
        row("fit_goe", id, "residual", f.residual);
        row("fit_goe", id, "window_start", f.window_start);
        row("fit_goe", id, "window_end", f.window_end);
        row("fit_goe", id, "iterations", f.iterations);
        row("fit_goe", id, "converged", f.converged ? 1.0 : 0.0);
      });
    }
    attempt("plateau_goe_fit(sff_connected)", [&] {
      const auto p = plateau_time(result.curve("sff_connected"), n, PlateauMethod::kGoeFit, fit);
      row("plateau_goe_fit", "sff_connected", "t_p", p.t_plateau);
      row("plateau_goe_fit", "sff_connected", "plateau_value", p.plateau_value);
    });
  }

  const auto [w0, w1] = shift_window(c);
  const double purity_t_h = c.model == ModelKind::kFloquet ? n : t_h;
  for (const auto& a : c.subsystems) {
    const std::string id = "psff_" + a.label();
    const SffCurve& ka = result.curve(id);
    attempt("psff_shift(" + id + ")", [&] {
      const auto s = psff_shift(ka, sff, static_cast<double>(a.dim_a()), w0, w1);
      row("psff_shift", id, "shift", s.shift);
      row("psff_shift", id, "reference", s.reference);
      row("psff_shift", id, "rmt_prediction", k_psff_rmt(1.0 / n, n, static_cast<double>(a.dim_a())) - 1.0 / n);
    });
    attempt("purity(" + id + ")", [&] {
      const auto p = purity_estimate(ka, a.size_a(), purity_t_h, c.eta);
      row("purity", id, "L_A", p.L_A);
      row("purity", id, "t_eval", p.t_eval);
      row("purity", id, "P_tilde_B", p.P_tilde_B);
      row("purity", id, "P_tilde_B_stderr", p.std_error);
      row("purity", id, "S2_tilde", p.S2_tilde);
    });
  }
}

}  // namespace detail

inline ExperimentResult run_experiment(const ExperimentConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  ExperimentResult result;
  result.config = config;
  const auto outputs = detail::run_ensemble(config);
  const double n = static_cast<double>(config.dim());
  const std::size_t g = config.grid.size();

  auto add = [&](std::string id, SffCurve curve) { result.curves.push_back({std::move(id), std::move(curve)}); };
  using Out = detail::RealizationOutput;

  add("sff", detail::collect(config, outputs, [](const Out& o) -> const std::vector<double>& { return o.sff; }));
  {
    std::vector<double> connected(g);
    const double r = static_cast<double>(outputs.size());
    const SffCurve& full = result.curve("sff");
    for (std::size_t i = 0; i < g; ++i) {
      Complex tr = 0.0;
      for (const auto& o : outputs) tr += o.trace[i];
      connected[i] = full.mean[i] - std::norm(tr / r) / (n * n);
    }
    add("sff_connected", SffCurve::from_mean(config.grid, std::move(connected), full.std_error, config.R));
  }
  for (std::size_t k = 0; k < config.subsystems.size(); ++k) {
    add("psff_" + config.subsystems[k].label(),
        detail::collect(config, outputs, [k](const Out& o) -> const std::vector<double>& { return o.psff[k]; }));
  }
  if (config.protocol) {
    add("sff_est", detail::collect(config, outputs, [](const Out& o) -> const std::vector<double>& { return o.sff_est; }));
    for (std::size_t k = 0; k < config.subsystems.size(); ++k) {
      add("psff_est_" + config.subsystems[k].label(),
          detail::collect(config, outputs, [k](const Out& o) -> const std::vector<double>& { return o.psff_est[k]; }));
    }
  }
  if (config.noise) {
    add("sff_dec", detail::collect(config, outputs, [](const Out& o) -> const std::vector<double>& { return o.sff_dec; }));
    add("alpha", detail::collect(config, outputs, [](const Out& o) -> const std::vector<double>& { return o.alpha; }));
    for (std::size_t k = 0; k < config.subsystems.size(); ++k) {
      add("psff_dec_" + config.subsystems[k].label(),
          detail::collect(config, outputs, [k](const Out& o) -> const std::vector<double>& { return o.psff_dec[k]; }));
    }
    if (config.mode.shots) {
      add("sff_exp", detail::collect(config, outputs, [](const Out& o) -> const std::vector<double>& { return o.sff_exp; }));
      for (std::size_t k = 0; k < config.subsystems.size(); ++k) {
        add("psff_exp_" + config.subsystems[k].label(),
            detail::collect(config, outputs, [k](const Out& o) -> const std::vector<double>& { return o.psff_exp[k]; }));
      }
    }
    // The emulated experiment is the shot-sampled noisy run when shots are on,
    // and the noisy exact-probability run otherwise.
    std::vector<std::string> families{""};
    for (const auto& a : config.subsystems) families.push_back(a.label());
    for (const auto& label : families) {
      const std::string base = label.empty() ? "sff" : "psff";
      const std::string sep = label.empty() ? "" : "_";
      const SffCurve exp_curve = result.curve((config.mode.shots ? base + "_exp" : base + "_dec") + sep + label);
      const SffCurve& sim = result.curve(label.empty() ? "sff" : "psff_" + label);
      const SffCurve& dec = result.curve(base + "_dec" + sep + label);
      // A tripped guard drops that mitigated curve and is reported in the manifest.
      try {
        if (config.mitigation == Mitigation::kRescale) {
          add(base + "_em1" + sep + label, mitigate_rescale(exp_curve, sim, dec));
        } else if (config.mitigation == Mitigation::kDepolarization) {
          add(base + "_em2" + sep + label, mitigate_depolarization(exp_curve, result.curve("alpha").mean, n));
        }
      } catch (const Error& e) {
        result.manifest.notes.push_back(std::string("mitigation(") + base + sep + label + "): " + e.what());
      }
    }
  }

  result.manifest.config_echo = config_to_text(config);
  result.manifest.base_seed = config.base_seed;
  result.manifest.R = config.R;
  result.manifest.lindblad_convention = config.lindblad.convention == LindbladConvention::kPaper ? "paper" : "halved";
  result.manifest.j_two_pi = config.j_two_pi;
  detail::run_analyses(result, outputs);
  result.manifest.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

}  // namespace sffsim
