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

#include <filesystem>
#include <fstream>

#include "sffsim/sffsim.hpp"

namespace sffsim {
namespace {

namespace fs = std::filesystem;

ExperimentConfig config_from(const std::string& text) { return build_config(parse_config_text(text)); }

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("sffsim_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void expect_schema_error(const std::string& text, const std::string& field) {
  try {
    config_from(text);
    FAIL() << "expected a schema error for field " << field;
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.field(), field) << e.what();
  }
}

TEST(Config, PresetDefaults) {
  const auto c = config_from("preset = floquet-chaotic\nL = 3\n");
  EXPECT_EQ(c.model, ModelKind::kFloquet);
  EXPECT_EQ(c.T, 150.0);
  EXPECT_DOUBLE_EQ(c.J / (2.0 * kPi), -5e-3);
  EXPECT_DOUBLE_EQ(c.W / (2.0 * kPi), 5e-3);
  EXPECT_EQ(c.R, 400);
  EXPECT_FALSE(c.mode.shots);
  EXPECT_EQ(c.mode.n_shots, 3000u);
  EXPECT_EQ(c.grid.kind(), GridKind::kFloquetCycles);
  EXPECT_EQ(c.grid.points().back(), 32.0);
  EXPECT_FALSE(c.noise);

  const auto h = config_from("[experiment]\npreset = ham-mbl\nL = 4\n");
  EXPECT_EQ(h.model, ModelKind::kStatic);
  EXPECT_DOUBLE_EQ(h.W, 10.0 * std::abs(h.J));
  EXPECT_DOUBLE_EQ(h.hx / (2.0 * kPi), 2e-3);
  EXPECT_EQ(h.grid.points().back(), 1200.0);
  EXPECT_EQ(h.grid[1], 8.0);

  const auto p = config_from("preset = psff-floquet\nL = 5\n");
  ASSERT_EQ(p.subsystems.size(), 4u);
  EXPECT_EQ(p.subsystems[2].label(), "A1-2-3");
  EXPECT_EQ(p.T, 90.0);

  const auto s = config_from("preset = floquet-chaotic\nL = 2\nmode = shots:500\n[model]\nj_two_pi = off\n");
  EXPECT_TRUE(s.mode.shots);
  EXPECT_EQ(s.mode.n_shots, 500u);
  EXPECT_DOUBLE_EQ(s.J, -5e-3);
}

TEST(Config, SchemaErrorsNameTheField) {
  expect_schema_error("preset = floquet-chaotic\nL = 0\n", "experiment.L");
  expect_schema_error("preset = floquet-chaotic\nL = 3\nbogus = 1\n", "experiment.bogus");
  expect_schema_error("L = 3\n", "experiment.preset");
  expect_schema_error("preset = nonsense\nL = 3\n", "experiment.preset");
  expect_schema_error("preset = floquet-chaotic\n", "experiment.L");
  expect_schema_error("preset = floquet-chaotic\nL = 3\nR = 0\n", "experiment.R");
  expect_schema_error("preset = floquet-chaotic\nL = 3\nmode = shots:0\n", "experiment.mode");
  expect_schema_error("preset = floquet-chaotic\nL = 3\n[grid]\nt_max_ns = 100\n", "grid.t_max_ns");
  expect_schema_error("preset = ham-chaotic\nL = 3\n[model]\nT_ns = 100\n", "model.T_ns");
  expect_schema_error("preset = floquet-chaotic\nL = 3\n[analysis]\nmitigation = rescale\n", "analysis.mitigation");
  expect_schema_error("preset = floquet-chaotic\nL = 3\n[subsystems]\nsites = 1;4\n", "subsystems.sites");
  expect_schema_error("preset = floquet-chaotic\nL = 3\nL = 4\n", "experiment.L");
  expect_schema_error("preset = floquet-chaotic\nL = 3\n[noise]\nenabled = maybe\n", "noise.enabled");
  expect_schema_error("preset = custom\nL = 3\n", "experiment.model");
}

TEST(Config, LoadWithOverrides) {
  const fs::path dir = scratch_dir("config");
  fs::create_directories(dir);
  const fs::path file = dir / "c.ini";
  std::ofstream(file) << "# comment\n[experiment]\npreset = floquet-chaotic\nL = 3\nR = 10\n";
  const auto c = load_config(file.string(), {{"experiment.L", "4"}, {"noise.enabled", "on"}});
  EXPECT_EQ(c.L, 4);
  EXPECT_EQ(c.R, 10);
  EXPECT_TRUE(c.noise);
  EXPECT_EQ(c.noise_params.T1.size(), 4u);
  EXPECT_THROW(load_config((dir / "missing.ini").string()), IoError);
}

TEST(Config, EchoRoundTripsExactly) {
  for (const char* text :
       {"preset = floquet-chaotic\nL = 3\nseed = 12345678901234\n",
        "preset = psff-ham-chaotic\nL = 4\n[subsystems]\nsites = 1;2,4\n[analysis]\neta = 1.3\n",
        "preset = custom\nmodel = static\nL = 2\n[model]\nW_mhz = 7.3\nhx_mhz = 1.1\n[noise]\nenabled = on\nT1_us = 20,30\nT2_us = 10,11\nlindblad_convention = halved\n[analysis]\nmitigation = depolarization\n"}) {
    const auto a = config_from(text);
    const std::string echo = config_to_text(a);
    const auto b = config_from(echo);
    EXPECT_EQ(config_to_text(b), echo);
    EXPECT_EQ(a.J, b.J);
    EXPECT_EQ(a.W, b.W);
    EXPECT_EQ(a.hx, b.hx);
    EXPECT_EQ(a.noise_params.T1, b.noise_params.T1);
    EXPECT_EQ(a.base_seed, b.base_seed);
    EXPECT_TRUE(a.grid == b.grid);
  }
}

TEST(Runner, FloquetL2MatchesCue) {
  const auto c = config_from("preset = floquet-chaotic\nL = 2\nR = 400\n");
  const auto r = run_experiment(c);
  const auto& k = r.curve("sff");
  EXPECT_EQ(k.mean[0], 1.0);
  for (std::size_t i = 1; i <= 12; ++i) {
    EXPECT_LE(std::abs(k.mean[i] - k_cue_reference(k.grid[i], 4.0)), 3.0 * k.std_error[i]) << "tau = " << k.grid[i];
  }
}

TEST(Runner, DeterministicAcrossWorkerCounts) {
  const std::string text = "preset = psff-floquet\nL = 3\nR = 24\nprotocol = on\n";
  auto a = run_experiment(config_from(text + "workers = 1\n"));
  auto b = run_experiment(config_from(text + "workers = 8\n"));
  const auto da = scratch_dir("det_a"), db = scratch_dir("det_b");
  const auto fa = emit_outputs(a, da);
  const auto fb = emit_outputs(b, db);
  ASSERT_EQ(fa.size(), fb.size());
  for (std::size_t i = 0; i + 1 < fa.size(); ++i) {
    EXPECT_EQ(fa[i].filename(), fb[i].filename());
    EXPECT_EQ(slurp(fa[i]), slurp(fb[i])) << fa[i];
  }
}

TEST(Runner, LocalizedPlateauEarlierThanChaotic) {
  const auto chaotic = run_experiment(config_from("preset = ham-chaotic\nL = 4\nR = 400\n"));
  const auto localized = run_experiment(config_from("preset = ham-mbl\nL = 4\nR = 400\n"));
  const double fit_c = *chaotic.analysis("plateau_goe_fit", "sff_connected", "t_p");
  const double fit_l = *localized.analysis("plateau_goe_fit", "sff_connected", "t_p");
  EXPECT_LT(fit_l, fit_c);
  const double thr_c = *chaotic.analysis("plateau_threshold", "sff", "t_p");
  const double thr_l = *localized.analysis("plateau_threshold", "sff", "t_p");
  EXPECT_LT(thr_l, thr_c);
}

TEST(Runner, StandardErrorShrinksAsInverseSqrtR) {
  auto se = [](int R) {
    const auto r = run_experiment(config_from("preset = floquet-chaotic\nL = 3\nR = " + std::to_string(R) + "\n"));
    const auto& k = r.curve("sff");
    double s = 0.0;
    for (std::size_t i = 1; i < k.grid.size(); ++i) s += k.std_error[i];
    return s;
  };
  const double s100 = se(100), s400 = se(400), s1600 = se(1600);
  EXPECT_GT(s100 / s400, 2.0 / 1.5);
  EXPECT_LT(s100 / s400, 2.0 * 1.5);
  EXPECT_GT(s400 / s1600, 2.0 / 1.5);
  EXPECT_LT(s400 / s1600, 2.0 * 1.5);
}

TEST(Runner, CurveSetAndStderrDefinition) {
  const auto r = run_experiment(config_from("preset = psff-floquet\nL = 2\nR = 30\nprotocol = on\n"));
  for (const char* id : {"sff", "sff_connected", "psff_A1", "sff_est", "psff_est_A1"}) EXPECT_TRUE(r.has_curve(id)) << id;
  const auto& k = r.curve("sff");
  const auto& raw = k.per_realization;
  ASSERT_EQ(raw.rows(), 30);
  const auto col = raw.col(5);
  const double mean = col.mean();
  const double sd = std::sqrt((col.array() - mean).square().sum() / 29.0);
  EXPECT_NEAR(k.std_error[5], sd / std::sqrt(30.0), 1e-15);
  for (double v : r.curve("psff_A1").mean) EXPECT_GE(v, 0.0);
  EXPECT_NEAR(r.curve("psff_A1").mean[0], 1.0, 1e-12);
  EXPECT_EQ(r.curve("sff_connected").mean[0], 0.0);
}

TEST(Runner, NoisyRunProducesMitigatedCurves) {
  const auto r = run_experiment(config_from(
      "preset = floquet-chaotic\nL = 2\nR = 6\nprotocol = on\n[grid]\ncycles_max = 3\n[noise]\nenabled = on\n[analysis]\nmitigation = depolarization\n"));
  for (const char* id : {"sff_dec", "alpha", "sff_em2"}) EXPECT_TRUE(r.has_curve(id)) << id;
  EXPECT_FALSE(r.has_curve("sff_exp"));
  const auto& alpha = r.curve("alpha").mean;
  EXPECT_NEAR(alpha[0], 1.0, 1e-9);
  for (std::size_t i = 1; i < alpha.size(); ++i) EXPECT_LT(alpha[i], alpha[i - 1]);
}

TEST(Runner, ErrorsCarryRealizationAndTimeIndex) {
  const auto c = config_from(
      "preset = floquet-chaotic\nL = 1\nR = 3\n[grid]\ncycles_max = 2\n[noise]\nenabled = on\nT1_ns = 0.05\nT2_ns = 0.05\n");
  try {
    run_experiment(c);
    FAIL() << "expected a realization error";
  } catch (const RealizationError& e) {
    EXPECT_EQ(e.realization_id(), 0u);
    EXPECT_EQ(e.time_index(), 1);
    EXPECT_NE(std::string(e.what()).find("reduce dt"), std::string::npos) << e.what();
  }
}

TEST(Outputs, CsvRoundTripAndManifestDigests) {
  auto r = run_experiment(config_from("preset = psff-ham-chaotic\nL = 3\nR = 20\nseed = 9\n"));
  const auto dir = scratch_dir("outputs");
  const auto files = emit_outputs(r, dir);
  EXPECT_EQ(files.size(), r.curves.size() + 2);
  EXPECT_TRUE(fs::exists(dir / "psff-ham-chaotic_L3_seed9_sff.csv"));
  EXPECT_TRUE(fs::exists(dir / "psff-ham-chaotic_L3_seed9_analysis.csv"));
  for (const auto& c : r.curves) {
    const std::string text = slurp(dir / ("psff-ham-chaotic_L3_seed9_" + c.id + ".csv"));
    EXPECT_EQ(text.find('\r'), std::string::npos);
    const CsvCurve back = parse_curve_csv(text);
    EXPECT_EQ(back.curve_id, c.id);
    EXPECT_EQ(back.time, c.curve.grid.points());
    EXPECT_EQ(back.mean, c.curve.mean);
    EXPECT_EQ(back.std_error, c.curve.std_error);
    EXPECT_EQ(back.n_realizations, 20);
  }
  const std::string manifest = slurp(files.back());
  for (const auto& [name, digest] : r.manifest.digests) {
    EXPECT_EQ(hex64(fnv1a64(slurp(dir / name))), digest) << name;
    EXPECT_NE(manifest.find(name + " = " + digest), std::string::npos) << name;
  }
  EXPECT_NE(manifest.find("lindblad_convention = paper"), std::string::npos);
  EXPECT_NE(manifest.find("[config]\n[experiment]\npreset = psff-ham-chaotic"), std::string::npos);
}

TEST(Outputs, OneSffFilePerSystemSize) {
  const auto dir = scratch_dir("fig2");
  for (int L = 2; L <= 5; ++L) {
    auto r = run_experiment(config_from("preset = floquet-chaotic\nR = 20\nL = " + std::to_string(L) + "\n"));
    emit_outputs(r, dir);
  }
  int count = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto name = e.path().filename().string();
    if (name.size() > 8 && name.substr(name.size() - 8) == "_sff.csv") ++count;
  }
  EXPECT_EQ(count, 4);
}

TEST(Outputs, Fnv1aKnownValues) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(hex64(0xabcULL), "0000000000000abc");
}

}  // namespace
}  // namespace sffsim
