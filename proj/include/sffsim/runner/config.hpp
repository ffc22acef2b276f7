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
/// Experiment configuration: a flat key-value text format with section headers.
///
///     # comment
///     [experiment]
///     preset = ham-chaotic
///     L = 4
///     [model]
///     W_mhz = 50
///
/// Keys appearing before the first header belong to [experiment]. See
/// README.md for the full schema. Every key is validated; unknown keys and
/// out-of-range values raise SchemaError naming the offending field.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "sffsim/models.hpp"
#include "sffsim/noise.hpp"
#include "sffsim/spectral.hpp"

namespace sffsim {

enum class Preset { kFloquetChaotic, kHamChaotic, kHamMbl, kPsffFloquet, kPsffHamChaotic, kPsffHamMbl, kCustom };
enum class ModelKind { kFloquet, kStatic };
enum class Mitigation { kNone, kRescale, kDepolarization };

inline const char* preset_name(Preset p) {
  switch (p) {
    case Preset::kFloquetChaotic: return "floquet-chaotic";
    case Preset::kHamChaotic: return "ham-chaotic";
    case Preset::kHamMbl: return "ham-mbl";
    case Preset::kPsffFloquet: return "psff-floquet";
    case Preset::kPsffHamChaotic: return "psff-ham-chaotic";
    case Preset::kPsffHamMbl: return "psff-ham-mbl";
    case Preset::kCustom: return "custom";
  }
  return "?";
}

struct MeasurementMode {
  bool shots = false;
  std::uint64_t n_shots = 3000;

  std::string to_string() const { return shots ? "shots:" + std::to_string(n_shots) : "exact"; }
};

struct ExperimentConfig {
  Preset preset = Preset::kCustom;
  ModelKind model = ModelKind::kFloquet;
  int L = 1;
  int R = 400;
  std::uint64_t base_seed = 1;
  MeasurementMode mode;
  bool protocol = false;  ///< randomized-measurement estimates alongside exact curves
  int workers = 1;

  // Model parameters in rad/ns (ns for T).
  bool j_two_pi = true;
  double J = 0.0;
  double W = 0.0;
  double hx = 0.0;
  double T = 0.0;

  TimeGrid grid = TimeGrid::cycles(0);
  std::vector<SubsystemSpec> subsystems;

  bool noise = false;
  NoiseParams noise_params;
  LindbladOptions lindblad;

  Mitigation mitigation = Mitigation::kNone;
  double fit_t_start = 48.0;
  std::optional<double> fit_t_end;
  double eta = 1.2;
  std::optional<double> shift_t_start;
  std::optional<double> shift_t_end;

  std::size_t dim() const { return std::size_t{1} << L; }

  FloquetModelParams floquet_params() const { return {L, J, W, T}; }
  StaticModelParams static_params() const { return {L, J, hx, W}; }
};

/// Raw "section.key" -> value pairs, in file order.
using RawConfig = std::map<std::string, std::string>;

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T>
T parse_number(const std::string& field, const std::string& text) {
  T value{};
  if constexpr (std::is_floating_point_v<T>) {
    char* end = nullptr;
    value = std::strtod(text.c_str(), &end);
    if (text.empty() || end != text.c_str() + text.size() || !std::isfinite(value)) {
      throw SchemaError(field, "expected a finite number, got '" + text + "'");
    }
  } else {
    const char* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), last, value);
    if (text.empty() || ec != std::errc() || ptr != last) throw SchemaError(field, "expected an integer, got '" + text + "'");
  }
  return value;
}

inline bool parse_bool(const std::string& field, const std::string& text) {
  if (text == "on" || text == "true" || text == "yes" || text == "1") return true;
  if (text == "off" || text == "false" || text == "no" || text == "0") return false;
  throw SchemaError(field, "expected on/off, got '" + text + "'");
}

inline std::vector<double> parse_list(const std::string& field, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number<double>(field, trim(item)));
  return out;
}

inline const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "experiment.preset", "experiment.model", "experiment.L", "experiment.R", "experiment.seed",
      "experiment.mode", "experiment.protocol", "experiment.workers",
      "model.J_mhz", "model.W_mhz", "model.hx_mhz", "model.J_rad_per_ns", "model.W_rad_per_ns",
      "model.hx_rad_per_ns", "model.T_ns", "model.j_two_pi",
      "grid.cycles_max", "grid.t_max_ns", "grid.t_step_ns",
      "subsystems.sites",
      "noise.enabled", "noise.processor", "noise.table", "noise.T1_us", "noise.T2_us", "noise.T1_ns",
      "noise.T2_ns", "noise.dt_ns",
      "noise.lindblad_convention",
      "analysis.mitigation", "analysis.fit_t_start", "analysis.fit_t_end", "analysis.eta",
      "analysis.shift_t_start", "analysis.shift_t_end",
  };
  return keys;
}

}  // namespace detail

inline RawConfig parse_config_text(const std::string& text) {
  RawConfig raw;
  std::istringstream in(text);
  std::string line;
  std::string section = "experiment";
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw SchemaError("line " + std::to_string(line_no), "malformed section header");
      section = detail::trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw SchemaError("line " + std::to_string(line_no), "expected key = value");
    const std::string key = section + "." + detail::trim(line.substr(0, eq));
    if (std::find(detail::known_keys().begin(), detail::known_keys().end(), key) == detail::known_keys().end()) {
      throw SchemaError(key, "unknown key");
    }
    if (raw.count(key)) throw SchemaError(key, "duplicate key");
    raw[key] = detail::trim(line.substr(eq + 1));
  }
  return raw;
}

inline Preset parse_preset(const std::string& s) {
  for (Preset p : {Preset::kFloquetChaotic, Preset::kHamChaotic, Preset::kHamMbl, Preset::kPsffFloquet,
                   Preset::kPsffHamChaotic, Preset::kPsffHamMbl, Preset::kCustom}) {
    if (s == preset_name(p)) return p;
  }
  throw SchemaError("experiment.preset", "unknown preset '" + s + "'");
}

inline MeasurementMode parse_mode(const std::string& s) {
  if (s == "exact") return {false, 3000};
  if (s == "shots") return {true, 3000};
  if (s.rfind("shots:", 0) == 0) {
    const auto n = detail::parse_number<std::uint64_t>("experiment.mode", s.substr(6));
    if (n == 0) throw SchemaError("experiment.mode", "shot count must be > 0");
    return {true, n};
  }
  throw SchemaError("experiment.mode", "expected exact or shots:N, got '" + s + "'");
}

/// Validates raw key-values and fills every unset field from the preset.
inline ExperimentConfig build_config(const RawConfig& raw) {
  for (const auto& [key, value] : raw) {
    if (std::find(detail::known_keys().begin(), detail::known_keys().end(), key) == detail::known_keys().end()) {
      throw SchemaError(key, "unknown key");
    }
  }
  auto get = [&](const std::string& key) -> std::optional<std::string> {
    const auto it = raw.find(key);
    if (it == raw.end()) return std::nullopt;
    return it->second;
  };

  ExperimentConfig c;
  const auto preset = get("experiment.preset");
  if (!preset) throw SchemaError("experiment.preset", "missing");
  c.preset = parse_preset(*preset);

  switch (c.preset) {
    case Preset::kFloquetChaotic:
    case Preset::kPsffFloquet: c.model = ModelKind::kFloquet; break;
    case Preset::kHamChaotic:
    case Preset::kHamMbl:
    case Preset::kPsffHamChaotic:
    case Preset::kPsffHamMbl: c.model = ModelKind::kStatic; break;
    case Preset::kCustom: {
      const auto m = get("experiment.model");
      if (!m) throw SchemaError("experiment.model", "required for the custom preset");
      if (*m == "floquet") c.model = ModelKind::kFloquet;
      else if (*m == "static") c.model = ModelKind::kStatic;
      else throw SchemaError("experiment.model", "expected floquet or static");
      break;
    }
  }
  if (c.preset != Preset::kCustom && get("experiment.model")) {
    throw SchemaError("experiment.model", "only valid with the custom preset");
  }

  const auto L = get("experiment.L");
  if (!L) throw SchemaError("experiment.L", "missing");
  c.L = detail::parse_number<int>("experiment.L", *L);
  if (c.L < 1 || c.L > kMaxQubits) {
    throw SchemaError("experiment.L", "must be in [1, " + std::to_string(kMaxQubits) + "]");
  }
  if (auto v = get("experiment.R")) {
    c.R = detail::parse_number<int>("experiment.R", *v);
    if (c.R < 1) throw SchemaError("experiment.R", "must be >= 1");
  }
  if (auto v = get("experiment.seed")) c.base_seed = detail::parse_number<std::uint64_t>("experiment.seed", *v);
  if (auto v = get("experiment.mode")) c.mode = parse_mode(*v);
  if (auto v = get("experiment.protocol")) c.protocol = detail::parse_bool("experiment.protocol", *v);
  if (auto v = get("experiment.workers")) {
    c.workers = detail::parse_number<int>("experiment.workers", *v);
    if (c.workers < 1) throw SchemaError("experiment.workers", "must be >= 1");
  }

  // Model. Frequencies given in MHz are ordinary frequencies (x 2 pi).
  if (auto v = get("model.j_two_pi")) c.j_two_pi = detail::parse_bool("model.j_two_pi", *v);
  auto rate = [&](const std::string& name, double default_rad, bool two_pi) {
    const auto mhz = get("model." + name + "_mhz");
    const auto rad = get("model." + name + "_rad_per_ns");
    if (mhz && rad) throw SchemaError("model." + name + "_mhz", "conflicts with model." + name + "_rad_per_ns");
    if (rad) return detail::parse_number<double>("model." + name + "_rad_per_ns", *rad);
    if (mhz) {
      const double f = detail::parse_number<double>("model." + name + "_mhz", *mhz);
      return two_pi ? mhz_to_rad_per_ns(f) : f * 1e-3;
    }
    return default_rad;
  };
  c.J = rate("J", c.j_two_pi ? mhz_to_rad_per_ns(-5.0) : -5.0e-3, c.j_two_pi);
  const bool localized = c.preset == Preset::kHamMbl || c.preset == Preset::kPsffHamMbl;
  double default_w = mhz_to_rad_per_ns(5.0);
  if (c.model == ModelKind::kStatic) default_w = (localized ? 10.0 : 1.0) * std::abs(c.J);
  c.W = rate("W", default_w, true);
  if (c.W < 0.0) throw SchemaError(get("model.W_mhz") ? "model.W_mhz" : "model.W_rad_per_ns", "must be >= 0");
  c.hx = rate("hx", c.model == ModelKind::kStatic ? mhz_to_rad_per_ns(2.0) : 0.0, true);
  if (c.model == ModelKind::kFloquet && c.hx != 0.0) throw SchemaError("model.hx_mhz", "not used by the Floquet model");
  c.T = c.L <= 3 ? 150.0 : 90.0;
  if (auto v = get("model.T_ns")) {
    if (c.model != ModelKind::kFloquet) throw SchemaError("model.T_ns", "only valid for the Floquet model");
    c.T = detail::parse_number<double>("model.T_ns", *v);
    if (!(c.T > 0.0)) throw SchemaError("model.T_ns", "must be > 0");
  }

  // Grid.
  const auto n = static_cast<int>(c.dim());
  if (c.model == ModelKind::kFloquet) {
    if (get("grid.t_max_ns") || get("grid.t_step_ns")) throw SchemaError("grid.t_max_ns", "Floquet grids are in cycles");
    int cycles = 4 * n;
    if (auto v = get("grid.cycles_max")) {
      cycles = detail::parse_number<int>("grid.cycles_max", *v);
      if (cycles < 1) throw SchemaError("grid.cycles_max", "must be >= 1");
    }
    c.grid = TimeGrid::cycles(cycles);
  } else {
    if (get("grid.cycles_max")) throw SchemaError("grid.cycles_max", "static grids are in ns");
    double t_max = 1200.0, step = 8.0;
    if (auto v = get("grid.t_max_ns")) t_max = detail::parse_number<double>("grid.t_max_ns", *v);
    if (auto v = get("grid.t_step_ns")) step = detail::parse_number<double>("grid.t_step_ns", *v);
    if (!(step > 0.0)) throw SchemaError("grid.t_step_ns", "must be > 0");
    if (!(t_max >= step)) throw SchemaError("grid.t_max_ns", "must be >= t_step_ns");
    c.grid = TimeGrid::uniform_ns(t_max, step);
  }

  // Subsystems: "1;1,2;1,2,3".
  if (auto v = get("subsystems.sites")) {
    std::stringstream groups(*v);
    std::string group;
    while (std::getline(groups, group, ';')) {
      std::vector<int> sites;
      std::stringstream items(group);
      std::string item;
      while (std::getline(items, item, ',')) {
        item = detail::trim(item);
        if (!item.empty()) sites.push_back(detail::parse_number<int>("subsystems.sites", item));
      }
      try {
        c.subsystems.emplace_back(std::move(sites), c.L);
      } catch (const UsageError& e) {
        throw SchemaError("subsystems.sites", e.what());
      }
    }
  } else if (c.preset == Preset::kPsffFloquet || c.preset == Preset::kPsffHamChaotic ||
             c.preset == Preset::kPsffHamMbl) {
    for (int k = 1; k < c.L; ++k) c.subsystems.push_back(SubsystemSpec::prefix(k, c.L));
  }

  // Noise.
  if (auto v = get("noise.enabled")) c.noise = detail::parse_bool("noise.enabled", *v);
  int processor = c.model == ModelKind::kFloquet ? 1 : 2;
  if (auto v = get("noise.processor")) {
    processor = detail::parse_number<int>("noise.processor", *v);
    if (processor != 1 && processor != 2) throw SchemaError("noise.processor", "must be 1 or 2");
  }
  const bool in_us = get("noise.T1_us") || get("noise.T2_us");
  const bool in_ns = get("noise.T1_ns") || get("noise.T2_ns");
  if (in_us && in_ns) throw SchemaError("noise.T1_ns", "give lifetimes in either us or ns");
  if ((in_us || in_ns) && get("noise.table")) throw SchemaError("noise.table", "conflicts with explicit T1/T2");
  try {
    if (auto path = get("noise.table")) {
      c.noise_params = load_noise_table(*path, c.L);
    } else if (in_us || in_ns) {
      const std::string unit = in_us ? "_us" : "_ns";
      const double scale = in_us ? 1e3 : 1.0;
      const auto t1_text = get("noise.T1" + unit);
      const auto t2_text = get("noise.T2" + unit);
      if (!t1_text || !t2_text) throw SchemaError("noise.T1" + unit, "T1 and T2 go together");
      for (double t : detail::parse_list("noise.T1" + unit, *t1_text)) c.noise_params.T1.push_back(scale * t);
      for (double t : detail::parse_list("noise.T2" + unit, *t2_text)) c.noise_params.T2.push_back(scale * t);
      c.noise_params.validate(c.L);
    } else if (c.L <= 5) {
      c.noise_params = NoiseParams::processor(processor, c.L);
    } else if (c.noise) {
      throw SchemaError("noise.T1_us", "bundled tables cover at most 5 qubits; give T1_us/T2_us");
    }
  } catch (const ConfigError& e) {
    throw SchemaError("noise", e.what());
  }
  if (auto v = get("noise.dt_ns")) {
    c.lindblad.dt = detail::parse_number<double>("noise.dt_ns", *v);
    if (!(c.lindblad.dt > 0.0)) throw SchemaError("noise.dt_ns", "must be > 0");
  }
  if (auto v = get("noise.lindblad_convention")) {
    if (*v == "paper") c.lindblad.convention = LindbladConvention::kPaper;
    else if (*v == "halved") c.lindblad.convention = LindbladConvention::kHalved;
    else throw SchemaError("noise.lindblad_convention", "expected paper or halved");
  }

  // Analysis.
  if (auto v = get("analysis.mitigation")) {
    if (*v == "none") c.mitigation = Mitigation::kNone;
    else if (*v == "rescale") c.mitigation = Mitigation::kRescale;
    else if (*v == "depolarization") c.mitigation = Mitigation::kDepolarization;
    else throw SchemaError("analysis.mitigation", "expected none, rescale or depolarization");
  }
  if (c.mitigation != Mitigation::kNone && !c.noise) {
    throw SchemaError("analysis.mitigation", "requires noise.enabled = on");
  }
  if (auto v = get("analysis.fit_t_start")) c.fit_t_start = detail::parse_number<double>("analysis.fit_t_start", *v);
  if (auto v = get("analysis.fit_t_end")) c.fit_t_end = detail::parse_number<double>("analysis.fit_t_end", *v);
  if (auto v = get("analysis.eta")) {
    c.eta = detail::parse_number<double>("analysis.eta", *v);
    if (!(c.eta > 0.0)) throw SchemaError("analysis.eta", "must be > 0");
  }
  if (auto v = get("analysis.shift_t_start")) c.shift_t_start = detail::parse_number<double>("analysis.shift_t_start", *v);
  if (auto v = get("analysis.shift_t_end")) c.shift_t_end = detail::parse_number<double>("analysis.shift_t_end", *v);
  return c;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError(path, "cannot open");
  std::stringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

/// Reads `path`, applies `overrides` ("section.key" -> value) on top, validates.
inline ExperimentConfig load_config(const std::string& path, const RawConfig& overrides = {}) {
  RawConfig raw = parse_config_text(read_text_file(path));
  for (const auto& [k, v] : overrides) raw[k] = v;
  return build_config(raw);
}

/// Fully resolved config in the input schema; parsing it back reproduces the
/// same ExperimentConfig bit for bit.
inline std::string config_to_text(const ExperimentConfig& c) {
  using detail::format_double;
  std::ostringstream o;
  o << "[experiment]\n"
    << "preset = " << preset_name(c.preset) << "\n";
  if (c.preset == Preset::kCustom) o << "model = " << (c.model == ModelKind::kFloquet ? "floquet" : "static") << "\n";
  o << "L = " << c.L << "\n"
    << "R = " << c.R << "\n"
    << "seed = " << c.base_seed << "\n"
    << "mode = " << c.mode.to_string() << "\n"
    << "protocol = " << (c.protocol ? "on" : "off") << "\n"
    << "workers = " << c.workers << "\n"
    << "[model]\n"
    << "j_two_pi = " << (c.j_two_pi ? "true" : "false") << "\n"
    << "J_rad_per_ns = " << format_double(c.J) << "\n"
    << "W_rad_per_ns = " << format_double(c.W) << "\n";
  if (c.model == ModelKind::kStatic) o << "hx_rad_per_ns = " << format_double(c.hx) << "\n";
  if (c.model == ModelKind::kFloquet) o << "T_ns = " << format_double(c.T) << "\n";
  o << "[grid]\n";
  if (c.grid.kind() == GridKind::kFloquetCycles) {
    o << "cycles_max = " << static_cast<long>(c.grid.points().back()) << "\n";
  } else {
    const auto& p = c.grid.points();
    const double step = p.size() > 1 ? p[1] - p[0] : 1.0;
    o << "t_max_ns = " << format_double(p.back()) << "\n"
      << "t_step_ns = " << format_double(step) << "\n";
  }
  if (!c.subsystems.empty()) {
    o << "[subsystems]\nsites = ";
    for (std::size_t i = 0; i < c.subsystems.size(); ++i) {
      if (i) o << ';';
      const auto& s = c.subsystems[i].sites();
      for (std::size_t j = 0; j < s.size(); ++j) o << (j ? "," : "") << s[j];
    }
    o << "\n";
  }
  o << "[noise]\n"
    << "enabled = " << (c.noise ? "on" : "off") << "\n";
  if (!c.noise_params.T1.empty()) {
    o << "T1_ns = ";
    for (std::size_t i = 0; i < c.noise_params.T1.size(); ++i) o << (i ? "," : "") << format_double(c.noise_params.T1[i]);
    o << "\nT2_ns = ";
    for (std::size_t i = 0; i < c.noise_params.T2.size(); ++i) o << (i ? "," : "") << format_double(c.noise_params.T2[i]);
    o << "\n";
  }
  o << "dt_ns = " << format_double(c.lindblad.dt) << "\n"
    << "lindblad_convention = " << (c.lindblad.convention == LindbladConvention::kPaper ? "paper" : "halved") << "\n"
    << "[analysis]\n"
    << "mitigation = "
    << (c.mitigation == Mitigation::kNone ? "none" : c.mitigation == Mitigation::kRescale ? "rescale" : "depolarization")
    << "\n"
    << "fit_t_start = " << format_double(c.fit_t_start) << "\n";
  if (c.fit_t_end) o << "fit_t_end = " << format_double(*c.fit_t_end) << "\n";
  o << "eta = " << format_double(c.eta) << "\n";
  if (c.shift_t_start) o << "shift_t_start = " << format_double(*c.shift_t_start) << "\n";
  if (c.shift_t_end) o << "shift_t_end = " << format_double(*c.shift_t_end) << "\n";
  return o.str();
}

}  // namespace sffsim
