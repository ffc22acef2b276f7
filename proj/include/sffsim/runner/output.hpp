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
/// CSV, analysis-table and manifest emission. Numbers are written with
/// "%.17g" so a written curve reads back bit-exactly.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sffsim/runner/experiment.hpp"

namespace sffsim {

/// 64-bit FNV-1a, used for manifest content digests.
inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline std::string output_prefix(const ExperimentConfig& c) {
  return std::string(preset_name(c.preset)) + "_L" + std::to_string(c.L) + "_seed" + std::to_string(c.base_seed);
}

inline std::string curve_to_csv(const std::string& id, const SffCurve& curve) {
  std::string out = "time,mean_K,stderr_K,n_realizations,curve_id\n";
  for (std::size_t i = 0; i < curve.grid.size(); ++i) {
    out += detail::format_double(curve.grid[i]) + ',' + detail::format_double(curve.mean[i]) + ',' +
           detail::format_double(curve.std_error[i]) + ',' + std::to_string(curve.n_realizations) + ',' + id + '\n';
  }
  return out;
}

inline std::string analysis_to_csv(const std::vector<AnalysisRow>& rows) {
  std::string out = "analysis,curve_id,quantity,value\n";
  for (const auto& r : rows) {
    out += r.analysis + ',' + r.curve_id + ',' + r.quantity + ',' + detail::format_double(r.value) + '\n';
  }
  return out;
}

struct CsvCurve {
  std::string curve_id;
  std::vector<double> time;
  std::vector<double> mean;
  std::vector<double> std_error;
  int n_realizations = 0;
};

/// Reads a curve file produced by curve_to_csv.
inline CsvCurve parse_curve_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "time,mean_K,stderr_K,n_realizations,curve_id") {
    throw SchemaError("header", "unexpected curve CSV header");
  }
  CsvCurve c;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 5) throw SchemaError("row", "expected 5 columns in '" + line + "'");
    c.time.push_back(std::strtod(f[0].c_str(), nullptr));
    c.mean.push_back(std::strtod(f[1].c_str(), nullptr));
    c.std_error.push_back(std::strtod(f[2].c_str(), nullptr));
    c.n_realizations = std::stoi(f[3]);
    c.curve_id = f[4];
  }
  return c;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError(path.string(), "write failed");
}

inline std::string manifest_to_text(const RunManifest& m) {
  std::ostringstream o;
  o << "software_version = " << m.software_version << "\n";
  o << "base_seed = " << m.base_seed << "\n";
  o << "R = " << m.R << "\n";
  o << "realization_ids = 0.." << (m.R - 1) << "\n";
  o << "j_two_pi = " << (m.j_two_pi ? "true" : "false") << "\n";
  o << "lindblad_convention = " << m.lindblad_convention << "\n";
  o << "wall_seconds = " << detail::format_double(m.wall_seconds) << "\n";
  for (const auto& n : m.notes) o << "note = " << n << "\n";
  o << "\n[digests fnv1a64]\n";
  for (const auto& [file, digest] : m.digests) o << file << " = " << digest << "\n";
  o << "\n[config]\n" << m.config_echo;
  return o.str();
}

/// Writes every curve, the analysis table and the manifest into out_dir.
/// Returns the written paths in order.
inline std::vector<std::filesystem::path> emit_outputs(ExperimentResult& result,
                                                       const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError(out_dir.string(), ec.message());
  const std::string prefix = output_prefix(result.config);
  std::vector<std::filesystem::path> written;
  result.manifest.digests.clear();
  auto emit = [&](const std::string& name, const std::string& text) {
    const auto path = out_dir / name;
    write_text_file(path, text);
    result.manifest.digests.emplace_back(name, hex64(fnv1a64(text)));
    written.push_back(path);
  };
  for (const auto& c : result.curves) emit(prefix + "_" + c.id + ".csv", curve_to_csv(c.id, c.curve));
  emit(prefix + "_analysis.csv", analysis_to_csv(result.analyses));
  const auto manifest_path = out_dir / (prefix + "_manifest.txt");
  write_text_file(manifest_path, manifest_to_text(result.manifest));
  written.push_back(manifest_path);
  return written;
}

}  // namespace sffsim
