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

// Disordered XY chains: the three-segment Floquet drive and the static
// transverse/longitudinal-field Hamiltonian, plus reproducible disorder.

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <string>
#include <vector>

#include "sffsim/linalg.hpp"
#include "sffsim/rng.hpp"

namespace sffsim {

inline constexpr int kMaxQubits = 8;

/// Ordinary frequency in MHz to angular frequency in rad/ns.
constexpr double mhz_to_rad_per_ns(double f_mhz) { return 2.0 * kPi * f_mhz * 1e-3; }

enum class Axis { kX, kY, kZ };

inline const char* axis_name(Axis a) {
  switch (a) {
    case Axis::kX: return "x";
    case Axis::kY: return "y";
    case Axis::kZ: return "z";
  }
  return "?";
}

struct FloquetModelParams {
  int L = 1;
  double J = mhz_to_rad_per_ns(-5.0);
  double W = mhz_to_rad_per_ns(5.0);
  double T = 150.0;  ///< ns

  /// J/2pi = -5 MHz, W/2pi = 5 MHz, T = 150 ns (L <= 3) or 90 ns (L >= 4).
  /// With j_two_pi = false, J = -5e-3 rad/ns is taken as already angular.
  static FloquetModelParams defaults(int L, bool j_two_pi = true) {
    FloquetModelParams p;
    p.L = L;
    p.J = j_two_pi ? mhz_to_rad_per_ns(-5.0) : -5.0e-3;
    p.T = L <= 3 ? 150.0 : 90.0;
    return p;
  }
};

struct StaticModelParams {
  int L = 1;
  double J = mhz_to_rad_per_ns(-5.0);
  double hx = mhz_to_rad_per_ns(2.0);
  double W = mhz_to_rad_per_ns(5.0);

  /// W = |J|.
  static StaticModelParams chaotic(int L, bool j_two_pi = true) {
    StaticModelParams p;
    p.L = L;
    p.J = j_two_pi ? mhz_to_rad_per_ns(-5.0) : -5.0e-3;
    p.W = std::abs(p.J);
    return p;
  }

  /// W = 10 |J|.
  static StaticModelParams localized(int L, bool j_two_pi = true) {
    StaticModelParams p = chaotic(L, j_two_pi);
    p.W = 10.0 * std::abs(p.J);
    return p;
  }
};

struct SeededEnsembleSpec {
  std::uint64_t base_seed = 0;
  int R = 400;
};

struct DisorderRealization {
  std::uint64_t realization_id = 0;
  std::map<Axis, std::vector<double>> fields_by_axis;

  const std::vector<double>& fields(Axis a) const {
    const auto it = fields_by_axis.find(a);
    if (it == fields_by_axis.end()) {
      throw ConfigError(std::string("disorder realization has no fields for axis ") +
                        axis_name(a));
    }
    return it->second;
  }
};

namespace detail {

inline void check_qubits(int L) {
  if (L < 1) throw DimensionError("qubit count must be >= 1");
  if (L > kMaxQubits) {
    throw DimensionError("qubit count " + std::to_string(L) + " exceeds limit " +
                         std::to_string(kMaxQubits));
  }
}

/// m += coeff * embed(op, site); O(N) instead of a dense product.
inline void add_site_term(ComplexMatrix& m, const ComplexMatrix& op, int site, int L,
                          Complex coeff) {
  const std::size_t mask = site_mask(site, L);
  const auto dim = static_cast<std::size_t>(m.rows());
  for (std::size_t col = 0; col < dim; ++col) {
    const int in_bit = (col & mask) ? 1 : 0;
    for (int out_bit = 0; out_bit < 2; ++out_bit) {
      const Complex v = op(out_bit, in_bit);
      if (v == Complex(0.0)) continue;
      const std::size_t row = out_bit ? (col | mask) : (col & ~mask);
      m(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) += coeff * v;
    }
  }
}

inline const ComplexMatrix& pauli_for(Axis a) {
  static const ComplexMatrix x = pauli::x();
  static const ComplexMatrix y = pauli::y();
  static const ComplexMatrix z = pauli::z();
  switch (a) {
    case Axis::kX: return x;
    case Axis::kY: return y;
    case Axis::kZ: return z;
  }
  return z;
}

inline StreamTag disorder_tag(Axis a) {
  switch (a) {
    case Axis::kX: return StreamTag::kDisorderX;
    case Axis::kY: return StreamTag::kDisorderY;
    case Axis::kZ: return StreamTag::kDisorderZ;
  }
  return StreamTag::kDisorderZ;
}

}  // namespace detail

/// J sum_m (s+_m s-_{m+1} + s-_m s+_{m+1}) on an open chain.
inline HermitianOperator build_xy(int L, double J) {
  detail::check_qubits(L);
  const std::size_t dim = std::size_t{1} << L;
  ComplexMatrix h = ComplexMatrix::Zero(static_cast<Eigen::Index>(dim),
                                        static_cast<Eigen::Index>(dim));
  // The hopping term swaps antiparallel neighbours with amplitude J.
  for (int m = 1; m < L; ++m) {
    const std::size_t a = site_mask(m, L);
    const std::size_t b = site_mask(m + 1, L);
    for (std::size_t s = 0; s < dim; ++s) {
      if (((s & a) != 0) != ((s & b) != 0)) {
        h(static_cast<Eigen::Index>(s ^ (a | b)), static_cast<Eigen::Index>(s)) += J;
      }
    }
  }
  return HermitianOperator(std::move(h));
}

/// H_XY + sum_m h_m^alpha sigma_m^alpha
inline HermitianOperator build_h_alpha(const FloquetModelParams& params,
                                       const DisorderRealization& realization, Axis axis) {
  const auto& h = realization.fields(axis);
  if (static_cast<int>(h.size()) != params.L) {
    throw ConfigError("disorder field count does not match L");
  }
  ComplexMatrix m = build_xy(params.L, params.J).matrix();
  for (int site = 1; site <= params.L; ++site) {
    detail::add_site_term(m, detail::pauli_for(axis), site, params.L,
                          h[static_cast<std::size_t>(site - 1)]);
  }
  return HermitianOperator(std::move(m));
}

/// Uniform fields in [-W, W] drawn per (axis, site) from the realization's
/// counter-based stream; independent of call order.
inline DisorderRealization sample_disorder(double W, int L, std::initializer_list<Axis> axes,
                                           const SeededEnsembleSpec& spec,
                                           std::uint64_t realization_id) {
  if (!(W >= 0.0)) throw DomainError("sample_disorder: W must be >= 0");
  detail::check_qubits(L);
  DisorderRealization out;
  out.realization_id = realization_id;
  for (Axis a : axes) {
    const CounterStream stream(spec.base_seed, realization_id, detail::disorder_tag(a));
    std::vector<double> fields(static_cast<std::size_t>(L));
    for (int site = 0; site < L; ++site) {
      const double u = stream.uniform_at(static_cast<std::uint32_t>(site));
      fields[static_cast<std::size_t>(site)] = W * (2.0 * u - 1.0);
    }
    out.fields_by_axis[a] = std::move(fields);
  }
  return out;
}

/// One drive period: H^x on [0, T/3), H^z on [T/3, 2T/3), H^y on [2T/3, T).
/// Time ordering puts the earliest segment rightmost: U = U_y U_z U_x.
inline UnitaryOperator build_floquet_unitary(const FloquetModelParams& params,
                                             const DisorderRealization& realization) {
  if (!(params.T > 0.0)) throw ConfigError("Floquet period must be > 0");
  const double third = params.T / 3.0;
  const auto ux = unitary_from_hamiltonian(build_h_alpha(params, realization, Axis::kX), third);
  const auto uz = unitary_from_hamiltonian(build_h_alpha(params, realization, Axis::kZ), third);
  const auto uy = unitary_from_hamiltonian(build_h_alpha(params, realization, Axis::kY), third);
  return UnitaryOperator(uy.matrix() * uz.matrix() * ux.matrix());
}

/// H_XY + hx sum_m sigma^x_m + sum_m h^z_m sigma^z_m
inline HermitianOperator build_static_hamiltonian(const StaticModelParams& params,
                                                  const DisorderRealization& realization) {
  const auto& hz = realization.fields(Axis::kZ);
  if (static_cast<int>(hz.size()) != params.L) {
    throw ConfigError("disorder field count does not match L");
  }
  ComplexMatrix m = build_xy(params.L, params.J).matrix();
  for (int site = 1; site <= params.L; ++site) {
    if (params.hx != 0.0) detail::add_site_term(m, pauli::x(), site, params.L, params.hx);
    detail::add_site_term(m, pauli::z(), site, params.L, hz[static_cast<std::size_t>(site - 1)]);
  }
  return HermitianOperator(std::move(m));
}

}  // namespace sffsim
