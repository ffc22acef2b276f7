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

// Counter-based random streams. Every random number in the library is a pure
// function of (base_seed, realization_id, stream tag, channel, position), so
// ensembles can be generated in any order or in parallel with identical
// results.

#include <array>
#include <cstdint>
#include <limits>

namespace sffsim {

/// Philox4x32-10 block function (Salmon et al., SC'11).
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr Counter generate(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

/// Independent random streams hanging off one realization.
enum class StreamTag : std::uint8_t {
  kDisorderX = 0,
  kDisorderY = 1,
  kDisorderZ = 2,
  kClifford = 3,
  kShots = 4,
  kNoisyShots = 5,
};

/// A keyed random stream. Position n of the stream maps to the Philox counter
/// (channel, n, realization_id[0:32], realization_id[32:56] << 8 | tag) under
/// key base_seed. Satisfies UniformRandomBitGenerator.
class CounterStream {
 public:
  using result_type = std::uint64_t;

  CounterStream(std::uint64_t base_seed, std::uint64_t realization_id,
                StreamTag tag, std::uint32_t channel = 0) noexcept
      : key_{static_cast<std::uint32_t>(base_seed),
             static_cast<std::uint32_t>(base_seed >> 32)},
        channel_(channel),
        rid_lo_(static_cast<std::uint32_t>(realization_id)),
        rid_hi_tag_(static_cast<std::uint32_t>(realization_id >> 32) << 8 |
                    static_cast<std::uint32_t>(tag)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  /// 64 random bits at an absolute stream position; does not advance.
  result_type at(std::uint32_t position) const noexcept {
    const auto out =
        Philox4x32::generate({channel_, position, rid_lo_, rid_hi_tag_}, key_);
    return std::uint64_t{out[0]} << 32 | out[1];
  }

  result_type operator()() noexcept { return at(position_++); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform_at(std::uint32_t position) const noexcept {
    return static_cast<double>(at(position) >> 11) * 0x1.0p-53;
  }

  double uniform() noexcept { return uniform_at(position_++); }

  /// Uniform integer in [0, bound) by multiply-shift.
  std::uint32_t below_at(std::uint32_t position, std::uint32_t bound) const noexcept {
    const unsigned __int128 wide =
        static_cast<unsigned __int128>(at(position)) * bound;
    return static_cast<std::uint32_t>(wide >> 64);
  }

  std::uint32_t position() const noexcept { return position_; }

 private:
  Philox4x32::Key key_;
  std::uint32_t channel_;
  std::uint32_t rid_lo_;
  std::uint32_t rid_hi_tag_;
  std::uint32_t position_ = 0;
};

}  // namespace sffsim
