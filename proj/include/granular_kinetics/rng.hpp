// Copyright 2026 The granular-kinetics Authors.
// SPDX-License-Identifier: Apache-2.0
//! \file rng.hpp
//! Counter-based random streams.
//!
//! Output block i of stream s under seed k is Philox4x32-10 applied to the
//! 128-bit counter (i_lo, i_hi, s_lo, s_hi) with the 64-bit key (k_lo, k_hi).
//! Each block yields four 32-bit words, consumed in order. Doubles in [0,1)
//! take the top 53 bits of two consecutive words; normals use Box-Muller on
//! two such doubles and hand out both variates.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace gk {

namespace detail {
inline void mulhilo32(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}
}  // namespace detail

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

//! The Philox4x32 bijection with 10 rounds.
inline PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) {
  constexpr std::uint32_t kMul0 = 0xD2511F53u;
  constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    detail::mulhilo32(kMul0, ctr[0], hi0, lo0);
    detail::mulhilo32(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

//! Independent random stream identified by (seed, stream id).
//!
//! Satisfies UniformRandomBitGenerator with 32-bit results.
class RandomStream {
 public:
  using result_type = std::uint32_t;

  RandomStream(std::uint64_t seed, std::uint64_t stream_id)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream_id) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (word_ == kBufferWords) refill();
    return buffer_[word_++];
  }

  //! Uniform double in [0, 1) with 53 random bits.
  double uniform() {
    const std::uint64_t hi = (*this)();
    const std::uint64_t lo = (*this)();
    const std::uint64_t bits = ((hi << 32) | lo) >> 11;
    return static_cast<double>(bits) * 0x1.0p-53;
  }

  //! Uniform double in (0, 1].
  double uniform_open_zero() { return 1.0 - uniform(); }

  //! Uniform integer in [0, n) by Lemire's multiply-shift with rejection.
  std::uint64_t index(std::uint64_t n) {
    if (n <= 0xFFFFFFFFull) {
      const auto bound = static_cast<std::uint32_t>(n);
      std::uint64_t m = static_cast<std::uint64_t>((*this)()) * bound;
      auto low = static_cast<std::uint32_t>(m);
      if (low < bound) {
        const std::uint32_t threshold = static_cast<std::uint32_t>(-bound) % bound;
        while (low < threshold) {
          m = static_cast<std::uint64_t>((*this)()) * bound;
          low = static_cast<std::uint32_t>(m);
        }
      }
      return m >> 32;
    }
    // Rare wide path: rejection on 64-bit draws.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
      x = (static_cast<std::uint64_t>((*this)()) << 32) | (*this)();
    } while (x >= limit);
    return x % n;
  }

  //! Standard normal variate (Box-Muller, both outputs used).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double radius = std::sqrt(-2.0 * std::log(uniform_open_zero()));
    const double angle = 2.0 * std::numbers::pi * uniform();
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  std::uint64_t stream_id() const noexcept { return stream_; }

 private:
  static constexpr int kBlocks = 8;
  static constexpr int kBufferWords = 4 * kBlocks;

  // Evaluates kBlocks consecutive counters at once; the word sequence is the same
  // as calling philox4x32_10 block by block.
  void refill() {
    constexpr std::uint32_t kMul0 = 0xD2511F53u;
    constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
    std::uint32_t c0[kBlocks], c1[kBlocks], c2[kBlocks], c3[kBlocks];
    for (int b = 0; b < kBlocks; ++b) {
      const std::uint64_t block = block_ + static_cast<std::uint64_t>(b);
      c0[b] = static_cast<std::uint32_t>(block);
      c1[b] = static_cast<std::uint32_t>(block >> 32);
      c2[b] = static_cast<std::uint32_t>(stream_);
      c3[b] = static_cast<std::uint32_t>(stream_ >> 32);
    }
    std::uint32_t k0 = key_[0], k1 = key_[1];
    for (int round = 0; round < 10; ++round) {
      for (int b = 0; b < kBlocks; ++b) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c0[b];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c2[b];
        const std::uint32_t n0 = static_cast<std::uint32_t>(p1 >> 32) ^ c1[b] ^ k0;
        const std::uint32_t n2 = static_cast<std::uint32_t>(p0 >> 32) ^ c3[b] ^ k1;
        c1[b] = static_cast<std::uint32_t>(p1);
        c3[b] = static_cast<std::uint32_t>(p0);
        c0[b] = n0;
        c2[b] = n2;
      }
      k0 += kWeyl0;
      k1 += kWeyl1;
    }
    for (int b = 0; b < kBlocks; ++b) {
      buffer_[4 * b] = c0[b];
      buffer_[4 * b + 1] = c1[b];
      buffer_[4 * b + 2] = c2[b];
      buffer_[4 * b + 3] = c3[b];
    }
    block_ += kBlocks;
    word_ = 0;
  }

  PhiloxKey key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, kBufferWords> buffer_{};
  int word_ = kBufferWords;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

//! Stream ids used by the solver and experiments: (purpose tag, replica).
enum class StreamPurpose : std::uint64_t {
  kInitialState = 1,
  kDynamics = 2,
  kDiagnostics = 3,
  kBootstrap = 4,
  kNoiseFloor = 5,
  kUser = 6,
};

inline std::uint64_t stream_id(StreamPurpose purpose, std::uint64_t phase, std::uint64_t replica) {
  return (static_cast<std::uint64_t>(purpose) << 56) | ((phase & 0xFFull) << 48) |
         (replica & 0xFFFFFFFFFFFFull);
}

}  // namespace gk
