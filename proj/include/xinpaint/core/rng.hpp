/*
Copyright 2026 The xinpaint Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS-IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#ifndef XINPAINT_CORE_RNG_HPP_
#define XINPAINT_CORE_RNG_HPP_

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <utility>

#include "xinpaint/core/error.hpp"

namespace xinpaint {

// Identifier written into manifests and run records. Bump the suffix if the
// draw sequence of SeededRng ever changes.
inline constexpr std::string_view kRngAlgorithm = "splitmix64-ctr/1";

namespace rng_detail {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// SplitMix64 output finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// FNV-1a over the stream label bytes.
constexpr std::uint64_t hash_label(std::string_view label) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ull;
  }
  return h;
}

}  // namespace rng_detail

// Counter-based generator keyed by (seed, stream). Draw i is a pure function
// of the key and i, so sequences are identical on every platform and
// sub-streams can be split off by name without consuming draws.
//
// Integer and real distributions are implemented here rather than taken from
// <random>, whose distributions are implementation-defined.
class SeededRng {
 public:
  using result_type = std::uint64_t;

  explicit SeededRng(std::uint64_t seed, std::string_view stream = {})
      : seed_(seed),
        stream_(stream),
        key_(rng_detail::mix64(seed ^ rng_detail::mix64(
                                          rng_detail::hash_label(stream)))) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()() { return next_u64(); }

  std::uint64_t seed() const { return seed_; }
  const std::string& stream() const { return stream_; }
  std::uint64_t counter() const { return counter_; }

  // Draw at an absolute position; does not advance the counter.
  std::uint64_t draw_at(std::uint64_t index) const {
    return rng_detail::mix64(key_ + (index + 1) * rng_detail::kGolden);
  }

  std::uint64_t next_u64() { return draw_at(counter_++); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform_real(double lo, double hi) {
    return lo + (hi - lo) * uniform();
  }

  // Uniform integer in the closed interval [lo, hi]; unbiased.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    if (lo > hi) {
      throw InvalidArgument("uniform_int: empty interval [" +
                            std::to_string(lo) + ", " + std::to_string(hi) +
                            "]");
    }
    const std::uint64_t span =
        static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo);
    if (span == std::numeric_limits<std::uint64_t>::max()) {
      return static_cast<std::int64_t>(next_u64());
    }
    const std::uint64_t range = span + 1;
    // Lemire's multiply-and-reject.
    unsigned __int128 m =
        static_cast<unsigned __int128>(next_u64()) * range;
    auto low = static_cast<std::uint64_t>(m);
    if (low < range) {
      const std::uint64_t threshold = (0 - range) % range;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(next_u64()) * range;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return lo + static_cast<std::int64_t>(m >> 64);
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Independent generator for a named child stream. Does not advance this
  // generator.
  SeededRng split(std::string_view name) const {
    std::string child = stream_;
    child += '/';
    child += name;
    return SeededRng(seed_, child);
  }

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(
          uniform_int(0, static_cast<std::int64_t>(i - 1)));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::uint64_t seed_;
  std::string stream_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace xinpaint

#endif  // XINPAINT_CORE_RNG_HPP_
