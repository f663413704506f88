// Copyright 2026 The deeptherm Authors
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

#ifndef DEEPTHERM_RNG_HPP
#define DEEPTHERM_RNG_HPP

#include <cstdint>
#include <initializer_list>
#include <limits>

#include "deeptherm/types.hpp"

namespace deeptherm {

/// Splittable SplitMix64 stream.
///
/// A stream is identified by a 64-bit key; derive() hashes additional keys
/// into a fresh, statistically independent stream without advancing the
/// parent. The harness keys realizations on their index and gates on
/// (time step, half-layer, position), so results never depend on the order
/// in which work is scheduled.
///
/// Satisfies UniformRandomBitGenerator.
class Stream {
 public:
  using result_type = std::uint64_t;

  explicit Stream(std::uint64_t seed = 0);

  Stream derive(std::uint64_t key) const;
  Stream derive(std::initializer_list<std::uint64_t> keys) const;

  result_type operator()();
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform();
  /// Standard normal via Box-Muller; no hidden cached state.
  double normal();
  /// Re and Im independent standard normals.
  Complex complex_normal();

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// SplitMix64 finalizer; exposed for fingerprinting and seeding.
std::uint64_t mix64(std::uint64_t x);

}  // namespace deeptherm

#endif  // DEEPTHERM_RNG_HPP
