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

#ifndef DEEPTHERM_TYPES_HPP
#define DEEPTHERM_TYPES_HPP

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace deeptherm {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Raised when a run is misconfigured in a way no retry can fix: integer
/// overflow in exact combinatorics, a moment operator that would exceed the
/// memory budget, an impossible sector, etc.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Default cap on d_A^k for dense moment operators.
inline constexpr std::size_t kDefaultMomentCap = 4096;

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace deeptherm

#endif  // DEEPTHERM_TYPES_HPP
