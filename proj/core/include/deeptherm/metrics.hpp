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

// Distances between moment operators, plateau extraction and scaling fits.

#ifndef DEEPTHERM_METRICS_HPP
#define DEEPTHERM_METRICS_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "deeptherm/replicas.hpp"
#include "deeptherm/types.hpp"

namespace deeptherm {

/// (1/2) sum |eig(a - b)|. Both inputs are symmetrized first; an
/// anti-Hermitian part above 1e-8 (max entry) throws std::invalid_argument,
/// as does a dimension mismatch.
double trace_distance(const CMatrix& a, const CMatrix& b);
double trace_distance(const MomentOperator& a, const MomentOperator& b);

struct TimeSeries {
  std::vector<int> times;
  std::vector<double> values;
  int realization = -1;
  std::string fingerprint;

  /// Throws std::invalid_argument unless sizes match, times strictly
  /// increase and values are non-negative.
  void validate() const;
};

/// Inclusive time window [t_begin, t_end].
struct TimeWindow {
  int t_begin = 0;
  int t_end = 0;
};

/// Last third of [0, t_max]: [t_max - t_max / 3, t_max].
TimeWindow default_plateau_window(int t_max);

struct Plateau {
  double mean = 0.0;
  /// Sample standard deviation of the values inside the window.
  double spread = 0.0;
  int points = 0;
};

/// Mean and spread over the points of `series` inside `window`. Throws
/// std::invalid_argument when fewer than `min_points` points fall inside.
Plateau plateau_average(const TimeSeries& series, const TimeWindow& window, int min_points = 5);

struct ExponentialFit {
  /// y ~ prefactor * 2^{-rate x}.
  double rate = 0.0;
  double prefactor = 0.0;
  /// Root-mean-square residual of the fit in log2 y.
  double residual = 0.0;
};

struct PowerFit {
  /// y ~ prefactor * x^exponent.
  double exponent = 0.0;
  double prefactor = 0.0;
  /// Root-mean-square residual in log2 y.
  double residual = 0.0;
};

/// Least squares on (x, log2 y). Needs at least two points and y > 0.
ExponentialFit exponential_fit(std::span<const double> x, std::span<const double> y);
/// Least squares on (log2 x, log2 y). Needs at least two points, x, y > 0.
PowerFit power_fit(std::span<const double> x, std::span<const double> y);

}  // namespace deeptherm

#endif  // DEEPTHERM_METRICS_HPP
