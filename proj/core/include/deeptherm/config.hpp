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

// Experiment configuration and its JSON / TOML forms.

#ifndef DEEPTHERM_CONFIG_HPP
#define DEEPTHERM_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "deeptherm/ensembles.hpp"
#include "deeptherm/metrics.hpp"
#include "deeptherm/rng.hpp"
#include "deeptherm/sectors.hpp"
#include "deeptherm/simulator.hpp"
#include "deeptherm/targets.hpp"

namespace deeptherm {

/// Initial state family.
struct InitialState {
  enum class Kind { kTheta, kPattern, kHaarSector };

  Kind kind = Kind::kTheta;
  double theta = 0.0;        ///< kTheta
  std::string pattern = "01";  ///< kPattern: unit tiled to N qubits
  int q0 = 0;                ///< kHaarSector

  static InitialState neel() { return {Kind::kTheta, 0.0, "01", 0}; }
  static InitialState from_theta(double theta) { return {Kind::kTheta, theta, "01", 0}; }
  static InitialState from_pattern(std::string unit) { return {Kind::kPattern, 0.0, std::move(unit), 0}; }
  static InitialState haar_sector(int q0) { return {Kind::kHaarSector, 0.0, "01", q0}; }

  /// "theta:<t>", "pattern:<unit>" or "haar-sector:<Q0>"; parse also accepts
  /// "neel" and "plus" (theta = 0 and pi/4).
  std::string to_string() const;
  static InitialState parse(std::string_view text);

  friend bool operator==(const InitialState&, const InitialState&) = default;
};

/// Prepares the state on n qubits. Only kHaarSector consumes rng.
StateVector prepare_initial_state(const InitialState& init, int n, Stream& rng);

/// p(Q) of the initial state, hence of every evolved state.
ChargeDistribution initial_charge_distribution(const InitialState& init, int n);

struct ExperimentConfig {
  int n = 8;
  int n_a = 2;
  int k = 2;
  InitialState initial = InitialState::neel();
  MeasurementBasis basis = MeasurementBasis::z();
  TargetSpec target = HaarTarget{};
  /// Defaults to 4N.
  std::optional<int> t_max;
  int realizations = 32;
  std::optional<std::uint64_t> seed;
  /// Defaults to the last third of [0, t_max].
  std::optional<TimeWindow> plateau_window;
  std::size_t mc_samples = 1'000'000;
  std::size_t moment_cap = kDefaultMomentCap;
  int workers = 1;

  int effective_t_max() const { return t_max.value_or(4 * n); }
  TimeWindow effective_window() const;

  /// Throws std::invalid_argument (or ConfigError for budget violations)
  /// when any precondition downstream would fail.
  void validate() const;
};

std::string to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(std::string_view text);

/// key = value lines; keys are the JSON field names.
std::string to_toml(const ExperimentConfig& config);
ExperimentConfig config_from_toml(std::string_view text);

/// 16 hex digits identifying the canonical JSON form.
std::string fingerprint(const ExperimentConfig& config);

}  // namespace deeptherm

#endif  // DEEPTHERM_CONFIG_HPP
