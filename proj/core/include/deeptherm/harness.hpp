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

// Experiment orchestration: realizations, distance time series, scaling
// sweeps and the verification drivers.

#ifndef DEEPTHERM_HARNESS_HPP
#define DEEPTHERM_HARNESS_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "deeptherm/config.hpp"
#include "deeptherm/metrics.hpp"
#include "deeptherm/replica_coefficients.hpp"
#include "deeptherm/targets.hpp"

namespace deeptherm {

/// Stream keys derived from the master seed.
inline constexpr std::uint64_t kTargetStreamKey = 0x7461726765740000ULL;
inline constexpr std::uint64_t kRealizationStreamKey = 0x7265616c697a0000ULL;
inline constexpr std::uint64_t kInitialStateStreamKey = 0x696e697400000000ULL;

/// Resolved targets keyed on everything that determines them.
class TargetCache {
 public:
  std::shared_ptr<const ResolvedTarget> get(const ExperimentConfig& config);
  std::size_t size() const;
  std::size_t hits() const { return hits_; }

 private:
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<const ResolvedTarget>> entries_;
  std::size_t hits_ = 0;
};

struct ResultRecord {
  ExperimentConfig config;
  std::string fingerprint;
  std::vector<int> times;
  /// Mean and standard deviation over realizations of the per-realization
  /// distances at each time.
  std::vector<double> mean_delta;
  std::vector<double> std_delta;
  /// Successful realizations in index order.
  std::vector<TimeSeries> realizations;
  /// (realization index, error message).
  std::vector<std::pair<int, std::string>> failures;
  /// Plateau of the mean series over the configured window.
  Plateau plateau;
  TimeWindow window;
  double target_trace_defect = 0.0;
  std::size_t target_samples = 0;
};

/// Pointwise mean and standard deviation across series with identical time
/// grids: distances are averaged after they are computed.
std::pair<std::vector<double>, std::vector<double>> mean_series(
    const std::vector<TimeSeries>& series);

/// Distance series of one realization against a resolved target.
TimeSeries run_realization(const ExperimentConfig& config, const ResolvedTarget& target,
                           int realization);

using RealizationRunner =
    std::function<TimeSeries(const ExperimentConfig&, const ResolvedTarget&, int)>;

/// Throws std::invalid_argument for an invalid config (including a missing
/// seed) and std::runtime_error when more than 10% of realizations fail.
/// A realization fails when `runner` (run_realization by default) throws;
/// its message is kept in ResultRecord::failures.
ResultRecord run_experiment(const ExperimentConfig& config, TargetCache* cache = nullptr,
                            const RealizationRunner& runner = run_realization);

enum class FitKind { kExponential, kPower };

struct SweepResult {
  std::vector<ResultRecord> records;
  std::vector<double> sizes;
  std::vector<double> plateaus;
  FitKind fit_kind = FitKind::kExponential;
  std::optional<ExponentialFit> exponential;
  std::optional<PowerFit> power;
  /// Fewer than two sizes: no fit, plateaus only.
  bool degenerate = false;
};

/// run_experiment for each N (t_max and window default per N unless set
/// in the base config), then a fit of plateau against N.
SweepResult run_scaling_sweep(const ExperimentConfig& base, const std::vector<int>& sizes,
                              FitKind fit = FitKind::kExponential, TargetCache* cache = nullptr);

struct SectorConcentrationStats {
  int n = 0;
  int n_a = 0;
  int q0 = 0;
  int k = 0;
  std::size_t samples = 0;
  double mean = 0.0;
  double max = 0.0;
  double std_dev = 0.0;
  /// mean * C(N, Q0)^{1/2}.
  double scaled_mean = 0.0;
};

/// Distances from the projected ensembles of sector-Haar states (z basis)
/// to the direct-sum moment. Sample i uses rng.derive(i).
SectorConcentrationStats verify_sector_concentration(int n, int n_a, int q0, int k, std::size_t samples,
                              const Stream& rng);

struct ReplicaRow {
  int n_qubits = 0;
  int n_a = 0;
  int q_b = 0;
  int n = 0;
  TypeVector t;
  double exact = 0.0;
  Estimate mc;
  double z_score = 0.0;
};

struct ReplicaReport {
  std::vector<ReplicaRow> rows;
  double max_abs_z = 0.0;
  double z_threshold = 4.0;
  bool passed = false;
};

/// The charge distribution verify_replica uses for N qubits: independent
/// excitations with probabilities spread over [0.2, 0.8].
ChargeDistribution replica_test_distribution(int n);

/// fp_exact_integer_n vs fp_mc over 2 <= N <= max_n, 1 <= N_A <= min(2, N-1),
/// 1 <= n <= max_replicas, 1 <= k <= max_k, all types and all Q_B.
ReplicaReport verify_replica(int max_n, int max_replicas, int max_k, std::size_t samples,
                             const Stream& rng, double z_threshold = 4.0);

}  // namespace deeptherm

#endif  // DEEPTHERM_HARNESS_HPP
