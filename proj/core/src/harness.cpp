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

#include "deeptherm/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "deeptherm/ensembles.hpp"
#include "deeptherm/simulator.hpp"

namespace deeptherm {

namespace {

// Runs body(i) for i in [0, count) on up to `workers` threads. Exceptions
// are the body's responsibility.
template <class Body>
void parallel_for(int count, int workers, Body body) {
  const int n_threads = std::max(1, std::min(workers, count));
  if (n_threads == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < n_threads; ++t) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

std::string cache_key(const ExperimentConfig& c) {
  std::string key = std::to_string(c.n) + "|" + std::to_string(c.n_a) + "|" + std::to_string(c.k) +
                    "|" + to_string(c.target) + "|" + c.initial.to_string() + "|" +
                    std::to_string(c.moment_cap);
  const bool sampled = std::holds_alternative<ScroogeTarget>(c.target) ||
                       std::holds_alternative<FiniteNScroogeTarget>(c.target) ||
                       (std::holds_alternative<GseTarget>(c.target) &&
                        std::get<GseTarget>(c.target).method == GseTarget::Method::kMonteCarlo);
  if (sampled) key += "|" + std::to_string(*c.seed) + "|" + std::to_string(c.mc_samples);
  return key;
}

ResolvedTarget resolve_for(const ExperimentConfig& c) {
  TargetContext ctx;
  ctx.n = c.n;
  ctx.n_a = c.n_a;
  ctx.k = c.k;
  ctx.p = initial_charge_distribution(c.initial, c.n);
  ctx.mc_samples = c.mc_samples;
  ctx.rng = Stream(*c.seed).derive(kTargetStreamKey);
  ctx.workers = c.workers;
  ctx.cap = c.moment_cap;
  return resolve_target(c.target, ctx);
}

void require_seed(const ExperimentConfig& c) {
  if (!c.seed) throw std::invalid_argument("a master seed is required");
}

}  // namespace

std::shared_ptr<const ResolvedTarget> TargetCache::get(const ExperimentConfig& config) {
  require_seed(config);
  const auto* scrooge = std::get_if<ScroogeTarget>(&config.target);
  if (scrooge && scrooge->rho) return std::make_shared<const ResolvedTarget>(resolve_for(config));
  const std::string key = cache_key(config);
  {
    std::lock_guard lock(mutex_);
    auto it = entries_.find(key);
    if (it != entries_.end()) {
      ++hits_;
      return it->second;
    }
  }
  auto resolved = std::make_shared<const ResolvedTarget>(resolve_for(config));
  std::lock_guard lock(mutex_);
  return entries_.emplace(key, std::move(resolved)).first->second;
}

std::size_t TargetCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

std::pair<std::vector<double>, std::vector<double>> mean_series(
    const std::vector<TimeSeries>& series) {
  if (series.empty()) throw std::invalid_argument("mean_series: no series");
  const std::size_t len = series.front().values.size();
  for (const TimeSeries& s : series) {
    if (s.times != series.front().times || s.values.size() != len) {
      throw std::invalid_argument("mean_series: series have different time grids");
    }
  }
  std::vector<double> mean(len, 0.0), sd(len, 0.0);
  const auto count = static_cast<double>(series.size());
  for (std::size_t t = 0; t < len; ++t) {
    for (const TimeSeries& s : series) mean[t] += s.values[t];
    mean[t] /= count;
    if (series.size() > 1) {
      double ss = 0.0;
      for (const TimeSeries& s : series) ss += (s.values[t] - mean[t]) * (s.values[t] - mean[t]);
      sd[t] = std::sqrt(ss / (count - 1.0));
    }
  }
  return {mean, sd};
}

TimeSeries run_realization(const ExperimentConfig& config, const ResolvedTarget& target,
                           int realization) {
  require_seed(config);
  if (target.local_dim != (1 << config.n_a) || target.k != config.k) {
    throw std::invalid_argument("run_realization: target does not match the config");
  }
  const Stream stream =
      Stream(*config.seed).derive({kRealizationStreamKey, static_cast<std::uint64_t>(realization)});
  Stream init_stream = stream.derive(kInitialStateStreamKey);
  StateVector state = prepare_initial_state(config.initial, config.n, init_stream);
  const SymmetricBasis sym(1 << config.n_a, config.k);

  TimeSeries series;
  series.realization = realization;
  series.fingerprint = fingerprint(config);
  const int t_max = config.effective_t_max();
  for (int t = 0; t <= t_max; ++t) {
    if (t > 0) brickwork_step(state, stream.derive(static_cast<std::uint64_t>(t)));
    const ProjectedEnsemble ens = project(state, config.n_a, config.basis);
    series.times.push_back(t);
    series.values.push_back(trace_distance(symmetric_moment(ens, sym), target.matrix));
  }
  return series;
}

ResultRecord run_experiment(const ExperimentConfig& config, TargetCache* cache,
                            const RealizationRunner& runner) {
  config.validate();
  require_seed(config);
  TargetCache local;
  TargetCache& targets = cache ? *cache : local;
  const std::shared_ptr<const ResolvedTarget> target = targets.get(config);

  const int r_count = config.realizations;
  std::vector<std::optional<TimeSeries>> results(static_cast<std::size_t>(r_count));
  std::vector<std::string> errors(static_cast<std::size_t>(r_count));
  parallel_for(r_count, config.workers, [&](int r) {
    try {
      results[static_cast<std::size_t>(r)] = runner(config, *target, r);
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(r)] = e.what();
    }
  });

  ResultRecord rec;
  rec.config = config;
  rec.fingerprint = fingerprint(config);
  rec.window = config.effective_window();
  rec.target_trace_defect = target->trace_defect;
  rec.target_samples = target->samples;
  for (int r = 0; r < r_count; ++r) {
    auto& res = results[static_cast<std::size_t>(r)];
    if (res) rec.realizations.push_back(std::move(*res));
    else rec.failures.emplace_back(r, errors[static_cast<std::size_t>(r)]);
  }
  if (rec.failures.size() * 10 > static_cast<std::size_t>(r_count)) {
    throw std::runtime_error("run failed: " + std::to_string(rec.failures.size()) + " of " +
                             std::to_string(r_count) + " realizations failed; first error: " +
                             rec.failures.front().second);
  }
  rec.times = rec.realizations.front().times;
  std::tie(rec.mean_delta, rec.std_delta) = mean_series(rec.realizations);
  TimeSeries mean;
  mean.times = rec.times;
  mean.values = rec.mean_delta;
  mean.fingerprint = rec.fingerprint;
  rec.plateau = plateau_average(mean, rec.window, 1);
  return rec;
}

SweepResult run_scaling_sweep(const ExperimentConfig& base, const std::vector<int>& sizes,
                              FitKind fit, TargetCache* cache) {
  if (sizes.empty()) throw std::invalid_argument("run_scaling_sweep: no system sizes");
  SweepResult out;
  out.fit_kind = fit;
  for (int n : sizes) {
    ExperimentConfig c = base;
    c.n = n;
    out.records.push_back(run_experiment(c, cache));
    out.sizes.push_back(n);
    out.plateaus.push_back(out.records.back().plateau.mean);
  }
  if (sizes.size() < 2) {
    out.degenerate = true;
    return out;
  }
  if (fit == FitKind::kExponential) out.exponential = exponential_fit(out.sizes, out.plateaus);
  else out.power = power_fit(out.sizes, out.plateaus);
  return out;
}

SectorConcentrationStats verify_sector_concentration(int n, int n_a, int q0, int k, std::size_t samples,
                              const Stream& rng) {
  if (samples == 0) throw std::invalid_argument("verify_sector_concentration: need at least one sample");
  if (q0 < 0 || q0 > n) throw std::invalid_argument("verify_sector_concentration: Q0 out of range");
  const SymmetricBasis sym(1 << n_a, k);
  const CMatrix target = direct_sum_moment_sym(sym, n, n_a, q0);
  SectorConcentrationStats st;
  st.n = n;
  st.n_a = n_a;
  st.q0 = q0;
  st.k = k;
  st.samples = samples;
  std::vector<double> d(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    Stream s = rng.derive(static_cast<std::uint64_t>(i));
    const StateVector state = haar_random_sector_state(n, q0, s);
    d[i] = trace_distance(symmetric_moment(project(state, n_a, MeasurementBasis::z()), sym), target);
  }
  for (double x : d) {
    st.mean += x;
    st.max = std::max(st.max, x);
  }
  st.mean /= static_cast<double>(samples);
  if (samples > 1) {
    double ss = 0.0;
    for (double x : d) ss += (x - st.mean) * (x - st.mean);
    st.std_dev = std::sqrt(ss / static_cast<double>(samples - 1));
  }
  st.scaled_mean = st.mean * std::sqrt(binomial_real(n, q0));
  return st;
}

ChargeDistribution replica_test_distribution(int n) {
  std::vector<double> e(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    e[static_cast<std::size_t>(i)] = n > 1 ? 0.2 + 0.6 * i / (n - 1) : 0.5;
  }
  return product_state_charge_distribution(e);
}

ReplicaReport verify_replica(int max_n, int max_replicas, int max_k, std::size_t samples,
                             const Stream& rng, double z_threshold) {
  if (samples == 0) throw std::invalid_argument("verify_replica: need at least one sample");
  if (max_n < 2 || max_replicas < 1 || max_k < 1) {
    throw std::invalid_argument("verify_replica: need max N >= 2, max n >= 1, max k >= 1");
  }
  ReplicaReport report;
  report.z_threshold = z_threshold;
  for (int big_n = 2; big_n <= max_n; ++big_n) {
    const ChargeDistribution p = replica_test_distribution(big_n);
    for (int n_a = 1; n_a <= std::min(2, big_n - 1); ++n_a) {
      std::vector<ReplicaCell> cells;
      for (int n = 1; n <= max_replicas; ++n) {
        for (int k = 1; k <= max_k; ++k) {
          for (const TypeVector& t : enumerate_types(k, n_a)) cells.push_back({t, n});
        }
      }
      for (int q_b = 0; q_b <= big_n - n_a; ++q_b) {
        const Stream cell_rng = rng.derive({static_cast<std::uint64_t>(big_n),
                                            static_cast<std::uint64_t>(n_a),
                                            static_cast<std::uint64_t>(q_b)});
        const std::vector<Estimate> est = fp_mc_batch(p, n_a, q_b, cells, samples, cell_rng);
        for (std::size_t c = 0; c < cells.size(); ++c) {
          ReplicaRow row;
          row.n_qubits = big_n;
          row.n_a = n_a;
          row.q_b = q_b;
          row.n = cells[c].n;
          row.t = cells[c].t;
          row.exact = fp_exact_integer_n(p, cells[c].t, q_b, cells[c].n);
          row.mc = est[c];
          const double diff = row.mc.mean - row.exact;
          if (row.mc.std_error > 0.0) row.z_score = diff / row.mc.std_error;
          else row.z_score = std::abs(diff) < 1e-12 ? 0.0 : std::numeric_limits<double>::infinity();
          report.max_abs_z = std::max(report.max_abs_z, std::abs(row.z_score));
          report.rows.push_back(std::move(row));
        }
      }
    }
  }
  report.passed = report.max_abs_z <= z_threshold;
  return report;
}

}  // namespace deeptherm
