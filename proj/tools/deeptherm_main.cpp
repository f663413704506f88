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

// deeptherm command-line driver.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "deeptherm/config.hpp"
#include "deeptherm/harness.hpp"
#include "deeptherm/io.hpp"
#include "deeptherm/metrics.hpp"
#include "deeptherm/targets.hpp"

namespace {

using namespace deeptherm;

// Flags mirroring ExperimentConfig; only the ones given override the
// config file.
struct ConfigFlags {
  std::string config_file;
  int n = 0, n_a = 0, k = 0, t_max = 0, realizations = 0, workers = 0;
  std::string initial, basis, target, window;
  std::uint64_t seed = 0;
  std::size_t mc_samples = 0, moment_cap = 0;

  CLI::Option* o_n = nullptr;
  CLI::Option* o_n_a = nullptr;
  CLI::Option* o_k = nullptr;
  CLI::Option* o_t_max = nullptr;
  CLI::Option* o_realizations = nullptr;
  CLI::Option* o_workers = nullptr;
  CLI::Option* o_initial = nullptr;
  CLI::Option* o_basis = nullptr;
  CLI::Option* o_target = nullptr;
  CLI::Option* o_window = nullptr;
  CLI::Option* o_seed = nullptr;
  CLI::Option* o_mc = nullptr;
  CLI::Option* o_cap = nullptr;

  void attach(CLI::App& app) {
    app.add_option("--config", config_file, "TOML file with ExperimentConfig keys")
        ->check(CLI::ExistingFile);
    o_n = app.add_option("--n", n, "number of qubits N");
    o_n_a = app.add_option("--n-a", n_a, "subsystem size N_A");
    o_k = app.add_option("--k", k, "moment order");
    o_initial = app.add_option("--initial", initial,
                               "theta:<t> | pattern:<unit> | haar-sector:<Q0> | neel | plus");
    o_basis = app.add_option("--basis", basis, "z | x | axis:<polar>:<azimuth> | axes:...");
    o_target = app.add_option("--target", target,
                              "haar | sector-haar:<QA> | direct-sum[:Q0] | scrooge[:z=<z>] | "
                              "gse[:analytic|:mc] | finite-n-scrooge[:Q0]");
    o_t_max = app.add_option("--t-max", t_max, "last time step (default 4N)");
    o_realizations = app.add_option("--realizations", realizations, "circuit realizations R");
    o_seed = app.add_option("--seed", seed, "master seed");
    o_window = app.add_option("--window", window, "plateau window <begin>:<end>");
    o_mc = app.add_option("--mc-samples", mc_samples, "Monte Carlo samples for sampled targets");
    o_cap = app.add_option("--moment-cap", moment_cap, "cap on d_A^k");
    o_workers = app.add_option("--workers", workers, "worker threads");
  }

  ExperimentConfig build() const {
    ExperimentConfig c;
    if (!config_file.empty()) {
      std::ifstream in(config_file);
      std::stringstream ss;
      ss << in.rdbuf();
      c = config_from_toml(ss.str());
    }
    if (*o_n) c.n = n;
    if (*o_n_a) c.n_a = n_a;
    if (*o_k) c.k = k;
    if (*o_initial) c.initial = InitialState::parse(initial);
    if (*o_basis) c.basis = MeasurementBasis::parse(basis);
    if (*o_target) c.target = parse_target(target);
    if (*o_t_max) c.t_max = t_max;
    if (*o_realizations) c.realizations = realizations;
    if (*o_seed) c.seed = seed;
    if (*o_window) {
      ExperimentConfig tmp = config_from_toml("plateau_window = \"" + window + "\"\n");
      c.plateau_window = tmp.plateau_window;
    }
    if (*o_mc) c.mc_samples = mc_samples;
    if (*o_cap) c.moment_cap = moment_cap;
    if (*o_workers) c.workers = workers;
    return c;
  }
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
}

void write_outputs(const std::string& prefix, std::span<const ResultRecord> records,
                   const std::string& meta) {
  std::ofstream csv(prefix + ".csv");
  if (!csv) throw std::runtime_error("cannot open '" + prefix + ".csv' for writing");
  write_results_csv(csv, records);
  write_file(prefix + ".json", meta);
  std::cout << "wrote " << prefix << ".csv and " << prefix << ".json\n";
}

std::vector<int> parse_sizes(const std::string& text) {
  std::vector<int> sizes;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) sizes.push_back(std::stoi(item));
  if (sizes.empty()) throw std::invalid_argument("--sizes: empty list");
  return sizes;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deeptherm: projected ensembles of U(1)-symmetric random circuits"};
  app.require_subcommand(1);

  ConfigFlags run_flags;
  std::string run_out = "run";
  auto* run = app.add_subcommand("run", "one experiment: distance vs time over realizations");
  run_flags.attach(*run);
  run->add_option("--out", run_out, "output prefix for <prefix>.csv and <prefix>.json");

  ConfigFlags sweep_flags;
  std::string sweep_out = "sweep";
  std::string sizes_text;
  std::string fit_kind = "exponential";
  auto* sweep = app.add_subcommand("sweep", "run over several N and fit the plateaus");
  sweep_flags.attach(*sweep);
  sweep->add_option("--sizes", sizes_text, "comma-separated list of N")->required();
  sweep->add_option("--fit", fit_kind, "exponential | power")
      ->check(CLI::IsMember({"exponential", "power"}));
  sweep->add_option("--out", sweep_out, "output prefix");

  int sc_n = 12, sc_n_a = 2, sc_q0 = 6, sc_k = 2;
  std::size_t sc_samples = 64;
  std::uint64_t sc_seed = 0;
  auto* concentration = app.add_subcommand("concentration", "distances of sector-Haar states to the direct sum");
  concentration->add_option("--n", sc_n, "number of qubits N")->capture_default_str();
  concentration->add_option("--n-a", sc_n_a, "subsystem size N_A")->capture_default_str();
  concentration->add_option("--q0", sc_q0, "total charge Q0")->capture_default_str();
  concentration->add_option("--k", sc_k, "moment order")->capture_default_str();
  concentration->add_option("--samples", sc_samples, "random sector states")->capture_default_str();
  concentration->add_option("--seed", sc_seed, "master seed")->required();

  int rep_max_n = 6, rep_max_replicas = 2, rep_max_k = 2;
  std::size_t rep_samples = 100000;
  std::uint64_t rep_seed = 0;
  bool rep_verbose = false;
  auto* replica = app.add_subcommand("replica", "exact vs Monte Carlo replica coefficients");
  replica->add_option("--max-n", rep_max_n, "largest N")->capture_default_str();
  replica->add_option("--max-replicas", rep_max_replicas, "largest extra replica count n")->capture_default_str();
  replica->add_option("--max-k", rep_max_k, "largest moment order k")->capture_default_str();
  replica->add_option("--samples", rep_samples, "Monte Carlo samples per cell")->capture_default_str();
  replica->add_option("--seed", rep_seed, "master seed")->required();
  replica->add_flag("--verbose", rep_verbose, "print every cell");

  ConfigFlags target_flags;
  std::string target_out;
  auto* target = app.add_subcommand("target", "dump a target moment operator");
  target_flags.attach(*target);
  target->add_option("--out", target_out, "matrix file (default stdout)");

  std::string dist_a, dist_b;
  auto* distance = app.add_subcommand("distance", "trace distance between two dumped matrices");
  distance->add_option("a", dist_a, "first matrix file")->required()->check(CLI::ExistingFile);
  distance->add_option("b", dist_b, "second matrix file")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const ExperimentConfig c = run_flags.build();
      if (!c.seed) throw std::invalid_argument("run: --seed is required");
      const ResultRecord rec = run_experiment(c);
      std::printf("N=%d N_A=%d k=%d target=%s plateau=%.6g (spread %.3g, %d points)\n", c.n,
                  c.n_a, c.k, to_string(c.target).c_str(), rec.plateau.mean, rec.plateau.spread,
                  rec.plateau.points);
      write_outputs(run_out, std::span(&rec, 1), metadata_json(rec));
    } else if (*sweep) {
      const ExperimentConfig c = sweep_flags.build();
      if (!c.seed) throw std::invalid_argument("sweep: --seed is required");
      const SweepResult res = run_scaling_sweep(
          c, parse_sizes(sizes_text), fit_kind == "power" ? FitKind::kPower : FitKind::kExponential);
      for (std::size_t i = 0; i < res.sizes.size(); ++i) {
        std::printf("N=%g plateau=%.6g\n", res.sizes[i], res.plateaus[i]);
      }
      if (res.exponential) std::printf("exponential rate %.4f per qubit\n", res.exponential->rate);
      if (res.power) std::printf("power-law exponent %.4f\n", res.power->exponent);
      if (res.degenerate) std::printf("single size: no fit\n");
      write_outputs(sweep_out, res.records, metadata_json(res));
    } else if (*concentration) {
      const SectorConcentrationStats st = verify_sector_concentration(sc_n, sc_n_a, sc_q0, sc_k, sc_samples, Stream(sc_seed));
      std::printf("N=%d N_A=%d Q0=%d k=%d samples=%zu mean=%.6g max=%.6g std=%.3g scaled=%.4g\n",
                  st.n, st.n_a, st.q0, st.k, st.samples, st.mean, st.max, st.std_dev, st.scaled_mean);
    } else if (*replica) {
      const ReplicaReport rep =
          verify_replica(rep_max_n, rep_max_replicas, rep_max_k, rep_samples, Stream(rep_seed));
      if (rep_verbose) {
        std::printf("%3s %3s %3s %2s %-10s %14s %14s %10s %7s\n", "N", "N_A", "Q_B", "n", "T",
                    "exact", "mc", "stderr", "z");
        for (const ReplicaRow& r : rep.rows) {
          std::string t;
          for (int x : r.t) t += std::to_string(x);
          std::printf("%3d %3d %3d %2d %-10s %14.6e %14.6e %10.2e %7.2f\n", r.n_qubits, r.n_a,
                      r.q_b, r.n, t.c_str(), r.exact, r.mc.mean, r.mc.std_error, r.z_score);
        }
      }
      std::printf("%zu cells, max |z| = %.3f (threshold %.1f): %s\n", rep.rows.size(),
                  rep.max_abs_z, rep.z_threshold, rep.passed ? "ok" : "FAILED");
      return rep.passed ? 0 : 1;
    } else if (*target) {
      ExperimentConfig c = target_flags.build();
      if (!c.seed) c.seed = 0;
      c.validate();
      TargetCache cache;
      const auto resolved = cache.get(c);
      const MomentOperator m = resolved->full();
      if (target_out.empty()) {
        write_moment(std::cout, m);
      } else {
        std::ofstream out(target_out);
        if (!out) throw std::runtime_error("cannot open '" + target_out + "'");
        write_moment(out, m);
      }
    } else if (*distance) {
      std::ifstream ia(dist_a), ib(dist_b);
      const MatrixDump a = read_matrix(ia);
      const MatrixDump b = read_matrix(ib);
      std::printf("%.17g\n", trace_distance(a.matrix, b.matrix));
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
