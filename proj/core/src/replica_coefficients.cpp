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

#include "deeptherm/replica_coefficients.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>

#include "deeptherm/types.hpp"

namespace deeptherm {

namespace {

void fill_types(int remaining, std::size_t pos, TypeVector& cur, std::vector<TypeVector>& out) {
  if (pos + 1 == cur.size()) {
    cur[pos] = remaining;
    out.push_back(cur);
    return;
  }
  // Lexicographic: the first entry counts up from 0.
  for (int v = 0; v <= remaining; ++v) {
    cur[pos] = v;
    fill_types(remaining - v, pos + 1, cur, out);
  }
}

int type_order(const TypeVector& t) {
  int k = 0;
  for (int x : t) {
    if (x < 0) throw std::invalid_argument("type vector has a negative entry");
    k += x;
  }
  return k;
}

// x^l with 0^0 = 1.
double ipow(double x, int l) { return l == 0 ? 1.0 : std::pow(x, l); }

void check_type(const ChargeDistribution& p, const TypeVector& t, int q_b) {
  const int n = p.n_qubits();
  const int n_a = static_cast<int>(t.size()) - 1;
  if (n_a < 0 || n_a >= n) throw std::invalid_argument("type vector length must be N_A + 1 <= N");
  if (q_b < 0 || q_b > n - n_a) throw std::invalid_argument("Q_B out of range");
  type_order(t);
}

}  // namespace

const std::vector<TypeVector>& enumerate_types(int k, int n_a) {
  if (k < 0 || n_a < 0) throw std::invalid_argument("enumerate_types: need k, N_A >= 0");
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::unique_ptr<std::vector<TypeVector>>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{k, n_a}];
  if (!slot) {
    slot = std::make_unique<std::vector<TypeVector>>();
    slot->reserve(binomial(k + n_a, n_a));
    TypeVector cur(static_cast<std::size_t>(n_a) + 1, 0);
    fill_types(k, 0, cur, *slot);
  }
  return *slot;
}

double multinomial(const TypeVector& t) {
  double result = 1.0;
  int total = 0;
  for (int x : t) {
    if (x < 0) throw std::invalid_argument("multinomial: negative entry");
    for (int i = 1; i <= x; ++i) result *= static_cast<double>(total + i) / i;
    total += x;
  }
  return result;
}

double fp_exact_integer_n(const ChargeDistribution& p, const TypeVector& t, int q_b, int n) {
  check_type(p, t, q_b);
  if (n < 0) throw std::invalid_argument("fp_exact_integer_n: n must be >= 0");
  const int big_n = p.n_qubits();
  const int n_a = static_cast<int>(t.size()) - 1;
  double total = 0.0;
  for (const TypeVector& tp : enumerate_types(n, n_a)) {
    double term = multinomial(tp);
    for (int q_a = 0; q_a <= n_a && term != 0.0; ++q_a) {
      const int l = t[static_cast<std::size_t>(q_a)] + tp[static_cast<std::size_t>(q_a)];
      if (l == 0) continue;
      const int q = q_a + q_b;
      if (p.at(q) == 0.0) {
        term = 0.0;
        break;
      }
      const double d_qa = binomial_real(n_a, q_a);
      const double d_q = binomial_real(big_n, q);
      double ratio = 1.0;
      for (int j = 0; j < l; ++j) ratio *= (d_qa + j) / (d_q + j);
      term *= ipow(p.at(q), l) * ratio;
    }
    total += term;
  }
  return total;
}

std::vector<Estimate> fp_mc_batch(const ChargeDistribution& p, int n_a, int q_b,
                                  std::span<const ReplicaCell> cells, std::size_t samples,
                                  const Stream& rng) {
  if (samples == 0) throw std::invalid_argument("fp_mc: need at least one sample");
  const int big_n = p.n_qubits();
  for (const ReplicaCell& cell : cells) {
    if (static_cast<int>(cell.t.size()) != n_a + 1) {
      throw std::invalid_argument("fp_mc: type vector length must be N_A + 1");
    }
    check_type(p, cell.t, q_b);
    if (cell.n < 0) throw std::invalid_argument("fp_mc: n must be >= 0");
  }
  if (big_n > 20) throw ConfigError("fp_mc: at most 20 qubits");
  const std::uint64_t z = (std::uint64_t{1} << q_b) - 1;
  const std::uint64_t d_a = std::uint64_t{1} << n_a;
  const std::size_t dim = std::size_t{1} << big_n;

  std::vector<double> mean(cells.size(), 0.0), m2(cells.size(), 0.0);
  std::vector<Complex> g(dim);
  std::vector<double> sector_norm(static_cast<std::size_t>(big_n) + 1);
  std::vector<double> joint(static_cast<std::size_t>(n_a) + 1);
  for (std::size_t i = 0; i < samples; ++i) {
    Stream s = rng.derive(static_cast<std::uint64_t>(i));
    // Independent Haar states Phi_Q on every sector: Gaussian amplitudes
    // normalized sector by sector. Psi = Sum_Q sqrt(p(Q)) Phi_Q.
    std::fill(sector_norm.begin(), sector_norm.end(), 0.0);
    for (std::size_t idx = 0; idx < dim; ++idx) {
      g[idx] = s.complex_normal();
      sector_norm[static_cast<std::size_t>(std::popcount(idx))] += std::norm(g[idx]);
    }
    std::fill(joint.begin(), joint.end(), 0.0);
    for (std::uint64_t a = 0; a < d_a; ++a) {
      const std::size_t idx = a + d_a * z;
      const auto q = static_cast<std::size_t>(std::popcount(idx));
      joint[static_cast<std::size_t>(std::popcount(a))] +=
          p.at(static_cast<int>(q)) * std::norm(g[idx]) / sector_norm[q];
    }
    double marginal = 0.0;
    for (double x : joint) marginal += x;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double value = ipow(marginal, cells[c].n);
      for (int q_a = 0; q_a <= n_a; ++q_a) {
        value *= ipow(joint[static_cast<std::size_t>(q_a)], cells[c].t[static_cast<std::size_t>(q_a)]);
      }
      // Welford update.
      const double delta = value - mean[c];
      mean[c] += delta / static_cast<double>(i + 1);
      m2[c] += delta * (value - mean[c]);
    }
  }
  std::vector<Estimate> out(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    out[c].mean = mean[c];
    out[c].samples = samples;
    out[c].std_error = samples > 1 ? std::sqrt(m2[c] / static_cast<double>(samples - 1) /
                                               static_cast<double>(samples))
                                   : 0.0;
  }
  return out;
}

Estimate fp_mc(const ChargeDistribution& p, const TypeVector& t, int q_b, int n,
               std::size_t samples, const Stream& rng) {
  const ReplicaCell cell{t, n};
  return fp_mc_batch(p, static_cast<int>(t.size()) - 1, q_b, std::span(&cell, 1), samples, rng)
      .front();
}

double fp_replica_limit_z(const ChargeDistribution& p, const TypeVector& t, int q_b) {
  check_type(p, t, q_b);
  const int n_a = static_cast<int>(t.size()) - 1;
  const int n_b = p.n_qubits() - n_a;
  const std::vector<double> bath = bath_charge_distribution(p, n_a);
  const std::vector<double> post = posterior_charge_distribution(p, n_a, q_b);
  double value = bath[static_cast<std::size_t>(q_b)] / binomial_real(n_b, q_b);
  for (int q_a = 0; q_a <= n_a; ++q_a) {
    value *= ipow(post[static_cast<std::size_t>(q_a + q_b)], t[static_cast<std::size_t>(q_a)]);
  }
  return value;
}

double fp_replica_limit_x(int n, int n_a, int q0, const TypeVector& t) {
  if (static_cast<int>(t.size()) != n_a + 1) {
    throw std::invalid_argument("fp_replica_limit_x: type vector length must be N_A + 1");
  }
  type_order(t);
  const std::vector<double> prior = sector_prior(n, n_a, q0);
  double value = std::ldexp(1.0, -(n - n_a));
  for (int q_a = 0; q_a <= n_a; ++q_a) {
    value *= ipow(prior[static_cast<std::size_t>(q_a)], t[static_cast<std::size_t>(q_a)]);
  }
  return value;
}

}  // namespace deeptherm
