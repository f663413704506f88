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

#include "deeptherm/sectors.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "deeptherm/types.hpp"

namespace deeptherm {

namespace {

__extension__ using u128 = unsigned __int128;

constexpr double kSumTolerance = 1e-12;

// Ratio of two exact integers, converted to floating point only at the end.
double exact_ratio(u128 num, u128 den) {
  return static_cast<double>(num) / static_cast<double>(den);
}

void require_subsystem(int n, int n_a) {
  if (n < 0 || n_a < 0 || n_a > n) {
    throw std::invalid_argument("subsystem size " + std::to_string(n_a) +
                                " invalid for " + std::to_string(n) + " qubits");
  }
}

}  // namespace

std::uint64_t binomial(int n, int k) {
  if (n < 0) throw std::invalid_argument("binomial: negative n");
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  u128 c = 1;
  for (int i = 0; i < k; ++i) {
    // c * (n - i) is divisible by (i + 1) at every step.
    c = c * static_cast<u128>(n - i) / static_cast<u128>(i + 1);
    if (c > std::numeric_limits<std::uint64_t>::max()) {
      throw ConfigError("binomial(" + std::to_string(n) + ", " + std::to_string(k) +
                        ") overflows 64 bits");
    }
  }
  return static_cast<std::uint64_t>(c);
}

double binomial_real(int n, int k) { return static_cast<double>(binomial(n, k)); }

double binary_entropy(double sigma, LogBase base) {
  if (!(sigma >= 0.0 && sigma <= 1.0)) {
    throw std::invalid_argument("binary_entropy: argument outside [0, 1]");
  }
  auto term = [](double x) { return x > 0.0 ? -x * std::log(x) : 0.0; };
  double h = term(sigma) + term(1.0 - sigma);
  return base == LogBase::kBits ? h / std::log(2.0) : h;
}

ChargeDistribution::ChargeDistribution(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw std::invalid_argument("ChargeDistribution: empty");
  double sum = 0.0;
  for (double& x : probs_) {
    if (!std::isfinite(x) || x < -1e-15) {
      throw std::invalid_argument("ChargeDistribution: negative or non-finite entry");
    }
    if (x < 0.0) x = 0.0;
    sum += x;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw std::invalid_argument("ChargeDistribution: entries sum to " + std::to_string(sum));
  }
}

ChargeDistribution ChargeDistribution::delta(int n_qubits, int charge) {
  if (charge < 0 || charge > n_qubits) {
    throw std::invalid_argument("ChargeDistribution::delta: charge out of range");
  }
  std::vector<double> p(static_cast<std::size_t>(n_qubits) + 1, 0.0);
  p[static_cast<std::size_t>(charge)] = 1.0;
  return ChargeDistribution(std::move(p));
}

double ChargeDistribution::at(int q) const {
  if (q < 0 || q > n_qubits()) return 0.0;
  return probs_[static_cast<std::size_t>(q)];
}

double ChargeDistribution::mean() const {
  double m = 0.0;
  for (std::size_t q = 0; q < probs_.size(); ++q) m += static_cast<double>(q) * probs_[q];
  return m;
}

double ChargeDistribution::variance() const {
  const double m = mean();
  double v = 0.0;
  for (std::size_t q = 0; q < probs_.size(); ++q) {
    const double dq = static_cast<double>(q) - m;
    v += dq * dq * probs_[q];
  }
  return v;
}

std::vector<double> sector_prior(int n, int n_a, int q0) {
  require_subsystem(n, n_a);
  if (q0 < 0 || q0 > n) throw std::invalid_argument("sector_prior: Q0 out of range");
  const u128 den = binomial(n, q0);
  std::vector<double> prior(static_cast<std::size_t>(n_a) + 1, 0.0);
  for (int qa = 0; qa <= n_a; ++qa) {
    const u128 num = static_cast<u128>(binomial(n_a, qa)) * binomial(n - n_a, q0 - qa);
    prior[static_cast<std::size_t>(qa)] = exact_ratio(num, den);
  }
  return prior;
}

double bath_charge_likelihood(int n, int n_a, int q_b, int q) {
  require_subsystem(n, n_a);
  if (q < 0 || q > n) return 0.0;
  const u128 num = static_cast<u128>(binomial(n_a, q - q_b)) * binomial(n - n_a, q_b);
  return exact_ratio(num, binomial(n, q));
}

std::vector<double> bath_charge_distribution(const ChargeDistribution& p, int n_a) {
  const int n = p.n_qubits();
  if (n_a < 0 || n_a >= n) {
    throw std::invalid_argument("bath_charge_distribution: need 0 <= n_a < n");
  }
  const int n_b = n - n_a;
  std::vector<double> out(static_cast<std::size_t>(n_b) + 1, 0.0);
  double total = 0.0;
  for (int q_b = 0; q_b <= n_b; ++q_b) {
    double acc = 0.0;
    for (int q = q_b; q <= q_b + n_a; ++q) acc += bath_charge_likelihood(n, n_a, q_b, q) * p.at(q);
    out[static_cast<std::size_t>(q_b)] = acc;
    total += acc;
  }
  for (double& x : out) x /= total;
  return out;
}

std::vector<double> posterior_charge_distribution(const ChargeDistribution& p, int n_a,
                                                  int q_b) {
  const int n = p.n_qubits();
  if (n_a < 0 || n_a >= n || q_b < 0 || q_b > n - n_a) {
    throw std::invalid_argument("posterior_charge_distribution: bad arguments");
  }
  std::vector<double> post(static_cast<std::size_t>(n) + 1, 0.0);
  double marginal = 0.0;
  for (int q = q_b; q <= q_b + n_a; ++q) {
    const double joint = bath_charge_likelihood(n, n_a, q_b, q) * p.at(q);
    post[static_cast<std::size_t>(q)] = joint;
    marginal += joint;
  }
  if (!(marginal > 0.0)) {
    throw std::invalid_argument("posterior_charge_distribution: Q_B = " + std::to_string(q_b) +
                                " has zero probability");
  }
  for (double& x : post) x /= marginal;
  return post;
}

ChargeDistribution equilibrium_distribution(double fugacity, int n) {
  if (!(fugacity > 0.0)) throw std::invalid_argument("equilibrium_distribution: z must be > 0");
  if (n < 0) throw std::invalid_argument("equilibrium_distribution: negative n");
  // z^Q / (1+z)^N = x^Q (1-x)^(N-Q) with x = z / (1+z); avoids overflow for large z.
  const double x = fugacity / (1.0 + fugacity);
  std::vector<double> p(static_cast<std::size_t>(n) + 1);
  double sum = 0.0;
  for (int q = 0; q <= n; ++q) {
    p[static_cast<std::size_t>(q)] =
        binomial_real(n, q) * std::pow(x, q) * std::pow(1.0 - x, n - q);
    sum += p[static_cast<std::size_t>(q)];
  }
  for (double& v : p) v /= sum;
  return ChargeDistribution(std::move(p));
}

ChargeDistribution product_state_charge_distribution(std::span<const double> excitation_probs) {
  std::vector<double> p{1.0};
  for (double e : excitation_probs) {
    if (!(e >= 0.0 && e <= 1.0)) {
      throw std::invalid_argument("product_state_charge_distribution: probability outside [0,1]");
    }
    std::vector<double> next(p.size() + 1, 0.0);
    for (std::size_t q = 0; q < p.size(); ++q) {
      next[q] += p[q] * (1.0 - e);
      next[q + 1] += p[q] * e;
    }
    p = std::move(next);
  }
  double sum = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& v : p) v /= sum;
  return ChargeDistribution(std::move(p));
}

std::vector<double> theta_state_excitation_probs(int n, double theta) {
  const double s2 = std::sin(theta) * std::sin(theta);
  const double c2 = std::cos(theta) * std::cos(theta);
  std::vector<double> probs(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) probs[static_cast<std::size_t>(i)] = (i % 2 == 0) ? s2 : c2;
  return probs;
}

SectorTable::SectorTable(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits < 0 || n_qubits > 30) {
    throw ConfigError("SectorTable: supports 0..30 qubits, got " + std::to_string(n_qubits));
  }
  const std::uint64_t dim = std::uint64_t{1} << n_qubits;
  sectors_.resize(static_cast<std::size_t>(n_qubits) + 1);
  for (int q = 0; q <= n_qubits; ++q) sectors_[static_cast<std::size_t>(q)].reserve(binomial(n_qubits, q));
  position_.resize(dim);
  for (std::uint64_t idx = 0; idx < dim; ++idx) {
    auto& sec = sectors_[static_cast<std::size_t>(std::popcount(idx))];
    position_[idx] = static_cast<std::uint32_t>(sec.size());
    sec.push_back(idx);
  }
}

std::span<const std::uint64_t> SectorTable::sector(int charge) const {
  if (charge < 0 || charge > n_qubits_) return {};
  return sectors_[static_cast<std::size_t>(charge)];
}

SectorTable::Location SectorTable::locate(std::uint64_t index) const {
  if (index >= position_.size()) throw std::out_of_range("SectorTable::locate: index out of range");
  return {std::popcount(index), position_[index]};
}

}  // namespace deeptherm
