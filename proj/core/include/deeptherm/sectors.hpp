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

// U(1) charge-sector combinatorics.
//
// Conventions used throughout the library:
//   * qubit i is bit i of a basis index (qubit 0 is the least significant bit);
//   * the charge Q of a basis state is its Hamming weight;
//   * subsystem A is qubits 0..n_a-1, so index = index_a + 2^{n_a} * index_b.

#ifndef DEEPTHERM_SECTORS_HPP
#define DEEPTHERM_SECTORS_HPP

#include <cstdint>
#include <span>
#include <vector>

namespace deeptherm {

/// Exact C(n, k). Returns 0 for k < 0 or k > n; throws ConfigError if the
/// result does not fit in 64 bits.
std::uint64_t binomial(int n, int k);

/// C(n, k) as a double (exact for every value representable by binomial()).
double binomial_real(int n, int k);

enum class LogBase { kBits, kNats };

/// Binary entropy H(sigma) with 0 log 0 = 0. Base 2 by default.
double binary_entropy(double sigma, LogBase base = LogBase::kBits);

/// Probability vector over total charge Q = 0..n_qubits.
class ChargeDistribution {
 public:
  ChargeDistribution() = default;

  /// Validates nonnegativity and normalization (tolerance 1e-12 on the sum;
  /// entries in [-1e-15, 0) are clamped to zero).
  explicit ChargeDistribution(std::vector<double> probs);

  static ChargeDistribution delta(int n_qubits, int charge);

  int n_qubits() const { return static_cast<int>(probs_.size()) - 1; }
  double operator[](int q) const { return probs_[static_cast<std::size_t>(q)]; }
  /// Zero outside 0..n_qubits.
  double at(int q) const;
  std::span<const double> probs() const { return probs_; }

  double mean() const;
  double variance() const;

 private:
  std::vector<double> probs_;
};

/// pi(Q_A | Q0) = C(n_a, Q_A) C(n - n_a, Q0 - Q_A) / C(n, Q0), over Q_A = 0..n_a.
std::vector<double> sector_prior(int n, int n_a, int q0);

/// pi(Q_B | Q) = C(n_a, Q - Q_B) C(n_b, Q_B) / C(n, Q).
double bath_charge_likelihood(int n, int n_a, int q_b, int q);

/// pi_p(Q_B) = sum_Q pi(Q_B | Q) p(Q), over Q_B = 0..n - n_a.
std::vector<double> bath_charge_distribution(const ChargeDistribution& p, int n_a);

/// Bayes posterior pi_p(Q | Q_B) over Q = 0..n. Throws std::invalid_argument
/// when pi_p(Q_B) vanishes.
std::vector<double> posterior_charge_distribution(const ChargeDistribution& p, int n_a,
                                                  int q_b);

/// p(Q) = z^Q C(n, Q) / (1 + z)^n.
ChargeDistribution equilibrium_distribution(double fugacity, int n);

/// Poisson-binomial distribution of a product state with independent
/// per-qubit excitation probabilities.
ChargeDistribution product_state_charge_distribution(std::span<const double> excitation_probs);

/// Per-qubit excitation probabilities of the alternating theta family:
/// sin^2(theta) on even qubits, cos^2(theta) on odd qubits.
std::vector<double> theta_state_excitation_probs(int n, double theta);

/// Basis indices grouped by Hamming weight, with an inverse lookup.
class SectorTable {
 public:
  struct Location {
    int charge = 0;
    std::size_t position = 0;
  };

  explicit SectorTable(int n_qubits);

  int n_qubits() const { return n_qubits_; }
  std::span<const std::uint64_t> sector(int charge) const;
  std::size_t sector_size(int charge) const { return sector(charge).size(); }
  Location locate(std::uint64_t index) const;

 private:
  int n_qubits_;
  std::vector<std::vector<std::uint64_t>> sectors_;
  std::vector<std::uint32_t> position_;
};

}  // namespace deeptherm

#endif  // DEEPTHERM_SECTORS_HPP
