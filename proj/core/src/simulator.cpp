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

#include "deeptherm/simulator.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace deeptherm {

namespace {

constexpr int kMaxQubits = 30;

void check_qubit_count(int n) {
  if (n < 0 || n > kMaxQubits) {
    throw ConfigError("state vectors support 0.." + std::to_string(kMaxQubits) + " qubits");
  }
}

// Inserts a zero bit at position `bit` of k.
inline std::uint64_t insert_zero(std::uint64_t k, int bit) {
  const std::uint64_t low = k & ((std::uint64_t{1} << bit) - 1);
  return ((k >> bit) << (bit + 1)) | low;
}

}  // namespace

StateVector::StateVector(int n_qubits) : n_qubits_(n_qubits) {
  check_qubit_count(n_qubits);
  amps_.assign(std::size_t{1} << n_qubits, Complex{0.0, 0.0});
  amps_[0] = 1.0;
}

StateVector::StateVector(std::vector<Complex> amplitudes) : amps_(std::move(amplitudes)) {
  if (amps_.empty() || !std::has_single_bit(amps_.size())) {
    throw std::invalid_argument("StateVector: length must be a power of two");
  }
  n_qubits_ = std::countr_zero(amps_.size());
  check_qubit_count(n_qubits_);
  if (norm() == 0.0) throw std::invalid_argument("StateVector: zero vector");
  normalize();
}

StateVector StateVector::basis_state(int n_qubits, std::uint64_t index) {
  StateVector s(n_qubits);
  if (index >= s.dimension()) throw std::out_of_range("basis_state: index out of range");
  s.amps_[0] = 0.0;
  s.amps_[index] = 1.0;
  return s;
}

double StateVector::norm() const {
  double acc = 0.0;
  for (const Complex& a : amps_) acc += std::norm(a);
  return std::sqrt(acc);
}

void StateVector::normalize() {
  const double nrm = norm();
  if (nrm == 0.0) throw std::invalid_argument("StateVector::normalize: zero vector");
  for (Complex& a : amps_) a /= nrm;
}

Eigen::Matrix4cd U1Gate::matrix() const {
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
  m(0, 0) = std::polar(1.0, phi0);
  m.block<2, 2>(1, 1) = block;
  m(3, 3) = std::polar(1.0, phi1);
  return m;
}

U1Gate random_u1_gate(Stream& rng) {
  U1Gate g;
  g.phi0 = 2.0 * kPi * rng.uniform();
  g.phi1 = 2.0 * kPi * rng.uniform();
  Eigen::Vector2cd c0(rng.complex_normal(), rng.complex_normal());
  Eigen::Vector2cd c1(rng.complex_normal(), rng.complex_normal());
  c0.normalize();
  c1 -= c0 * c0.dot(c1);
  c1.normalize();
  g.block.col(0) = c0;
  g.block.col(1) = c1;
  return g;
}

void apply_two_qubit_gate(StateVector& state, const U1Gate& gate, int i, int j) {
  const int n = state.n_qubits();
  if (i < 0 || j < 0 || i >= n || j >= n) {
    throw std::out_of_range("apply_two_qubit_gate: qubit index out of range");
  }
  if (i == j) throw std::invalid_argument("apply_two_qubit_gate: qubits must differ");
  const std::uint64_t mi = std::uint64_t{1} << i;
  const std::uint64_t mj = std::uint64_t{1} << j;
  const int lo = std::min(i, j);
  const int hi = std::max(i, j);
  const Complex p0 = std::polar(1.0, gate.phi0);
  const Complex p1 = std::polar(1.0, gate.phi1);
  const Complex u00 = gate.block(0, 0), u01 = gate.block(0, 1);
  const Complex u10 = gate.block(1, 0), u11 = gate.block(1, 1);
  auto amps = state.amplitudes();
  const std::uint64_t quarter = state.dimension() >> 2;
  for (std::uint64_t k = 0; k < quarter; ++k) {
    const std::uint64_t base = insert_zero(insert_zero(k, lo), hi);
    Complex& a00 = amps[base];
    Complex& a01 = amps[base | mi];
    Complex& a10 = amps[base | mj];
    Complex& a11 = amps[base | mi | mj];
    const Complex x = a01;
    const Complex y = a10;
    a00 *= p0;
    a11 *= p1;
    a01 = u00 * x + u01 * y;
    a10 = u10 * x + u11 * y;
  }
}

void apply_single_qubit_gate(StateVector& state, const Eigen::Matrix2cd& u, int qubit) {
  if (qubit < 0 || qubit >= state.n_qubits()) {
    throw std::out_of_range("apply_single_qubit_gate: qubit index out of range");
  }
  const std::uint64_t m = std::uint64_t{1} << qubit;
  auto amps = state.amplitudes();
  const std::uint64_t half = state.dimension() >> 1;
  for (std::uint64_t k = 0; k < half; ++k) {
    const std::uint64_t base = insert_zero(k, qubit);
    const Complex a0 = amps[base];
    const Complex a1 = amps[base | m];
    amps[base] = u(0, 0) * a0 + u(0, 1) * a1;
    amps[base | m] = u(1, 0) * a0 + u(1, 1) * a1;
  }
}

void brickwork_step(StateVector& state, const Stream& step_stream) {
  const int n = state.n_qubits();
  for (int parity = 0; parity < 2; ++parity) {
    for (int q = parity; q + 1 < n; q += 2) {
      Stream gate_stream = step_stream.derive({static_cast<std::uint64_t>(parity),
                                               static_cast<std::uint64_t>(q)});
      apply_two_qubit_gate(state, random_u1_gate(gate_stream), q, q + 1);
    }
  }
}

StateVector prepare_theta_state(int n, double theta) {
  if (n <= 0 || n % 2 != 0) throw std::invalid_argument("prepare_theta_state: n must be even");
  check_qubit_count(n);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  std::vector<Complex> amps{1.0};
  amps.reserve(std::size_t{1} << n);
  for (int q = 0; q < n; ++q) {
    const double v0 = (q % 2 == 0) ? c : s;
    const double v1 = (q % 2 == 0) ? s : c;
    const std::size_t half = amps.size();
    amps.resize(2 * half);
    for (std::size_t k = 0; k < half; ++k) {
      amps[k + half] = amps[k] * v1;
      amps[k] *= v0;
    }
  }
  return StateVector(std::move(amps));
}

StateVector prepare_bitstring_state(std::string_view pattern) {
  std::uint64_t index = 0;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (pattern[i] == '1') {
      index |= std::uint64_t{1} << i;
    } else if (pattern[i] != '0') {
      throw std::invalid_argument("prepare_bitstring_state: pattern must contain only 0/1");
    }
  }
  return StateVector::basis_state(static_cast<int>(pattern.size()), index);
}

std::string repeat_pattern(std::string_view unit, int n) {
  if (unit.empty() || n < 0 || n % static_cast<int>(unit.size()) != 0) {
    throw std::invalid_argument("repeat_pattern: length " + std::to_string(n) +
                                " is not a multiple of the pattern unit");
  }
  std::string out;
  out.reserve(static_cast<std::size_t>(n));
  while (static_cast<int>(out.size()) < n) out.append(unit);
  return out;
}

StateVector haar_random_sector_state(int n, int q0, Stream& rng) {
  check_qubit_count(n);
  if (q0 < 0 || q0 > n) throw std::invalid_argument("haar_random_sector_state: Q0 out of range");
  std::vector<Complex> amps(std::size_t{1} << n, Complex{0.0, 0.0});
  for (std::uint64_t idx = 0; idx < amps.size(); ++idx) {
    if (std::popcount(idx) == q0) amps[idx] = rng.complex_normal();
  }
  return StateVector(std::move(amps));
}

Eigen::Matrix2cd measurement_frame(const BlochAxis& axis) {
  const Eigen::Vector3d n(std::sin(axis.polar) * std::cos(axis.azimuth),
                          std::sin(axis.polar) * std::sin(axis.azimuth), std::cos(axis.polar));
  Eigen::Vector3d m = n + Eigen::Vector3d::UnitZ();
  const double len = m.norm();
  if (len > 2.0 - 1e-12) return Eigen::Matrix2cd::Identity();
  if (len < 1e-12) m = Eigen::Vector3d::UnitX();
  else m /= len;
  Eigen::Matrix2cd u;
  const Complex i{0.0, 1.0};
  u << m.z(), m.x() - i * m.y(),
       m.x() + i * m.y(), -m.z();
  return u;
}

void rotate_measurement_frame(StateVector& state, std::span<const BlochAxis> axes,
                              std::span<const int> qubits) {
  if (axes.size() != qubits.size()) {
    throw std::invalid_argument("rotate_measurement_frame: one axis per qubit required");
  }
  for (std::size_t i = 0; i < qubits.size(); ++i) {
    const Eigen::Matrix2cd u = measurement_frame(axes[i]);
    if (u.isIdentity(0.0)) continue;
    apply_single_qubit_gate(state, u, qubits[i]);
  }
}

ChargeDistribution charge_distribution_of_state(const StateVector& state) {
  std::vector<double> p(static_cast<std::size_t>(state.n_qubits()) + 1, 0.0);
  const auto amps = state.amplitudes();
  for (std::uint64_t idx = 0; idx < amps.size(); ++idx) {
    p[static_cast<std::size_t>(std::popcount(idx))] += std::norm(amps[idx]);
  }
  double total = 0.0;
  for (double x : p) total += x;
  for (double& x : p) x /= total;
  return ChargeDistribution(std::move(p));
}

}  // namespace deeptherm
