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

// Dense state-vector simulation of U(1)-symmetric brickwork circuits.

#ifndef DEEPTHERM_SIMULATOR_HPP
#define DEEPTHERM_SIMULATOR_HPP

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "deeptherm/rng.hpp"
#include "deeptherm/sectors.hpp"
#include "deeptherm/types.hpp"

namespace deeptherm {

class StateVector {
 public:
  /// |0...0> on n qubits.
  explicit StateVector(int n_qubits);
  /// Takes ownership of amplitudes; the length must be a power of two.
  /// Normalizes unless the norm is zero, which is rejected.
  explicit StateVector(std::vector<Complex> amplitudes);

  static StateVector basis_state(int n_qubits, std::uint64_t index);

  int n_qubits() const { return n_qubits_; }
  std::size_t dimension() const { return amps_.size(); }

  std::span<Complex> amplitudes() { return amps_; }
  std::span<const Complex> amplitudes() const { return amps_; }
  Complex operator[](std::size_t i) const { return amps_[i]; }

  double norm() const;
  void normalize();

 private:
  int n_qubits_;
  std::vector<Complex> amps_;
};

/// Two-qubit gate that is block diagonal in the local charge grading
/// {|00>}, {|01>, |10>}, {|11>}.
struct U1Gate {
  double phi0 = 0.0;  ///< phase on |00>
  double phi1 = 0.0;  ///< phase on |11>
  Eigen::Matrix2cd block = Eigen::Matrix2cd::Identity();  ///< acts on (|01>, |10>)

  /// 4x4 matrix in the basis |b_j b_i> ordered 00, 01, 10, 11, where b_i is
  /// the first qubit argument of apply_two_qubit_gate (the low bit).
  Eigen::Matrix4cd matrix() const;
};

/// Uniform phases and a Haar-random 2x2 unitary block (Gaussian
/// Gram-Schmidt with the phase of each column's pivot removed).
U1Gate random_u1_gate(Stream& rng);

/// In place. Throws std::out_of_range for a bad qubit index and
/// std::invalid_argument when i == j.
void apply_two_qubit_gate(StateVector& state, const U1Gate& gate, int i, int j);

/// In place, arbitrary 2x2 unitary on one qubit.
void apply_single_qubit_gate(StateVector& state, const Eigen::Matrix2cd& u, int qubit);

/// One unit of time: the even half-layer (0,1),(2,3),... then the odd
/// half-layer (1,2),(3,4),... with open boundaries. The gate at
/// (half-layer h, left qubit q) is drawn from step_stream.derive({h, q}).
void brickwork_step(StateVector& state, const Stream& step_stream);

/// [(cos t|0> + sin t|1>) (x) (sin t|0> + cos t|1>)]^{(x) n/2}; n must be even.
StateVector prepare_theta_state(int n, double theta);

/// Computational basis state; pattern[i] in {'0','1'} is qubit i.
StateVector prepare_bitstring_state(std::string_view pattern);

/// Tiles `unit` to length n (n must be a multiple of the unit length).
std::string repeat_pattern(std::string_view unit, int n);

/// Haar-random state supported on the charge-q0 sector.
StateVector haar_random_sector_state(int n, int q0, Stream& rng);

/// Direction on the Bloch sphere in polar/azimuthal angles.
struct BlochAxis {
  double polar = 0.0;
  double azimuth = 0.0;

  static BlochAxis z() { return {0.0, 0.0}; }
  static BlochAxis x() { return {kPi / 2, 0.0}; }
  static BlochAxis y() { return {kPi / 2, kPi / 2}; }
};

/// Single-qubit unitary taking the measurement axis to +z: identity for +z,
/// otherwise the pi-rotation about the bisector of the axis and z (an
/// involution; the Hadamard for the x axis).
Eigen::Matrix2cd measurement_frame(const BlochAxis& axis);

/// Applies measurement_frame(axes[i]) to qubits[i]. Measuring z afterwards
/// is equivalent to measuring the original axes.
void rotate_measurement_frame(StateVector& state, std::span<const BlochAxis> axes,
                              std::span<const int> qubits);

ChargeDistribution charge_distribution_of_state(const StateVector& state);

}  // namespace deeptherm

#endif  // DEEPTHERM_SIMULATOR_HPP
