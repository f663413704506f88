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

// Projected ensembles and their moment operators.

#ifndef DEEPTHERM_ENSEMBLES_HPP
#define DEEPTHERM_ENSEMBLES_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "deeptherm/replicas.hpp"
#include "deeptherm/simulator.hpp"
#include "deeptherm/types.hpp"

namespace deeptherm {

/// Outcomes with Born weight below this are dropped from a projected ensemble.
inline constexpr double kZeroWeightCutoff = 1e-14;

/// Product measurement frame for the bath qubits.
class MeasurementBasis {
 public:
  enum class Kind { kZ, kX, kAxis, kPerQubit };

  static MeasurementBasis z() { return MeasurementBasis(Kind::kZ, {}); }
  static MeasurementBasis x() { return MeasurementBasis(Kind::kX, {}); }
  /// The same axis on every bath qubit.
  static MeasurementBasis axis(BlochAxis a) { return MeasurementBasis(Kind::kAxis, {a}); }
  /// axes[i] applies to bath qubit i (global qubit N_A + i).
  static MeasurementBasis per_qubit(std::vector<BlochAxis> axes) {
    return MeasurementBasis(Kind::kPerQubit, std::move(axes));
  }

  Kind kind() const { return kind_; }
  const std::vector<BlochAxis>& axes() const { return axes_; }
  BlochAxis axis_for(int bath_qubit) const;

  /// "z", "x", "axis:<polar>:<azimuth>" or "axes:<p0>,<a0>;<p1>,<a1>;...".
  std::string to_string() const;
  static MeasurementBasis parse(std::string_view text);

  friend bool operator==(const MeasurementBasis& a, const MeasurementBasis& b);

 private:
  MeasurementBasis(Kind kind, std::vector<BlochAxis> axes) : kind_(kind), axes_(std::move(axes)) {}

  Kind kind_;
  std::vector<BlochAxis> axes_;
};

struct ProjectedEnsemble {
  int n_a = 0;
  int n_qubits = 0;
  /// Born weights of the retained outcomes, ascending outcome index.
  std::vector<double> weights;
  /// One normalized d_A-dimensional column per retained outcome.
  CMatrix states;
  /// Bath bitstring (bit i is bath qubit i) and its charge, per column.
  std::vector<std::uint64_t> outcomes;
  std::vector<int> outcome_charges;
  /// Total weight of the outcomes below the cutoff.
  double dropped_weight = 0.0;

  std::size_t size() const { return weights.size(); }
  int local_dim() const { return 1 << n_a; }
};

/// Rotates the bath into `basis`, reshapes to d_A x d_B and normalizes the
/// columns. Throws std::invalid_argument unless 0 <= n_a < N.
ProjectedEnsemble project(const StateVector& state, int n_a, const MeasurementBasis& basis,
                          double cutoff = kZeroWeightCutoff);

/// Sum_b p(b) (|psi_b><psi_b|)^{(x) k} as a dense d_A^k matrix. Throws
/// ConfigError when d_A^k exceeds `cap`.
MomentOperator moment(const ProjectedEnsemble& ensemble, int k, std::size_t cap = kDefaultMomentCap);

/// The same moment in the compressed symmetric basis.
CMatrix symmetric_moment(const ProjectedEnsemble& ensemble, const SymmetricBasis& basis);

/// Tr_B |psi><psi| with A = qubits 0..n_a-1.
CMatrix reduced_density_matrix(const StateVector& state, int n_a);

/// Sum_b p(b) <psi_b|O|psi_b>^2 - Tr(O rho)^2.
double conditional_variance(const ProjectedEnsemble& ensemble, const CMatrix& observable);

/// Tr[(rho^(2) - rho^(1) (x) rho^(1)) O (x) O], via the moment operators.
double conditional_variance_from_moments(const ProjectedEnsemble& ensemble,
                                         const CMatrix& observable);

}  // namespace deeptherm

#endif  // DEEPTHERM_ENSEMBLES_HPP
