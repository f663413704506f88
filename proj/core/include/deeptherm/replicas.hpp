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

// k-fold replica spaces: moment operators, permutation operators and the
// symmetric subspace.
//
// A replica index is i_0 d^{k-1} + i_1 d^{k-2} + ... + i_{k-1}, so replica 0
// is the most significant digit (the usual Kronecker-product order).

#ifndef DEEPTHERM_REPLICAS_HPP
#define DEEPTHERM_REPLICAS_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "deeptherm/types.hpp"

namespace deeptherm {

/// Hermitian, PSD, unit-trace operator on (C^d)^{(x) k}.
struct MomentOperator {
  int local_dim = 0;
  int k = 0;
  CMatrix matrix;

  std::size_t dimension() const { return static_cast<std::size_t>(matrix.rows()); }
};

/// d^k, or ConfigError when it exceeds `cap`.
std::size_t replica_dimension(int d, int k, std::size_t cap = kDefaultMomentCap);

/// psi^{(x) k}.
CVector tensor_power(const CVector& psi, int k);

/// Permutation operator that moves the content of replica j to replica
/// perm[j].
CMatrix permutation_operator(int d, std::span<const int> perm);

/// (1/k!) sum over S_k of permutation_operator; explicit permutation sum.
CMatrix symmetric_projector(int d, int k, std::size_t cap = kDefaultMomentCap);

/// Orthonormal occupation-number basis of Sym^k(C^d).
///
/// Basis vector n (occupation counts n_0..n_{d-1} summing to k) is the
/// normalized symmetrization of |i_1 ... i_k> for any ordering of the
/// multiset. Its coordinate for psi^{(x) k} is
/// sqrt(k! / prod n_i!) prod psi_i^{n_i}. Operators supported on the
/// symmetric subspace, including every moment operator, are represented
/// exactly by their D x D compression, D = C(d+k-1, k), and trace distances
/// between them are preserved.
class SymmetricBasis {
 public:
  SymmetricBasis(int d, int k);

  int local_dim() const { return d_; }
  int order() const { return k_; }
  std::size_t dimension() const { return coef_.size(); }

  /// Sorted replica indices i_1 <= ... <= i_k of basis vector `index`.
  std::span<const int> indices(std::size_t index) const;
  /// Occupation counts n_0..n_{d-1} of basis vector `index`.
  std::vector<int> occupation(std::size_t index) const;

  CVector embed(const CVector& psi) const;
  /// Writes the coordinates of psi^{(x) k} into out[0..D).
  void embed(const Complex* psi, Complex* out) const;

  /// d^k x D isometry V with V^dagger V = I.
  CMatrix isometry() const;
  /// V^dagger X V.
  CMatrix compress(const CMatrix& full) const;
  /// V C V^dagger.
  CMatrix expand(const CMatrix& compressed) const;

 private:
  int d_;
  int k_;
  std::vector<int> indices_;   // D * k, row-major
  std::vector<double> coef_;   // sqrt(k! / prod n_i!)
};

}  // namespace deeptherm

#endif  // DEEPTHERM_REPLICAS_HPP
