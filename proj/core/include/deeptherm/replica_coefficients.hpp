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

// Replica coefficients f_p(T, b) of the average-moment expansion, exact for
// integer replica number, by Monte Carlo, and in the replica limit.

#ifndef DEEPTHERM_REPLICA_COEFFICIENTS_HPP
#define DEEPTHERM_REPLICA_COEFFICIENTS_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "deeptherm/rng.hpp"
#include "deeptherm/sectors.hpp"

namespace deeptherm {

/// Multiplicities T[Q_A], Q_A = 0..N_A, summing to k.
using TypeVector = std::vector<int>;

/// All type vectors of k replicas over N_A + 1 sectors, in lexicographic
/// order; C(k + N_A, N_A) of them. Cached per (k, N_A); thread safe.
const std::vector<TypeVector>& enumerate_types(int k, int n_a);

/// k! / prod_i T_i!.
double multinomial(const TypeVector& t);

/// Sum over T' in Types(n, N_A) of multinomial(T') prod_{Q_A} p(Q)^l
/// prod_{j<l} (d_{Q_A} + j) / (d_Q + j), with l = T + T', Q = Q_A + Q_B,
/// d_{Q_A} = C(N_A, Q_A) and d_Q = C(N, Q). n = 0 gives the k-replica
/// average alone.
double fp_exact_integer_n(const ChargeDistribution& p, const TypeVector& t, int q_b, int n);

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

/// E[(Sum_{Q_A} p(Q_A, z))^n prod_{Q_A} p(Q_A, z)^{T_{Q_A}}] over
/// Psi = Sum_Q sqrt(p(Q)) Phi_Q with Phi_Q Haar on each charge sector, for
/// the fixed bath string z = 0...01...1 with Q_B ones (lowest index).
/// N_A = t.size() - 1. Sample i uses rng.derive(i).
Estimate fp_mc(const ChargeDistribution& p, const TypeVector& t, int q_b, int n,
               std::size_t samples, const Stream& rng);

/// One (T, n) pair of a batched Monte Carlo evaluation.
struct ReplicaCell {
  TypeVector t;
  int n = 0;
};

/// fp_mc for several cells sharing N_A and Q_B, from the same samples of
/// Psi; each estimate is individually unbiased.
std::vector<Estimate> fp_mc_batch(const ChargeDistribution& p, int n_a, int q_b,
                                  std::span<const ReplicaCell> cells, std::size_t samples,
                                  const Stream& rng);

/// C(N_B, Q_B)^{-1} pi_p(Q_B) prod_{Q_A} pi_p(Q_A + Q_B | Q_B)^{T_{Q_A}}.
double fp_replica_limit_z(const ChargeDistribution& p, const TypeVector& t, int q_b);

/// 2^{-N_B} prod_{Q_A} pi(Q_A | Q0)^{T_{Q_A}} for a definite-charge state.
double fp_replica_limit_x(int n, int n_a, int q0, const TypeVector& t);

}  // namespace deeptherm

#endif  // DEEPTHERM_REPLICA_COEFFICIENTS_HPP
