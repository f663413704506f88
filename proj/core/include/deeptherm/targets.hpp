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

// Target ensembles: Haar and sector-Haar moments, direct sums, Scrooge and
// generalized Scrooge ensembles.
//
// Every constructor has a dense form (MomentOperator on d^k) and a form in
// the compressed symmetric basis (suffix _sym), which is what the harness
// uses. The dense forms are expansions of the compressed ones.

#ifndef DEEPTHERM_TARGETS_HPP
#define DEEPTHERM_TARGETS_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "deeptherm/replicas.hpp"
#include "deeptherm/rng.hpp"
#include "deeptherm/sectors.hpp"
#include "deeptherm/types.hpp"

namespace deeptherm {

/// Diagonal projector onto the charge-q_a sector of n_a qubits.
CMatrix sector_projector(int n_a, int q_a);

CMatrix haar_moment_sym(const SymmetricBasis& sym);
/// sym.local_dim() must be 2^n_a.
CMatrix sector_haar_moment_sym(const SymmetricBasis& sym, int n_a, int q_a);
CMatrix direct_sum_moment_sym(const SymmetricBasis& sym, int n, int n_a, int q0);

/// Pi_sym / C(d+k-1, k).
MomentOperator haar_moment(int d, int k, std::size_t cap = kDefaultMomentCap);
/// Haar moment on the C(n_a, q_a)-dimensional sector, embedded in (C^{2^n_a})^{(x) k}.
MomentOperator sector_haar_moment(int n_a, int q_a, int k, std::size_t cap = kDefaultMomentCap);
/// Sum_{Q_A} pi(Q_A|Q0) sector_haar_moment(n_a, Q_A, k).
MomentOperator direct_sum_moment(int n, int n_a, int q0, int k,
                                 std::size_t cap = kDefaultMomentCap);

/// Draws from the rho-distortion of the Haar ensemble by rejection:
/// a Haar state psi is accepted with probability <psi|rho|psi> / lambda_max
/// and mapped to rho^{1/2} psi / |rho^{1/2} psi|.
class ScroogeSampler {
 public:
  /// Throws std::invalid_argument unless rho is Hermitian (1e-10), has unit
  /// trace (1e-10) and no eigenvalue below -1e-12.
  explicit ScroogeSampler(const CMatrix& rho);

  CVector sample(Stream& rng) const;
  int dimension() const { return static_cast<int>(sqrt_rho_.rows()); }
  double lambda_max() const { return lambda_max_; }

 private:
  CMatrix rho_;
  CMatrix sqrt_rho_;
  double lambda_max_ = 0.0;
};

CVector scrooge_sample(const CMatrix& rho, Stream& rng);

/// Monte Carlo moment with the sample count it was built from.
struct SampledMoment {
  MomentOperator moment;
  std::size_t samples = 0;
};

/// Sample i is drawn from rng.derive(i), and partial sums over fixed blocks
/// are reduced in block order, so the result does not depend on `workers`.
CMatrix scrooge_moment_mc_sym(const CMatrix& rho, const SymmetricBasis& sym, std::size_t samples,
                              const Stream& rng, int workers = 1);
SampledMoment scrooge_moment_mc(const CMatrix& rho, int k, std::size_t samples, const Stream& rng,
                                int workers = 1, std::size_t cap = kDefaultMomentCap);

/// Sum_{Q_A} pi_p(Q_A + Q_B | Q_B) Pi_{Q_A} / Tr Pi_{Q_A}.
CMatrix gse_rho_bar(const ChargeDistribution& p, int n_a, int q_b);

/// Q_B ~ pi_p(Q_B), then a Scrooge draw from gse_rho_bar(p, n_a, Q_B).
CMatrix gse_moment_mc_sym(const ChargeDistribution& p, const SymmetricBasis& sym, int n_a,
                          std::size_t samples, const Stream& rng, int workers = 1);
SampledMoment gse_moment_mc(const ChargeDistribution& p, int n_a, int k, std::size_t samples,
                            const Stream& rng, int workers = 1,
                            std::size_t cap = kDefaultMomentCap);

/// Replica-limit moment, renormalized to unit trace; trace_defect is
/// 1 - (trace before renormalization).
struct AnalyticMoment {
  MomentOperator moment;
  double trace_defect = 0.0;
};

struct AnalyticMomentSym {
  CMatrix matrix;
  double trace_defect = 0.0;
};

AnalyticMomentSym gse_moment_analytic_sym(const ChargeDistribution& p, const SymmetricBasis& sym,
                                          int n_a, std::size_t cap = kDefaultMomentCap);
AnalyticMoment gse_moment_analytic(const ChargeDistribution& p, int n_a, int k,
                                   std::size_t cap = kDefaultMomentCap);

/// Sum_{Q_A} pi(Q_A|Q0) Pi_{Q_A} / Tr Pi_{Q_A}: the x-basis Scrooge density
/// matrix for a definite-charge state of n qubits.
CMatrix xbasis_scrooge_rho(int n, int n_a, int q0);
/// Same matrix under the name used for size-dependent Scrooge targets.
CMatrix finite_n_rho(int n, int n_a, int q0);

/// rho proportional to z^{Q_A} on n_a qubits.
CMatrix fugacity_rho(int n_a, double fugacity);

// ---------------------------------------------------------------------------
// Target specifications.

struct HaarTarget {};
struct SectorHaarTarget {
  int q_a = 0;
};
/// Q0 defaults to the definite charge of the initial state.
struct DirectSumTarget {
  std::optional<int> q0;
};
/// Scrooge ensemble of rho, or of rho proportional to z^{Q_A}.
struct ScroogeTarget {
  std::optional<CMatrix> rho;
  double fugacity = 1.0;
};
struct GseTarget {
  enum class Method { kAnalytic, kMonteCarlo };
  Method method = Method::kMonteCarlo;
};
/// Scrooge ensemble of finite_n_rho(N, N_A, Q0).
struct FiniteNScroogeTarget {
  std::optional<int> q0;
};

using TargetSpec = std::variant<HaarTarget, SectorHaarTarget, DirectSumTarget, ScroogeTarget,
                                GseTarget, FiniteNScroogeTarget>;

/// Text form: "haar", "sector-haar:<QA>", "direct-sum[:<Q0>]",
/// "scrooge[:z=<z>]", "gse[:analytic|:mc]", "finite-n-scrooge[:<Q0>]".
/// A Scrooge target with an explicit matrix prints as "scrooge:matrix" and
/// cannot be parsed back.
std::string to_string(const TargetSpec& spec);
TargetSpec parse_target(std::string_view text);

/// Whatever a target needs beyond its own parameters.
struct TargetContext {
  int n = 0;
  int n_a = 0;
  int k = 0;
  /// Charge distribution of the initial state.
  ChargeDistribution p;
  std::size_t mc_samples = 1'000'000;
  Stream rng{0};
  int workers = 1;
  std::size_t cap = kDefaultMomentCap;
};

struct ResolvedTarget {
  int local_dim = 0;
  int k = 0;
  /// Moment in the compressed symmetric basis SymmetricBasis(local_dim, k).
  CMatrix matrix;
  double trace_defect = 0.0;
  /// Monte Carlo sample count, zero for exact targets.
  std::size_t samples = 0;

  MomentOperator full() const;
};

/// Throws std::invalid_argument when a default Q0 is requested but p is not
/// a definite charge.
ResolvedTarget resolve_target(const TargetSpec& spec, const TargetContext& ctx);

}  // namespace deeptherm

#endif  // DEEPTHERM_TARGETS_HPP
