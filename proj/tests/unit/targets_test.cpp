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

#include "deeptherm/targets.hpp"

#include <bit>
#include <cmath>
#include <functional>
#include <vector>

#include <gtest/gtest.h>

#include "deeptherm/metrics.hpp"
#include "test_util.hpp"

namespace deeptherm {
namespace {

using testing::binom;
using testing::brute_symmetric_projector;
using testing::kron;
using testing::kron_vec;

CVector kron_power(const CVector& psi, int k) {
  CVector out = CVector::Ones(1);
  for (int j = 0; j < k; ++j) out = kron_vec(out, psi);
  return out;
}

// Isometry from the charge-q sector of n qubits into C^{2^n}.
CMatrix sector_isometry(int n, int q) {
  std::vector<int> idx;
  for (int i = 0; i < (1 << n); ++i)
    if (std::popcount(static_cast<unsigned>(i)) == q) idx.push_back(i);
  CMatrix v = CMatrix::Zero(1 << n, static_cast<Eigen::Index>(idx.size()));
  for (std::size_t c = 0; c < idx.size(); ++c) v(idx[c], static_cast<Eigen::Index>(c)) = 1.0;
  return v;
}

// (V (x) ... (x) V) Pi_sym(d_q, r) (V^dagger (x) ...) / C(d_q + r - 1, r).
CMatrix brute_sector_haar(int n_a, int q, int r) {
  if (r == 0) return CMatrix::Ones(1, 1);
  const CMatrix v = sector_isometry(n_a, q);
  const int dq = static_cast<int>(v.cols());
  CMatrix vk = CMatrix::Ones(1, 1);
  for (int j = 0; j < r; ++j) vk = kron(vk, v);
  return vk * brute_symmetric_projector(dq, r) * vk.adjoint() / binom(dq + r - 1, r);
}

// All T = (T_0..T_{n_a}) with sum k.
void for_each_type(int k, int n_a, const std::function<void(const std::vector<int>&)>& f) {
  std::vector<int> t(n_a + 1, 0);
  std::function<void(int, int)> rec = [&](int pos, int left) {
    if (pos == n_a) {
      t[pos] = left;
      f(t);
      return;
    }
    for (int x = 0; x <= left; ++x) {
      t[pos] = x;
      rec(pos + 1, left - x);
    }
  };
  rec(0, k);
}

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

// Dense replica-limit moment written out directly from the sector Haar
// moments, before renormalization.
CMatrix brute_analytic(const ChargeDistribution& p, int n_a, int k) {
  const int d = 1 << n_a;
  const CMatrix pi = brute_symmetric_projector(d, k);
  const int n = p.n_qubits();
  CMatrix total = CMatrix::Zero(pi.rows(), pi.cols());
  for (int q_b = 0; q_b <= n - n_a; ++q_b) {
    double marginal = 0.0;
    std::vector<double> joint(n_a + 1, 0.0);
    for (int q_a = 0; q_a <= n_a; ++q_a) {
      const int q = q_a + q_b;
      joint[q_a] = binom(n_a, q_a) * binom(n - n_a, q_b) / binom(n, q) * p.at(q);
      marginal += joint[q_a];
    }
    if (marginal <= 0) continue;
    for_each_type(k, n_a, [&](const std::vector<int>& t) {
      double mult = factorial(k), w = marginal;
      CMatrix x = CMatrix::Ones(1, 1);
      for (int q_a = 0; q_a <= n_a; ++q_a) {
        mult /= factorial(t[q_a]);
        w *= std::pow(joint[q_a] / marginal, t[q_a]);
        if (t[q_a] > 0) x = kron(x, brute_sector_haar(n_a, q_a, t[q_a]));
      }
      total += w * mult * mult * pi * x * pi;
    });
  }
  return total;
}

CMatrix monte_carlo_moment(int d, int k, int samples, Stream& rng,
                           const std::function<CVector(Stream&)>& draw) {
  const int dim = static_cast<int>(std::pow(d, k));
  CMatrix m = CMatrix::Zero(dim, dim);
  for (int i = 0; i < samples; ++i) {
    const CVector v = kron_power(draw(rng), k);
    m += v * v.adjoint();
  }
  return m / samples;
}

TEST(SectorProjector, Diagonal) {
  const CMatrix p = sector_projector(3, 1);
  EXPECT_NEAR(p.trace().real(), 3.0, 0.0);
  EXPECT_EQ(p(1, 1), Complex(1.0));
  EXPECT_EQ(p(3, 3), Complex(0.0));
  EXPECT_THROW(sector_projector(3, 4), std::invalid_argument);
}

TEST(HaarMoment, ProjectorOverDimension) {
  for (int d = 2; d <= 4; ++d)
    for (int k = 1; k <= 3; ++k)
      EXPECT_TRUE(haar_moment(d, k).matrix.isApprox(brute_symmetric_projector(d, k) / binom(d + k - 1, k), 1e-12));
}

TEST(HaarMoment, AgreesWithSampling) {
  Stream rng(61);
  const CMatrix mc = monte_carlo_moment(2, 2, 40000, rng, [](Stream& r) { return testing::random_vector(2, r); });
  EXPECT_LT(testing::oracle_trace_distance(mc, haar_moment(2, 2).matrix), 0.02);
}

TEST(SectorHaarMoment, MatchesEmbeddedProjector) {
  for (int n_a = 1; n_a <= 3; ++n_a)
    for (int q = 0; q <= n_a; ++q)
      for (int k = 1; k <= 2; ++k) {
        const auto m = sector_haar_moment(n_a, q, k);
        EXPECT_TRUE(m.matrix.isApprox(brute_sector_haar(n_a, q, k), 1e-12)) << n_a << q << k;
        EXPECT_NEAR(m.matrix.trace().real(), 1.0, 1e-12);
      }
  // One-dimensional sector: a pure product.
  const auto m = sector_haar_moment(2, 2, 3);
  EXPECT_NEAR(std::abs(m.matrix(63, 63)), 1.0, 1e-12);
}

TEST(DirectSumMoment, WeightedSectorSum) {
  for (int n : {4, 6}) {
    for (int q0 = 0; q0 <= n; ++q0) {
      const int n_a = 2;
      const auto prior = sector_prior(n, n_a, q0);
      CMatrix expect = CMatrix::Zero(16, 16);
      for (int q = 0; q <= n_a; ++q) expect += prior[q] * brute_sector_haar(n_a, q, 2);
      EXPECT_TRUE(direct_sum_moment(n, n_a, q0, 2).matrix.isApprox(expect, 1e-12));
    }
  }
}

TEST(SymForms, ExpandToDenseForms) {
  const SymmetricBasis sym(4, 3);
  EXPECT_TRUE(sym.expand(haar_moment_sym(sym)).isApprox(haar_moment(4, 3).matrix, 1e-12));
  EXPECT_TRUE(sym.expand(sector_haar_moment_sym(sym, 2, 1)).isApprox(sector_haar_moment(2, 1, 3).matrix, 1e-12));
  EXPECT_TRUE(sym.expand(direct_sum_moment_sym(sym, 6, 2, 3)).isApprox(direct_sum_moment(6, 2, 3, 3).matrix, 1e-12));
}

TEST(ScroogeSampler, Validation) {
  EXPECT_THROW(ScroogeSampler(CMatrix::Identity(2, 2)), std::invalid_argument);
  CMatrix nonherm = CMatrix::Identity(2, 2) / 2.0;
  nonherm(0, 1) = 0.1;
  EXPECT_THROW(ScroogeSampler{nonherm}, std::invalid_argument);
  CMatrix neg = CMatrix::Zero(2, 2);
  neg(0, 0) = 1.5;
  neg(1, 1) = -0.5;
  EXPECT_THROW(ScroogeSampler{neg}, std::invalid_argument);
  const ScroogeSampler ok(CMatrix::Identity(4, 4) / 4.0);
  EXPECT_EQ(ok.dimension(), 4);
  EXPECT_NEAR(ok.lambda_max(), 0.25, 1e-14);
}

TEST(ScroogeSampler, PureStateIsReturnedExactly) {
  Stream rng(62);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 2 + static_cast<int>(rng() % 5);
    const CVector v = testing::random_vector(d, rng);
    const ScroogeSampler s(v * v.adjoint());
    const CVector out = s.sample(rng);
    EXPECT_NEAR(out.norm(), 1.0, 1e-10);
    EXPECT_NEAR(std::abs(v.dot(out)), 1.0, 1e-8);
  }
}

TEST(ScroogeSampler, FirstMomentIsRho) {
  Stream rng(63);
  CMatrix rho = CMatrix::Zero(2, 2);
  rho(0, 0) = 0.9;
  rho(1, 1) = 0.1;
  const auto m = scrooge_moment_mc(rho, 1, 100000, rng);
  EXPECT_EQ(m.samples, 100000u);
  EXPECT_LT(trace_distance(m.moment.matrix, rho), 0.02);
  const CMatrix r4 = testing::random_density_matrix(4, rng);
  EXPECT_LT(trace_distance(scrooge_moment_mc(r4, 1, 100000, rng).moment.matrix, r4), 0.02);
}

TEST(ScroogeSampler, SecondMomentOracle) {
  // Independent sampler: rejection on Haar vectors, then rho^{1/2} psi.
  Stream rng(64);
  const CMatrix u = testing::random_unitary(2, rng);
  CMatrix diag = CMatrix::Zero(2, 2);
  diag(0, 0) = 0.85;
  diag(1, 1) = 0.15;
  const CMatrix rho = u * diag * u.adjoint();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(rho);
  const CMatrix sq = es.operatorSqrt();
  const double lmax = es.eigenvalues().maxCoeff();
  Stream oracle_rng(65);
  const CMatrix oracle = monte_carlo_moment(2, 2, 60000, oracle_rng, [&](Stream& r) {
    for (;;) {
      const CVector psi = testing::random_vector(2, r);
      if (r.uniform() < psi.dot(rho * psi).real() / lmax) return CVector((sq * psi).normalized());
    }
  });
  const auto m = scrooge_moment_mc(rho, 2, 60000, rng);
  EXPECT_LT(trace_distance(m.moment.matrix, oracle), 0.03);
  EXPECT_GT(trace_distance(m.moment.matrix, haar_moment(2, 2).matrix), 0.05);
}

TEST(ScroogeMoment, IndependentOfWorkerCount) {
  const Stream rng(66);
  const SymmetricBasis sym(4, 2);
  const CMatrix rho = fugacity_rho(2, 0.4);
  const CMatrix a = scrooge_moment_mc_sym(rho, sym, 9000, rng, 1);
  const CMatrix b = scrooge_moment_mc_sym(rho, sym, 9000, rng, 3);
  EXPECT_EQ(a, b);
  const auto ch = ChargeDistribution::delta(6, 3);
  EXPECT_EQ(gse_moment_mc_sym(ch, sym, 2, 9000, rng, 1), gse_moment_mc_sym(ch, sym, 2, 9000, rng, 2));
}

TEST(ScroogeMoment, IdentityRhoIsHaar) {
  const Stream rng(67);
  const auto m = scrooge_moment_mc(CMatrix::Identity(4, 4) / 4.0, 2, 200000, rng);
  EXPECT_LT(trace_distance(m.moment, haar_moment(4, 2)), 0.02);
}

TEST(FugacityRho, Weights) {
  const CMatrix r = fugacity_rho(2, 2.0);
  EXPECT_NEAR(r(0, 0).real(), 1.0 / 9, 1e-15);
  EXPECT_NEAR(r(1, 1).real(), 2.0 / 9, 1e-15);
  EXPECT_NEAR(r(3, 3).real(), 4.0 / 9, 1e-15);
  EXPECT_TRUE(fugacity_rho(3, 1.0).isApprox(CMatrix::Identity(8, 8) / 8.0));
}

TEST(GseRhoBar, DefiniteChargeAndNormalization) {
  const CMatrix r = gse_rho_bar(ChargeDistribution::delta(6, 3), 2, 2);
  EXPECT_NEAR(r(1, 1).real(), 0.5, 1e-15);
  EXPECT_NEAR(r(2, 2).real(), 0.5, 1e-15);
  EXPECT_NEAR(r(0, 0).real(), 0.0, 1e-15);
  Stream rng(68);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 8);
    const int n_a = 1 + static_cast<int>(rng() % 3);
    if (n_a >= n) continue;
    std::vector<double> e(n);
    for (auto& x : e) x = 0.05 + 0.9 * rng.uniform();
    const auto p = product_state_charge_distribution(e);
    const int q_b = static_cast<int>(rng() % (n - n_a + 1));
    const CMatrix rb = gse_rho_bar(p, n_a, q_b);
    EXPECT_NEAR(rb.trace().real(), 1.0, 1e-12);
    EXPECT_TRUE(rb.isApprox(CMatrix(rb.diagonal().asDiagonal()), 0.0));
    const auto post = posterior_charge_distribution(p, n_a, q_b);
    for (int i = 0; i < (1 << n_a); ++i) {
      const int q_a = std::popcount(static_cast<unsigned>(i));
      EXPECT_NEAR(rb(i, i).real(), post[q_a + q_b] / binom(n_a, q_a), 1e-12);
    }
  }
}

TEST(GseMoment, DefiniteChargeReducesToDirectSum) {
  for (int n : {4, 6, 8}) {
    for (int n_a = 1; n_a <= 2; ++n_a) {
      for (int q0 = 0; q0 <= n; ++q0) {
        const auto a = gse_moment_analytic(ChargeDistribution::delta(n, q0), n_a, 2);
        EXPECT_NEAR(a.trace_defect, 0.0, 1e-10);
        EXPECT_LT(trace_distance(a.moment, direct_sum_moment(n, n_a, q0, 2)), 1e-10);
      }
    }
  }
  const auto k3 = gse_moment_analytic(ChargeDistribution::delta(8, 4), 2, 3);
  EXPECT_LT(trace_distance(k3.moment, direct_sum_moment(8, 2, 4, 3)), 1e-10);
}

TEST(GseMoment, MonteCarloDefiniteChargeIsDirectSum) {
  const auto m = gse_moment_mc(ChargeDistribution::delta(8, 4), 2, 2, 200000, Stream(69));
  EXPECT_LT(trace_distance(m.moment, direct_sum_moment(8, 2, 4, 2)), 0.02);
}

TEST(GseMoment, MonteCarloUnitFugacityIsHaar) {
  const auto m = gse_moment_mc(equilibrium_distribution(1.0, 8), 2, 2, 200000, Stream(70));
  EXPECT_LT(trace_distance(m.moment, haar_moment(4, 2)), 0.02);
}

TEST(GseMoment, AnalyticMatchesDenseFormula) {
  Stream rng(71);
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 4 + static_cast<int>(rng() % 4);
    const int n_a = 1 + static_cast<int>(rng() % 2);
    const int k = 1 + static_cast<int>(rng() % 2);
    std::vector<double> e(n);
    for (auto& x : e) x = rng.uniform();
    const auto p = product_state_charge_distribution(e);
    const CMatrix raw = brute_analytic(p, n_a, k);
    const double tr = raw.trace().real();
    const auto a = gse_moment_analytic(p, n_a, k);
    EXPECT_NEAR(a.trace_defect, 1.0 - tr, 1e-10);
    EXPECT_LT((a.moment.matrix - raw / tr).norm(), 1e-10);
  }
}

TEST(GseMoment, FirstMomentIsUnnormalizedAverage) {
  // With one replica, every type is a single sector and the formula is the
  // average of rho_bar, which has unit trace.
  const auto p = product_state_charge_distribution(theta_state_excitation_probs(6, 0.4));
  const auto a = gse_moment_analytic(p, 2, 1);
  EXPECT_NEAR(a.trace_defect, 0.0, 1e-12);
  const auto bath = bath_charge_distribution(p, 2);
  CMatrix avg = CMatrix::Zero(4, 4);
  for (int q_b = 0; q_b <= 4; ++q_b) avg += bath[q_b] * gse_rho_bar(p, 2, q_b);
  EXPECT_LT(trace_distance(a.moment.matrix, avg), 1e-12);
}

TEST(TargetSpec, ParseAndFormat) {
  for (const char* text : {"haar", "sector-haar:2", "direct-sum", "direct-sum:3", "scrooge",
                           "scrooge:z=0.5", "gse:analytic", "gse:mc", "finite-n-scrooge",
                           "finite-n-scrooge:4"}) {
    EXPECT_EQ(to_string(parse_target(text)), text);
  }
  EXPECT_EQ(to_string(parse_target("gse")), "gse:mc");
  EXPECT_EQ(to_string(TargetSpec{ScroogeTarget{CMatrix::Identity(2, 2) / 2.0, 1.0}}), "scrooge:matrix");
  for (const char* bad : {"", "haar:1", "sector-haar", "direct-sum:x", "gse:exact", "scrooge:q=2", "foo"})
    EXPECT_THROW(parse_target(bad), std::invalid_argument) << bad;
}

TEST(ResolveTarget, ExactTargets) {
  TargetContext ctx;
  ctx.n = 6;
  ctx.n_a = 2;
  ctx.k = 2;
  ctx.p = ChargeDistribution::delta(6, 3);
  const SymmetricBasis sym(4, 2);
  const auto haar = resolve_target(HaarTarget{}, ctx);
  EXPECT_EQ(haar.local_dim, 4);
  EXPECT_EQ(haar.samples, 0u);
  EXPECT_TRUE(haar.matrix.isApprox(haar_moment_sym(sym)));
  EXPECT_TRUE(resolve_target(DirectSumTarget{}, ctx).matrix.isApprox(direct_sum_moment_sym(sym, 6, 2, 3)));
  EXPECT_TRUE(resolve_target(SectorHaarTarget{1}, ctx).full().matrix.isApprox(sector_haar_moment(2, 1, 2).matrix, 1e-12));
  ctx.p = product_state_charge_distribution(theta_state_excitation_probs(6, 0.3));
  EXPECT_THROW(resolve_target(DirectSumTarget{}, ctx), std::invalid_argument);
  EXPECT_THROW(resolve_target(FiniteNScroogeTarget{}, ctx), std::invalid_argument);
  EXPECT_NO_THROW(resolve_target(DirectSumTarget{3}, ctx));
  const auto an = resolve_target(GseTarget{GseTarget::Method::kAnalytic}, ctx);
  EXPECT_EQ(an.samples, 0u);
  EXPECT_NEAR(an.matrix.trace().real(), 1.0, 1e-12);
  EXPECT_TRUE(std::isfinite(an.trace_defect));
}

TEST(ResolveTarget, SampledTargetsRecordSamples) {
  TargetContext ctx;
  ctx.n = 6;
  ctx.n_a = 2;
  ctx.k = 2;
  ctx.p = ChargeDistribution::delta(6, 3);
  ctx.mc_samples = 5000;
  const auto s = resolve_target(FiniteNScroogeTarget{}, ctx);
  EXPECT_EQ(s.samples, 5000u);
  EXPECT_NEAR(s.matrix.trace().real(), 1.0, 1e-12);
  const auto g = resolve_target(GseTarget{}, ctx);
  EXPECT_EQ(g.samples, 5000u);
}

}  // namespace
}  // namespace deeptherm
