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
#include <cmath>
#include <functional>
#include <set>
#include <tuple>
#include <vector>

#include <gtest/gtest.h>

#include "test_util.hpp"

namespace deeptherm {
namespace {

using testing::binom;

// E[w^l] for w ~ Beta(a, b), through log-gamma.
double beta_moment(double a, double b, int l) {
  if (l == 0) return 1.0;
  if (b == 0) return 1.0;
  return std::exp(std::lgamma(a + l) + std::lgamma(a + b) - std::lgamma(a) - std::lgamma(a + b + l));
}

// Expands (sum_QA x_QA)^n prod x_QA^T_QA with a recursive multinomial sum
// and evaluates each monomial with independent Beta moments.
double oracle_fp(const ChargeDistribution& p, const std::vector<int>& t, int q_b, int n) {
  const int n_a = static_cast<int>(t.size()) - 1;
  const int big_n = p.n_qubits();
  std::vector<int> extra(n_a + 1, 0);
  double total = 0.0;
  std::function<void(int, int, double)> rec = [&](int pos, int left, double coef) {
    if (pos == n_a) {
      extra[pos] = left;
      coef /= std::tgamma(left + 1.0);
      double term = coef;
      for (int q_a = 0; q_a <= n_a; ++q_a) {
        const int l = t[q_a] + extra[q_a];
        if (l == 0) continue;
        const int q = q_a + q_b;
        const double pq = p.at(q);
        if (pq == 0.0) return;
        const double a = binom(n_a, q_a);
        const double dq = binom(big_n, q);
        term *= std::pow(pq, l) * beta_moment(a, dq - a, l);
      }
      total += term;
      return;
    }
    for (int x = 0; x <= left; ++x) {
      extra[pos] = x;
      rec(pos + 1, left - x, coef / std::tgamma(x + 1.0));
    }
  };
  rec(0, n, std::tgamma(n + 1.0));
  return total;
}

ChargeDistribution random_distribution(int n, Stream& rng) {
  std::vector<double> e(n);
  for (auto& x : e) x = 0.1 + 0.8 * rng.uniform();
  return product_state_charge_distribution(e);
}

TEST(EnumerateTypes, CountOrderAndSums) {
  for (int k = 1; k <= 5; ++k) {
    for (int n_a = 0; n_a <= 4; ++n_a) {
      const auto& types = enumerate_types(k, n_a);
      EXPECT_EQ(types.size(), static_cast<std::size_t>(binom(k + n_a, n_a)));
      EXPECT_TRUE(std::is_sorted(types.begin(), types.end()));
      std::set<TypeVector> unique(types.begin(), types.end());
      EXPECT_EQ(unique.size(), types.size());
      for (const auto& t : types) {
        EXPECT_EQ(t.size(), static_cast<std::size_t>(n_a + 1));
        int s = 0;
        for (int x : t) s += x;
        EXPECT_EQ(s, k);
      }
    }
  }
  EXPECT_EQ(&enumerate_types(3, 2), &enumerate_types(3, 2));
}

TEST(Multinomial, Values) {
  EXPECT_DOUBLE_EQ(multinomial({2, 1}), 3.0);
  EXPECT_DOUBLE_EQ(multinomial({1, 1, 1}), 6.0);
  EXPECT_DOUBLE_EQ(multinomial({4, 0}), 1.0);
  EXPECT_DOUBLE_EQ(multinomial({2, 2, 2}), 90.0);
}

TEST(FpExact, MatchesBetaMomentOracle) {
  Stream rng(81);
  int checked = 0;
  while (checked < 220) {
    const int big_n = 3 + static_cast<int>(rng() % 6);
    const int n_a = 1 + static_cast<int>(rng() % std::min(3, big_n - 1));
    const int k = 1 + static_cast<int>(rng() % 3);
    const int n = static_cast<int>(rng() % 3);
    const int q_b = static_cast<int>(rng() % (big_n - n_a + 1));
    const auto& types = enumerate_types(k, n_a);
    const TypeVector& t = types[rng() % types.size()];
    const auto p = random_distribution(big_n, rng);
    const double expect = oracle_fp(p, t, q_b, n);
    EXPECT_NEAR(fp_exact_integer_n(p, t, q_b, n), expect, 1e-12 + 1e-10 * std::abs(expect));
    ++checked;
  }
}

TEST(FpExact, ZeroProbabilitySectors) {
  const auto p = ChargeDistribution::delta(6, 3);
  // Replicas in a sector of zero probability kill the term.
  EXPECT_EQ(fp_exact_integer_n(p, {1, 0, 0}, 2, 0), 0.0);
  EXPECT_GT(fp_exact_integer_n(p, {0, 1, 0}, 2, 0), 0.0);
  EXPECT_NEAR(fp_exact_integer_n(p, {0, 1, 0}, 2, 0), binom(2, 1) / binom(6, 3), 1e-15);
}

TEST(FpMonteCarlo, AgreesWithExact) {
  const Stream rng(82);
  const auto p = product_state_charge_distribution(theta_state_excitation_probs(6, 0.35));
  for (const auto& [t, q_b, n] : std::vector<std::tuple<TypeVector, int, int>>{
           {{1, 1, 0}, 2, 0}, {{0, 2, 0}, 1, 1}, {{1, 0, 1}, 3, 2}, {{0, 0, 2}, 0, 1}}) {
    const Estimate e = fp_mc(p, t, q_b, n, 40000, rng);
    const double exact = fp_exact_integer_n(p, t, q_b, n);
    EXPECT_EQ(e.samples, 40000u);
    EXPECT_GT(e.std_error, 0.0);
    EXPECT_LT(std::abs(e.mean - exact), 5 * e.std_error) << "exact " << exact;
  }
}

TEST(FpMonteCarlo, BatchMatchesSingleCells) {
  const Stream rng(83);
  const auto p = product_state_charge_distribution(theta_state_excitation_probs(6, 0.2));
  const std::vector<ReplicaCell> cells{{{1, 1, 0}, 0}, {{0, 2, 0}, 1}};
  const auto batch = fp_mc_batch(p, 2, 2, cells, 3000, rng);
  ASSERT_EQ(batch.size(), 2u);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const Estimate single = fp_mc(p, cells[i].t, 2, cells[i].n, 3000, rng);
    EXPECT_DOUBLE_EQ(batch[i].mean, single.mean);
    EXPECT_DOUBLE_EQ(batch[i].std_error, single.std_error);
  }
}

TEST(ReplicaLimit, ZBasisNormalization) {
  Stream rng(84);
  for (int trial = 0; trial < 200; ++trial) {
    const int big_n = 3 + static_cast<int>(rng() % 8);
    const int n_a = 1 + static_cast<int>(rng() % std::min(3, big_n - 1));
    const auto p = random_distribution(big_n, rng);
    double total = 0.0;
    for (int q_b = 0; q_b <= big_n - n_a; ++q_b)
      for (int q_a = 0; q_a <= n_a; ++q_a) {
        TypeVector t(n_a + 1, 0);
        t[q_a] = 1;
        total += binom(big_n - n_a, q_b) * fp_replica_limit_z(p, t, q_b);
      }
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(ReplicaLimit, ZBasisDefiniteCharge) {
  const auto p = ChargeDistribution::delta(8, 4);
  const auto bath = bath_charge_distribution(p, 2);
  EXPECT_NEAR(fp_replica_limit_z(p, {0, 2, 0}, 3), bath[3] / binom(6, 3), 1e-15);
  EXPECT_EQ(fp_replica_limit_z(p, {1, 1, 0}, 3), 0.0);
}

TEST(ReplicaLimit, XBasis) {
  for (int q0 = 0; q0 <= 8; ++q0) {
    const auto prior = sector_prior(8, 3, q0);
    double total = 0.0;
    for (int q_a = 0; q_a <= 3; ++q_a) {
      TypeVector t(4, 0);
      t[q_a] = 2;
      EXPECT_NEAR(fp_replica_limit_x(8, 3, q0, t), std::pow(prior[q_a], 2) / 32.0, 1e-15);
      t[q_a] = 1;
      total += fp_replica_limit_x(8, 3, q0, t);
    }
    EXPECT_NEAR(total * 32.0, 1.0, 1e-14);
  }
}

}  // namespace
}  // namespace deeptherm
