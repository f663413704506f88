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
#include <vector>

#include <gtest/gtest.h>

#include "deeptherm/rng.hpp"
#include "test_util.hpp"

namespace deeptherm {
namespace {

__extension__ using u128 = unsigned __int128;

// Pascal's triangle, built by addition only.
std::vector<std::vector<std::uint64_t>> pascal(int rows) {
  std::vector<std::vector<std::uint64_t>> t(rows + 1);
  for (int n = 0; n <= rows; ++n) {
    t[n].assign(n + 1, 1);
    for (int k = 1; k < n; ++k) t[n][k] = t[n - 1][k - 1] + t[n - 1][k];
  }
  return t;
}

// Joint distribution of (total charge, bath charge) by enumerating bitstrings
// of a state with p(Q) spread uniformly over each sector.
double brute_bath_likelihood(int n, int n_a, int q_b, int q) {
  int hits = 0, total = 0;
  for (std::uint64_t idx = 0; idx < (1u << n); ++idx) {
    if (std::popcount(idx) != q) continue;
    ++total;
    if (std::popcount(idx >> n_a) == q_b) ++hits;
  }
  return total ? static_cast<double>(hits) / total : 0.0;
}

TEST(Binomial, SmallValues) {
  EXPECT_EQ(binomial(4, 2), 6u);
  EXPECT_EQ(binomial(7, 0), 1u);
  EXPECT_EQ(binomial(7, 7), 1u);
  EXPECT_EQ(binomial(5, -1), 0u);
  EXPECT_EQ(binomial(5, 6), 0u);
}

TEST(Binomial, MatchesPascalTriangle) {
  const auto t = pascal(64);
  EXPECT_EQ(binomial(24, 12), 2704156u);
  for (int n = 0; n <= 64; ++n)
    for (int k = 0; k <= n; ++k) EXPECT_EQ(binomial(n, k), t[n][k]) << n << " " << k;
}

TEST(Binomial, OverflowIsAConfigError) {
  EXPECT_THROW(binomial(68, 34), ConfigError);
  EXPECT_THROW(binomial(-1, 0), std::invalid_argument);
}

TEST(BinaryEntropy, KnownValues) {
  EXPECT_DOUBLE_EQ(binary_entropy(0.5), 1.0);
  EXPECT_NEAR(binary_entropy(0.25), 0.8112781244591328, 1e-15);
  EXPECT_NEAR(binary_entropy(0.25), 0.81, 5e-3);
  EXPECT_EQ(binary_entropy(0.0), 0.0);
  EXPECT_EQ(binary_entropy(1.0), 0.0);
  EXPECT_NEAR(binary_entropy(0.5, LogBase::kNats), std::log(2.0), 1e-15);
}

TEST(BinaryEntropy, RejectsOutOfRange) {
  EXPECT_THROW(binary_entropy(-0.1), std::invalid_argument);
  EXPECT_THROW(binary_entropy(1.5), std::invalid_argument);
  EXPECT_THROW(binary_entropy(std::nan("")), std::invalid_argument);
}

TEST(ChargeDistribution, ValidatesInput) {
  EXPECT_THROW(ChargeDistribution({0.5, 0.6}), std::invalid_argument);
  EXPECT_THROW(ChargeDistribution({1.1, -0.1}), std::invalid_argument);
  EXPECT_THROW(ChargeDistribution(std::vector<double>{}), std::invalid_argument);
  const ChargeDistribution clamped({1.0, -1e-16});
  EXPECT_EQ(clamped[1], 0.0);
  EXPECT_EQ(clamped.at(-1), 0.0);
  EXPECT_EQ(clamped.at(5), 0.0);
}

TEST(SectorPrior, EnumerationOracle) {
  const auto prior = sector_prior(4, 2, 2);
  ASSERT_EQ(prior.size(), 3u);
  // Weight-2 strings of 4 bits: 0011 0101 0110 1001 1010 1100; count ones
  // in the low two bits.
  std::vector<double> counts(3, 0.0);
  for (unsigned idx = 0; idx < 16; ++idx)
    if (std::popcount(idx) == 2) counts[std::popcount(idx & 3u)] += 1.0 / 6.0;
  for (int q = 0; q < 3; ++q) EXPECT_NEAR(prior[q], counts[q], 1e-15);
  EXPECT_NEAR(prior[0], 1.0 / 6, 1e-15);
  EXPECT_NEAR(prior[1], 2.0 / 3, 1e-15);
}

TEST(SectorPrior, Degenerate) {
  EXPECT_EQ(sector_prior(5, 0, 3), std::vector<double>{1.0});
  EXPECT_EQ(sector_prior(4, 2, 0), (std::vector<double>{1.0, 0.0, 0.0}));
  EXPECT_THROW(sector_prior(4, 5, 0), std::invalid_argument);
  EXPECT_THROW(sector_prior(4, 2, 5), std::invalid_argument);
}

TEST(BathChargeDistribution, DeltaReducesToSingleTerm) {
  const int n = 7, n_a = 3, q0 = 4;
  const auto bath = bath_charge_distribution(ChargeDistribution::delta(n, q0), n_a);
  for (int q_b = 0; q_b <= n - n_a; ++q_b) {
    const double expect = testing::binom(n_a, q0 - q_b) * testing::binom(n - n_a, q_b) /
                          testing::binom(n, q0);
    EXPECT_NEAR(bath[q_b], expect, 1e-14);
  }
}

TEST(BathChargeDistribution, EquilibriumIsBinomialInBath) {
  const int n = 10, n_a = 3, n_b = 7;
  for (double z : {0.3, 1.0, 2.5}) {
    const auto bath = bath_charge_distribution(equilibrium_distribution(z, n), n_a);
    for (int q_b = 0; q_b <= n_b; ++q_b) {
      const double expect = std::pow(z, q_b) * testing::binom(n_b, q_b) / std::pow(1 + z, n_b);
      EXPECT_NEAR(bath[q_b], expect, 1e-13);
    }
  }
}

TEST(BathChargeDistribution, BruteForceSum) {
  const ChargeDistribution p({0.0, 1.0 / 3, 1.0 / 3, 1.0 / 3, 0.0});
  const auto bath = bath_charge_distribution(p, 2);
  for (int q_b = 0; q_b <= 2; ++q_b) {
    double expect = 0.0;
    for (int q = 0; q <= 4; ++q) expect += brute_bath_likelihood(4, 2, q_b, q) * p[q];
    EXPECT_NEAR(bath[q_b], expect, 1e-15);
  }
}

TEST(PosteriorChargeDistribution, DeltaIsPreserved) {
  const auto post = posterior_charge_distribution(ChargeDistribution::delta(6, 3), 2, 2);
  for (int q = 0; q <= 6; ++q) EXPECT_EQ(post[q], q == 3 ? 1.0 : 0.0);
}

TEST(PosteriorChargeDistribution, EquilibriumIndependentOfBath) {
  const int n = 9, n_a = 3;
  const double z = 1.7;
  const auto p = equilibrium_distribution(z, n);
  for (int q_b = 0; q_b <= n - n_a; ++q_b) {
    const auto post = posterior_charge_distribution(p, n_a, q_b);
    for (int q_a = 0; q_a <= n_a; ++q_a) {
      const double expect = std::pow(z, q_a) * testing::binom(n_a, q_a) / std::pow(1 + z, n_a);
      EXPECT_NEAR(post[q_a + q_b], expect, 1e-13);
    }
  }
}

TEST(PosteriorChargeDistribution, BayesOnSmallCase) {
  const ChargeDistribution p({0.1, 0.2, 0.3, 0.25, 0.15});
  for (int q_b = 0; q_b <= 2; ++q_b) {
    const auto post = posterior_charge_distribution(p, 2, q_b);
    double marginal = 0.0;
    for (int q = 0; q <= 4; ++q) marginal += brute_bath_likelihood(4, 2, q_b, q) * p[q];
    for (int q = 0; q <= 4; ++q)
      EXPECT_NEAR(post[q], brute_bath_likelihood(4, 2, q_b, q) * p[q] / marginal, 1e-14);
  }
}

TEST(PosteriorChargeDistribution, RejectsImpossibleBathCharge) {
  EXPECT_THROW(posterior_charge_distribution(ChargeDistribution::delta(6, 1), 2, 3),
               std::invalid_argument);
}

TEST(EquilibriumDistribution, KnownValues) {
  const auto p = equilibrium_distribution(1.0, 2);
  EXPECT_NEAR(p[0], 0.25, 1e-15);
  EXPECT_NEAR(p[1], 0.5, 1e-15);
  EXPECT_NEAR(p[2], 0.25, 1e-15);
  const auto q = equilibrium_distribution(2.0, 3);
  const double expect[] = {1.0 / 27, 6.0 / 27, 12.0 / 27, 8.0 / 27};
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(q[i], expect[i], 1e-15);
  for (double z : {0.2, 1.0, 3.0}) EXPECT_NEAR(equilibrium_distribution(z, 11).mean(), 11 * z / (1 + z), 1e-12);
  EXPECT_THROW(equilibrium_distribution(0.0, 3), std::invalid_argument);
}

TEST(ProductStateChargeDistribution, NeelHasDefiniteCharge) {
  const auto e = theta_state_excitation_probs(8, 0.0);
  const auto p = product_state_charge_distribution(e);
  for (int q = 0; q <= 8; ++q) EXPECT_NEAR(p[q], q == 4 ? 1.0 : 0.0, 1e-15);
  EXPECT_NEAR(p.variance(), 0.0, 1e-15);
}

TEST(ProductStateChargeDistribution, PlusStateVariance) {
  const auto p = product_state_charge_distribution(theta_state_excitation_probs(8, kPi / 4));
  EXPECT_NEAR(p.variance(), 2.0, 1e-12);
}

TEST(ProductStateChargeDistribution, ConvolutionOracle) {
  const int n = 6;
  const double theta = kPi / 20;
  const auto e = theta_state_excitation_probs(n, theta);
  std::vector<double> brute(n + 1, 0.0);
  for (unsigned idx = 0; idx < (1u << n); ++idx) {
    double w = 1.0;
    for (int i = 0; i < n; ++i) w *= (idx >> i & 1u) ? e[i] : 1.0 - e[i];
    brute[std::popcount(idx)] += w;
  }
  const auto p = product_state_charge_distribution(e);
  for (int q = 0; q <= n; ++q) EXPECT_NEAR(p[q], brute[q], 1e-15);
  EXPECT_THROW(product_state_charge_distribution(std::vector<double>{0.5, 1.5}), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Randomized invariants.

TEST(SectorsProperty, DistributionsAreNormalized) {
  Stream rng(11);
  for (int trial = 0; trial < 250; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 20);
    const int n_a = 1 + static_cast<int>(rng() % (n - 1));
    std::vector<double> e(n);
    for (auto& x : e) x = rng.uniform();
    const auto p = product_state_charge_distribution(e);
    auto check = [](std::span<const double> v) {
      double s = 0.0;
      for (double x : v) {
        EXPECT_GE(x, 0.0);
        s += x;
      }
      EXPECT_NEAR(s, 1.0, 1e-12);
    };
    check(p.probs());
    check(bath_charge_distribution(p, n_a));
    const int q0 = static_cast<int>(rng() % (n + 1));
    check(sector_prior(n, n_a, q0));
    check(equilibrium_distribution(0.1 + 3 * rng.uniform(), n).probs());
    EXPECT_TRUE(std::isfinite(p.mean()));
    EXPECT_TRUE(std::isfinite(p.variance()));
  }
}

TEST(SectorsProperty, VandermondeExactInIntegers) {
  Stream rng(12);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 60);
    const int n_a = static_cast<int>(rng() % (n + 1));
    const int q0 = static_cast<int>(rng() % (n + 1));
    u128 sum = 0;
    for (int q_a = 0; q_a <= n_a; ++q_a)
      sum += static_cast<u128>(binomial(n_a, q_a)) * binomial(n - n_a, q0 - q_a);
    EXPECT_TRUE(sum == binomial(n, q0)) << n << " " << n_a << " " << q0;
  }
}

TEST(SectorsProperty, PosteriorTimesMarginalIsJoint) {
  Stream rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 14);
    const int n_a = 1 + static_cast<int>(rng() % (n - 2));
    std::vector<double> e(n);
    for (auto& x : e) x = 0.05 + 0.9 * rng.uniform();
    const auto p = product_state_charge_distribution(e);
    const auto bath = bath_charge_distribution(p, n_a);
    for (int q_b = 0; q_b <= n - n_a; ++q_b) {
      const auto post = posterior_charge_distribution(p, n_a, q_b);
      for (int q = 0; q <= n; ++q) {
        EXPECT_NEAR(post[q] * bath[q_b], bath_charge_likelihood(n, n_a, q_b, q) * p[q], 1e-14);
      }
    }
  }
}

TEST(SectorsProperty, ThetaStateMeanAndVariance) {
  Stream rng(14);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 * (1 + static_cast<int>(rng() % 15));
    const double theta = rng.uniform() * kPi / 2;
    const auto p = product_state_charge_distribution(theta_state_excitation_probs(n, theta));
    EXPECT_NEAR(p.mean(), n / 2.0, 1e-10);
    const double s = std::sin(2 * theta);
    EXPECT_NEAR(p.variance(), n / 4.0 * s * s, 1e-10);
  }
}

TEST(SectorTable, PartitionAndRoundTrip) {
  for (int n = 0; n <= 12; ++n) {
    const SectorTable table(n);
    std::size_t total = 0;
    for (int q = 0; q <= n; ++q) {
      EXPECT_EQ(table.sector_size(q), binomial(n, q));
      const auto sec = table.sector(q);
      for (std::size_t pos = 0; pos < sec.size(); ++pos) {
        const auto loc = table.locate(sec[pos]);
        EXPECT_EQ(loc.charge, q);
        EXPECT_EQ(loc.position, pos);
      }
      total += sec.size();
    }
    EXPECT_EQ(total, std::size_t{1} << n);
  }
  EXPECT_THROW(SectorTable(4).locate(16), std::out_of_range);
  EXPECT_THROW(SectorTable(31), ConfigError);
}

}  // namespace
}  // namespace deeptherm
