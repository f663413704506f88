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

#include <algorithm>
#include <atomic>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "deeptherm/replica_coefficients.hpp"

namespace deeptherm {

namespace {

constexpr std::size_t kSampleBlock = 4096;

void require_sector(int n_a, int q_a) {
  if (n_a < 0 || q_a < 0 || q_a > n_a) {
    throw std::invalid_argument("sector Q_A = " + std::to_string(q_a) + " invalid for N_A = " +
                                std::to_string(n_a));
  }
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

CMatrix charge_weighted_rho(int n_a, const std::vector<double>& sector_weight) {
  const Eigen::Index d = Eigen::Index{1} << n_a;
  CMatrix rho = CMatrix::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const int q = std::popcount(static_cast<std::uint64_t>(i));
    rho(i, i) = sector_weight[static_cast<std::size_t>(q)] / binomial_real(n_a, q);
  }
  return rho;
}

// Monte Carlo accumulation of (1/M) Sum_i c_i c_i^dagger where c_i is the
// compressed embedding of draw(i, stream_i). Blocks of kSampleBlock samples
// are summed independently and reduced in block order.
template <class Draw>
CMatrix accumulate_mc(const SymmetricBasis& sym, std::size_t samples, const Stream& rng,
                      int workers, Draw draw) {
  if (samples == 0) throw std::invalid_argument("Monte Carlo moment: need at least one sample");
  const auto dim = static_cast<Eigen::Index>(sym.dimension());
  const std::size_t n_blocks = (samples + kSampleBlock - 1) / kSampleBlock;
  std::vector<CMatrix> partial(n_blocks);

  auto run_block = [&](std::size_t blk) {
    const std::size_t begin = blk * kSampleBlock;
    const std::size_t end = std::min(samples, begin + kSampleBlock);
    CMatrix acc = CMatrix::Zero(dim, dim);
    constexpr Eigen::Index kCols = 256;
    CMatrix cols(dim, kCols);
    Eigen::Index filled = 0;
    for (std::size_t i = begin; i < end; ++i) {
      Stream s = rng.derive(static_cast<std::uint64_t>(i));
      const CVector psi = draw(s);
      sym.embed(psi.data(), cols.col(filled).data());
      if (++filled == kCols) {
        acc.selfadjointView<Eigen::Lower>().rankUpdate(cols);
        filled = 0;
      }
    }
    if (filled > 0) acc.selfadjointView<Eigen::Lower>().rankUpdate(cols.leftCols(filled));
    partial[blk] = acc;
  };

  const int n_threads = std::max(1, std::min<int>(workers, static_cast<int>(n_blocks)));
  if (n_threads == 1) {
    for (std::size_t b = 0; b < n_blocks; ++b) run_block(b);
  } else {
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    for (int t = 0; t < n_threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t b = next++; b < n_blocks; b = next++) {
          try {
            run_block(b);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
  }

  CMatrix total = CMatrix::Zero(dim, dim);
  for (const CMatrix& m : partial) total += m;
  total = CMatrix(total.selfadjointView<Eigen::Lower>());
  return total / static_cast<double>(samples);
}

MomentOperator expand_to_full(const SymmetricBasis& sym, const CMatrix& compressed,
                              std::size_t cap) {
  replica_dimension(sym.local_dim(), sym.order(), cap);
  return {sym.local_dim(), sym.order(), sym.expand(compressed)};
}

}  // namespace

CMatrix sector_projector(int n_a, int q_a) {
  require_sector(n_a, q_a);
  const Eigen::Index d = Eigen::Index{1} << n_a;
  CMatrix p = CMatrix::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    if (std::popcount(static_cast<std::uint64_t>(i)) == q_a) p(i, i) = 1.0;
  }
  return p;
}

CMatrix haar_moment_sym(const SymmetricBasis& sym) {
  const auto dim = static_cast<Eigen::Index>(sym.dimension());
  return CMatrix::Identity(dim, dim) / static_cast<double>(dim);
}

CMatrix sector_haar_moment_sym(const SymmetricBasis& sym, int n_a, int q_a) {
  require_sector(n_a, q_a);
  if (sym.local_dim() != (1 << n_a)) {
    throw std::invalid_argument("sector_haar_moment: basis dimension is not 2^N_A");
  }
  const auto dim = static_cast<Eigen::Index>(sym.dimension());
  const double norm = binomial_real(static_cast<int>(binomial(n_a, q_a)) + sym.order() - 1, sym.order());
  CMatrix m = CMatrix::Zero(dim, dim);
  for (Eigen::Index b = 0; b < dim; ++b) {
    const auto idx = sym.indices(static_cast<std::size_t>(b));
    const bool inside = std::all_of(idx.begin(), idx.end(), [&](int i) {
      return std::popcount(static_cast<unsigned>(i)) == q_a;
    });
    if (inside) m(b, b) = 1.0 / norm;
  }
  return m;
}

CMatrix direct_sum_moment_sym(const SymmetricBasis& sym, int n, int n_a, int q0) {
  const std::vector<double> prior = sector_prior(n, n_a, q0);
  const auto dim = static_cast<Eigen::Index>(sym.dimension());
  CMatrix m = CMatrix::Zero(dim, dim);
  for (int q_a = 0; q_a <= n_a; ++q_a) {
    const double w = prior[static_cast<std::size_t>(q_a)];
    if (w > 0.0) m += w * sector_haar_moment_sym(sym, n_a, q_a);
  }
  return m;
}

MomentOperator haar_moment(int d, int k, std::size_t cap) {
  replica_dimension(d, k, cap);
  const SymmetricBasis sym(d, k);
  return expand_to_full(sym, haar_moment_sym(sym), cap);
}

MomentOperator sector_haar_moment(int n_a, int q_a, int k, std::size_t cap) {
  replica_dimension(1 << n_a, k, cap);
  const SymmetricBasis sym(1 << n_a, k);
  return expand_to_full(sym, sector_haar_moment_sym(sym, n_a, q_a), cap);
}

MomentOperator direct_sum_moment(int n, int n_a, int q0, int k, std::size_t cap) {
  replica_dimension(1 << n_a, k, cap);
  const SymmetricBasis sym(1 << n_a, k);
  return expand_to_full(sym, direct_sum_moment_sym(sym, n, n_a, q0), cap);
}

ScroogeSampler::ScroogeSampler(const CMatrix& rho) : rho_(rho) {
  if (rho.rows() != rho.cols() || rho.rows() == 0) {
    throw std::invalid_argument("Scrooge: density matrix must be square");
  }
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
    throw std::invalid_argument("Scrooge: density matrix is not Hermitian");
  }
  if (std::abs(rho.trace() - Complex{1.0, 0.0}) > 1e-10) {
    throw std::invalid_argument("Scrooge: density matrix does not have unit trace");
  }
  const CMatrix herm = (rho + rho.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(herm);
  Eigen::VectorXd vals = eig.eigenvalues();
  if (vals.minCoeff() < -1e-12) {
    throw std::invalid_argument("Scrooge: density matrix is not positive semidefinite");
  }
  vals = vals.cwiseMax(0.0);
  lambda_max_ = vals.maxCoeff();
  sqrt_rho_ = eig.eigenvectors() * vals.cwiseSqrt().asDiagonal() * eig.eigenvectors().adjoint();
  rho_ = herm;
}

CVector ScroogeSampler::sample(Stream& rng) const {
  const Eigen::Index d = sqrt_rho_.rows();
  CVector psi(d);
  while (true) {
    for (Eigen::Index i = 0; i < d; ++i) psi[i] = rng.complex_normal();
    psi.normalize();
    const double accept = psi.dot(rho_ * psi).real() / lambda_max_;
    if (rng.uniform() < accept) break;
  }
  CVector out = sqrt_rho_ * psi;
  out.normalize();
  return out;
}

CVector scrooge_sample(const CMatrix& rho, Stream& rng) { return ScroogeSampler(rho).sample(rng); }

CMatrix scrooge_moment_mc_sym(const CMatrix& rho, const SymmetricBasis& sym, std::size_t samples,
                              const Stream& rng, int workers) {
  if (rho.rows() != sym.local_dim()) {
    throw std::invalid_argument("scrooge_moment_mc: density matrix and basis dimensions differ");
  }
  const ScroogeSampler sampler(rho);
  return accumulate_mc(sym, samples, rng, workers, [&](Stream& s) { return sampler.sample(s); });
}

SampledMoment scrooge_moment_mc(const CMatrix& rho, int k, std::size_t samples, const Stream& rng,
                                int workers, std::size_t cap) {
  const int d = static_cast<int>(rho.rows());
  replica_dimension(d, k, cap);
  const SymmetricBasis sym(d, k);
  return {expand_to_full(sym, scrooge_moment_mc_sym(rho, sym, samples, rng, workers), cap), samples};
}

CMatrix gse_rho_bar(const ChargeDistribution& p, int n_a, int q_b) {
  const std::vector<double> post = posterior_charge_distribution(p, n_a, q_b);
  std::vector<double> sector_weight(static_cast<std::size_t>(n_a) + 1);
  for (int q_a = 0; q_a <= n_a; ++q_a) {
    sector_weight[static_cast<std::size_t>(q_a)] = post[static_cast<std::size_t>(q_a + q_b)];
  }
  return charge_weighted_rho(n_a, sector_weight);
}

CMatrix gse_moment_mc_sym(const ChargeDistribution& p, const SymmetricBasis& sym, int n_a,
                          std::size_t samples, const Stream& rng, int workers) {
  if (sym.local_dim() != (1 << n_a)) {
    throw std::invalid_argument("gse_moment_mc: basis dimension is not 2^N_A");
  }
  const std::vector<double> bath = bath_charge_distribution(p, n_a);
  std::vector<double> cumulative;
  std::vector<std::optional<ScroogeSampler>> samplers(bath.size());
  double acc = 0.0;
  for (std::size_t q_b = 0; q_b < bath.size(); ++q_b) {
    acc += bath[q_b];
    cumulative.push_back(acc);
    if (bath[q_b] > 0.0) samplers[q_b].emplace(gse_rho_bar(p, n_a, static_cast<int>(q_b)));
  }
  return accumulate_mc(sym, samples, rng, workers, [&](Stream& s) {
    const double u = s.uniform() * cumulative.back();
    std::size_t q_b = static_cast<std::size_t>(
        std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
    q_b = std::min(q_b, bath.size() - 1);
    while (!samplers[q_b]) --q_b;  // only reachable through roundoff at u ~ 1
    return samplers[q_b]->sample(s);
  });
}

SampledMoment gse_moment_mc(const ChargeDistribution& p, int n_a, int k, std::size_t samples,
                            const Stream& rng, int workers, std::size_t cap) {
  replica_dimension(1 << n_a, k, cap);
  const SymmetricBasis sym(1 << n_a, k);
  return {expand_to_full(sym, gse_moment_mc_sym(p, sym, n_a, samples, rng, workers), cap), samples};
}

AnalyticMomentSym gse_moment_analytic_sym(const ChargeDistribution& p, const SymmetricBasis& sym,
                                          int n_a, std::size_t cap) {
  const int d = 1 << n_a;
  const int k = sym.order();
  if (sym.local_dim() != d) {
    throw std::invalid_argument("gse_moment_analytic: basis dimension is not 2^N_A");
  }
  replica_dimension(d, k, cap);
  const auto& types = enumerate_types(k, n_a);

  // Per-sector Haar moments on r replicas, dense, r = 0..k.
  std::vector<std::vector<CMatrix>> sector_moments(static_cast<std::size_t>(n_a) + 1);
  for (int q_a = 0; q_a <= n_a; ++q_a) {
    auto& row = sector_moments[static_cast<std::size_t>(q_a)];
    row.push_back(CMatrix::Ones(1, 1));
    for (int r = 1; r <= k; ++r) {
      const SymmetricBasis sub(d, r);
      row.push_back(sub.expand(sector_haar_moment_sym(sub, n_a, q_a)));
    }
  }

  // B_T = multinomial(k,T)^2 Pi_sym (x)_{Q_A} rho^{(T_QA)}_{Haar,Q_A} Pi_sym.
  std::vector<CMatrix> b_t;
  b_t.reserve(types.size());
  for (const TypeVector& t : types) {
    CMatrix x = CMatrix::Ones(1, 1);
    for (int q_a = 0; q_a <= n_a; ++q_a) {
      const int r = t[static_cast<std::size_t>(q_a)];
      if (r > 0) x = kron(x, sector_moments[static_cast<std::size_t>(q_a)][static_cast<std::size_t>(r)]);
    }
    const double mult = multinomial(t);
    b_t.push_back(mult * mult * sym.compress(x));
  }

  const std::vector<double> bath = bath_charge_distribution(p, n_a);
  const auto dim = static_cast<Eigen::Index>(sym.dimension());
  CMatrix total = CMatrix::Zero(dim, dim);
  for (std::size_t q_b = 0; q_b < bath.size(); ++q_b) {
    if (!(bath[q_b] > 0.0)) continue;
    const std::vector<double> post = posterior_charge_distribution(p, n_a, static_cast<int>(q_b));
    for (std::size_t ti = 0; ti < types.size(); ++ti) {
      double w = bath[q_b];
      for (int q_a = 0; q_a <= n_a; ++q_a) {
        const int r = types[ti][static_cast<std::size_t>(q_a)];
        if (r > 0) w *= std::pow(post[q_b + static_cast<std::size_t>(q_a)], r);
      }
      if (w != 0.0) total += w * b_t[ti];
    }
  }
  const double trace = total.trace().real();
  return {total / trace, 1.0 - trace};
}

AnalyticMoment gse_moment_analytic(const ChargeDistribution& p, int n_a, int k, std::size_t cap) {
  replica_dimension(1 << n_a, k, cap);
  const SymmetricBasis sym(1 << n_a, k);
  AnalyticMomentSym a = gse_moment_analytic_sym(p, sym, n_a, cap);
  return {expand_to_full(sym, a.matrix, cap), a.trace_defect};
}

CMatrix xbasis_scrooge_rho(int n, int n_a, int q0) {
  return charge_weighted_rho(n_a, sector_prior(n, n_a, q0));
}

CMatrix finite_n_rho(int n, int n_a, int q0) { return xbasis_scrooge_rho(n, n_a, q0); }

CMatrix fugacity_rho(int n_a, double fugacity) {
  const ChargeDistribution eq = equilibrium_distribution(fugacity, n_a);
  return charge_weighted_rho(n_a, std::vector<double>(eq.probs().begin(), eq.probs().end()));
}

// ---------------------------------------------------------------------------

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

int parse_int(std::string_view s, std::string_view what) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("target '" + std::string(what) + "': bad integer '" +
                                std::string(s) + "'");
  }
  return v;
}

int definite_charge(const TargetContext& ctx, const char* target) {
  const auto probs = ctx.p.probs();
  for (std::size_t q = 0; q < probs.size(); ++q) {
    if (probs[q] == 1.0) return static_cast<int>(q);
  }
  throw std::invalid_argument(std::string(target) +
                              " target needs Q0: the initial state has no definite charge");
}

}  // namespace

std::string to_string(const TargetSpec& spec) {
  return std::visit(
      Overloaded{
          [](const HaarTarget&) -> std::string { return "haar"; },
          [](const SectorHaarTarget& t) -> std::string {
            return "sector-haar:" + std::to_string(t.q_a);
          },
          [](const DirectSumTarget& t) -> std::string {
            return t.q0 ? "direct-sum:" + std::to_string(*t.q0) : "direct-sum";
          },
          [](const ScroogeTarget& t) -> std::string {
            if (t.rho) return "scrooge:matrix";
            return t.fugacity == 1.0 ? "scrooge" : "scrooge:z=" + format_double(t.fugacity);
          },
          [](const GseTarget& t) -> std::string {
            return t.method == GseTarget::Method::kAnalytic ? "gse:analytic" : "gse:mc";
          },
          [](const FiniteNScroogeTarget& t) -> std::string {
            return t.q0 ? "finite-n-scrooge:" + std::to_string(*t.q0) : "finite-n-scrooge";
          },
      },
      spec);
}

TargetSpec parse_target(std::string_view text) {
  const std::size_t colon = text.find(':');
  const std::string_view head = text.substr(0, colon);
  const std::string_view arg =
      colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  const bool has_arg = colon != std::string_view::npos;

  if (head == "haar" && !has_arg) return HaarTarget{};
  if (head == "sector-haar" && has_arg) return SectorHaarTarget{parse_int(arg, text)};
  if (head == "direct-sum") {
    return DirectSumTarget{has_arg ? std::optional<int>(parse_int(arg, text)) : std::nullopt};
  }
  if (head == "finite-n-scrooge") {
    return FiniteNScroogeTarget{has_arg ? std::optional<int>(parse_int(arg, text)) : std::nullopt};
  }
  if (head == "scrooge") {
    if (!has_arg) return ScroogeTarget{};
    if (arg.starts_with("z=")) {
      const std::string num(arg.substr(2));
      std::size_t used = 0;
      double z = 0.0;
      try {
        z = std::stod(num, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != num.size() || !(z > 0.0)) {
        throw std::invalid_argument("target 'scrooge:z=': fugacity must be a positive number");
      }
      return ScroogeTarget{std::nullopt, z};
    }
  }
  if (head == "gse") {
    if (!has_arg || arg == "mc") return GseTarget{GseTarget::Method::kMonteCarlo};
    if (arg == "analytic") return GseTarget{GseTarget::Method::kAnalytic};
  }
  throw std::invalid_argument("unknown target '" + std::string(text) + "'");
}

MomentOperator ResolvedTarget::full() const {
  const SymmetricBasis sym(local_dim, k);
  return {local_dim, k, sym.expand(matrix)};
}

ResolvedTarget resolve_target(const TargetSpec& spec, const TargetContext& ctx) {
  if (ctx.n_a < 0 || ctx.n_a >= ctx.n) throw std::invalid_argument("target: need 0 <= N_A < N");
  if (ctx.k < 1) throw std::invalid_argument("target: k must be >= 1");
  const int d = 1 << ctx.n_a;
  const SymmetricBasis sym(d, ctx.k);
  ResolvedTarget out;
  out.local_dim = d;
  out.k = ctx.k;
  std::visit(
      Overloaded{
          [&](const HaarTarget&) { out.matrix = haar_moment_sym(sym); },
          [&](const SectorHaarTarget& t) {
            out.matrix = sector_haar_moment_sym(sym, ctx.n_a, t.q_a);
          },
          [&](const DirectSumTarget& t) {
            const int q0 = t.q0 ? *t.q0 : definite_charge(ctx, "direct-sum");
            out.matrix = direct_sum_moment_sym(sym, ctx.n, ctx.n_a, q0);
          },
          [&](const ScroogeTarget& t) {
            const CMatrix rho = t.rho ? *t.rho : fugacity_rho(ctx.n_a, t.fugacity);
            out.matrix = scrooge_moment_mc_sym(rho, sym, ctx.mc_samples, ctx.rng, ctx.workers);
            out.samples = ctx.mc_samples;
          },
          [&](const GseTarget& t) {
            if (t.method == GseTarget::Method::kAnalytic) {
              AnalyticMomentSym a = gse_moment_analytic_sym(ctx.p, sym, ctx.n_a, ctx.cap);
              out.matrix = std::move(a.matrix);
              out.trace_defect = a.trace_defect;
            } else {
              out.matrix = gse_moment_mc_sym(ctx.p, sym, ctx.n_a, ctx.mc_samples, ctx.rng, ctx.workers);
              out.samples = ctx.mc_samples;
            }
          },
          [&](const FiniteNScroogeTarget& t) {
            const int q0 = t.q0 ? *t.q0 : definite_charge(ctx, "finite-n-scrooge");
            out.matrix = scrooge_moment_mc_sym(finite_n_rho(ctx.n, ctx.n_a, q0), sym,
                                               ctx.mc_samples, ctx.rng, ctx.workers);
            out.samples = ctx.mc_samples;
          },
      },
      spec);
  return out;
}

}  // namespace deeptherm
