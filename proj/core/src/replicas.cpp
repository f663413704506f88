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

#include "deeptherm/replicas.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "deeptherm/sectors.hpp"

namespace deeptherm {

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

std::uint64_t encode(std::span<const int> digits, int d) {
  std::uint64_t code = 0;
  for (int x : digits) code = code * static_cast<std::uint64_t>(d) + static_cast<std::uint64_t>(x);
  return code;
}

}  // namespace

std::size_t replica_dimension(int d, int k, std::size_t cap) {
  if (d < 1 || k < 0) throw std::invalid_argument("replica_dimension: need d >= 1, k >= 0");
  std::size_t dim = 1;
  for (int i = 0; i < k; ++i) {
    if (dim > cap / static_cast<std::size_t>(d)) {
      throw ConfigError("replica space dimension " + std::to_string(d) + "^" + std::to_string(k) +
                        " exceeds the moment cap " + std::to_string(cap));
    }
    dim *= static_cast<std::size_t>(d);
  }
  if (dim > cap) {
    throw ConfigError("replica space dimension exceeds the moment cap " + std::to_string(cap));
  }
  return dim;
}

CVector tensor_power(const CVector& psi, int k) {
  if (k < 0) throw std::invalid_argument("tensor_power: negative k");
  CVector out = CVector::Ones(1);
  for (int r = 0; r < k; ++r) {
    CVector next(out.size() * psi.size());
    for (Eigen::Index a = 0; a < out.size(); ++a) {
      next.segment(a * psi.size(), psi.size()) = out[a] * psi;
    }
    out = std::move(next);
  }
  return out;
}

CMatrix permutation_operator(int d, std::span<const int> perm) {
  const int k = static_cast<int>(perm.size());
  std::vector<int> seen(perm.size(), 0);
  for (int p : perm) {
    if (p < 0 || p >= k || seen[static_cast<std::size_t>(p)]++) {
      throw std::invalid_argument("permutation_operator: not a permutation");
    }
  }
  const std::size_t dim = replica_dimension(d, k, std::numeric_limits<std::size_t>::max());
  CMatrix op = CMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  std::vector<int> in(perm.size()), out(perm.size());
  for (std::size_t idx = 0; idx < dim; ++idx) {
    std::size_t rest = idx;
    for (int j = k - 1; j >= 0; --j) {
      in[static_cast<std::size_t>(j)] = static_cast<int>(rest % static_cast<std::size_t>(d));
      rest /= static_cast<std::size_t>(d);
    }
    for (int j = 0; j < k; ++j) out[static_cast<std::size_t>(perm[j])] = in[static_cast<std::size_t>(j)];
    op(static_cast<Eigen::Index>(encode(out, d)), static_cast<Eigen::Index>(idx)) = 1.0;
  }
  return op;
}

CMatrix symmetric_projector(int d, int k, std::size_t cap) {
  const auto dim = static_cast<Eigen::Index>(replica_dimension(d, k, cap));
  CMatrix sum = CMatrix::Zero(dim, dim);
  std::vector<int> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  do {
    sum += permutation_operator(d, perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return sum / factorial(k);
}

SymmetricBasis::SymmetricBasis(int d, int k) : d_(d), k_(k) {
  if (d < 1 || k < 0) throw std::invalid_argument("SymmetricBasis: need d >= 1, k >= 0");
  const std::uint64_t count = binomial(d + k - 1, k);
  coef_.reserve(count);
  indices_.reserve(count * static_cast<std::uint64_t>(k));
  // Lexicographic enumeration of non-decreasing k-tuples over 0..d-1.
  std::vector<int> tuple(static_cast<std::size_t>(k), 0);
  const double kfact = factorial(k);
  while (true) {
    indices_.insert(indices_.end(), tuple.begin(), tuple.end());
    double denom = 1.0;
    int run = 1;
    for (int j = 1; j <= k; ++j) {
      if (j < k && tuple[static_cast<std::size_t>(j)] == tuple[static_cast<std::size_t>(j - 1)]) {
        ++run;
      } else {
        denom *= factorial(run);
        run = 1;
      }
    }
    coef_.push_back(std::sqrt(kfact / denom));
    int pos = k - 1;
    while (pos >= 0 && tuple[static_cast<std::size_t>(pos)] == d - 1) --pos;
    if (pos < 0) break;
    const int next = tuple[static_cast<std::size_t>(pos)] + 1;
    for (int j = pos; j < k; ++j) tuple[static_cast<std::size_t>(j)] = next;
  }
}

std::span<const int> SymmetricBasis::indices(std::size_t index) const {
  if (index >= dimension()) throw std::out_of_range("SymmetricBasis::indices: index out of range");
  return {indices_.data() + index * static_cast<std::size_t>(k_), static_cast<std::size_t>(k_)};
}

std::vector<int> SymmetricBasis::occupation(std::size_t index) const {
  std::vector<int> n(static_cast<std::size_t>(d_), 0);
  for (int i : indices(index)) ++n[static_cast<std::size_t>(i)];
  return n;
}

void SymmetricBasis::embed(const Complex* psi, Complex* out) const {
  const std::size_t dim = dimension();
  const int* idx = indices_.data();
  for (std::size_t b = 0; b < dim; ++b) {
    Complex prod = coef_[b];
    for (int j = 0; j < k_; ++j) prod *= psi[idx[j]];
    out[b] = prod;
    idx += k_;
  }
}

CVector SymmetricBasis::embed(const CVector& psi) const {
  if (psi.size() != d_) throw std::invalid_argument("SymmetricBasis::embed: dimension mismatch");
  CVector out(static_cast<Eigen::Index>(dimension()));
  embed(psi.data(), out.data());
  return out;
}

namespace {

// For every replica index: its symmetric basis vector and the overlap
// <idx|n> = 1 / coef_n.
struct RowMap {
  std::vector<std::size_t> basis;
  std::vector<double> overlap;
};

RowMap row_map(const SymmetricBasis& sym, std::size_t full_dim) {
  const int d = sym.local_dim();
  const int k = sym.order();
  std::unordered_map<std::uint64_t, std::size_t> lookup;
  lookup.reserve(sym.dimension());
  for (std::size_t b = 0; b < sym.dimension(); ++b) lookup.emplace(encode(sym.indices(b), d), b);
  RowMap map;
  map.basis.resize(full_dim);
  map.overlap.resize(full_dim);
  std::vector<int> digits(static_cast<std::size_t>(k));
  for (std::size_t idx = 0; idx < full_dim; ++idx) {
    std::size_t rest = idx;
    for (int j = k - 1; j >= 0; --j) {
      digits[static_cast<std::size_t>(j)] = static_cast<int>(rest % static_cast<std::size_t>(d));
      rest /= static_cast<std::size_t>(d);
    }
    std::sort(digits.begin(), digits.end());
    const std::size_t b = lookup.at(encode(digits, d));
    map.basis[idx] = b;
    const auto n = sym.occupation(b);
    double denom = 1.0;
    for (int c : n) denom *= factorial(c);
    map.overlap[idx] = std::sqrt(denom / factorial(k));
  }
  return map;
}

}  // namespace

CMatrix SymmetricBasis::isometry() const {
  const std::size_t full = replica_dimension(d_, k_, std::numeric_limits<std::size_t>::max());
  const RowMap map = row_map(*this, full);
  CMatrix v = CMatrix::Zero(static_cast<Eigen::Index>(full), static_cast<Eigen::Index>(dimension()));
  for (std::size_t idx = 0; idx < full; ++idx) {
    v(static_cast<Eigen::Index>(idx), static_cast<Eigen::Index>(map.basis[idx])) = map.overlap[idx];
  }
  return v;
}

CMatrix SymmetricBasis::compress(const CMatrix& full) const {
  const std::size_t dim = replica_dimension(d_, k_, std::numeric_limits<std::size_t>::max());
  if (full.rows() != static_cast<Eigen::Index>(dim) || full.cols() != full.rows()) {
    throw std::invalid_argument("SymmetricBasis::compress: dimension mismatch");
  }
  const RowMap map = row_map(*this, dim);
  const auto small = static_cast<Eigen::Index>(dimension());
  CMatrix out = CMatrix::Zero(small, small);
  for (std::size_t j = 0; j < dim; ++j) {
    const auto bj = static_cast<Eigen::Index>(map.basis[j]);
    for (std::size_t i = 0; i < dim; ++i) {
      out(static_cast<Eigen::Index>(map.basis[i]), bj) +=
          full(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * (map.overlap[i] * map.overlap[j]);
    }
  }
  return out;
}

CMatrix SymmetricBasis::expand(const CMatrix& compressed) const {
  const auto small = static_cast<Eigen::Index>(dimension());
  if (compressed.rows() != small || compressed.cols() != small) {
    throw std::invalid_argument("SymmetricBasis::expand: dimension mismatch");
  }
  const std::size_t dim = replica_dimension(d_, k_, std::numeric_limits<std::size_t>::max());
  const RowMap map = row_map(*this, dim);
  CMatrix out(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t j = 0; j < dim; ++j) {
    for (std::size_t i = 0; i < dim; ++i) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          compressed(static_cast<Eigen::Index>(map.basis[i]), static_cast<Eigen::Index>(map.basis[j])) *
          (map.overlap[i] * map.overlap[j]);
    }
  }
  return out;
}

}  // namespace deeptherm
