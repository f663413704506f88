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

#include "deeptherm/ensembles.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace deeptherm {

namespace {

// Columns per GEMM when accumulating moments.
constexpr Eigen::Index kChunk = 512;

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

double parse_double(std::string_view s) {
  const std::string str(s);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(str, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != str.size()) {
    throw std::invalid_argument("measurement basis: bad number '" + str + "'");
  }
  return v;
}

}  // namespace

BlochAxis MeasurementBasis::axis_for(int bath_qubit) const {
  switch (kind_) {
    case Kind::kZ:
      return BlochAxis::z();
    case Kind::kX:
      return BlochAxis::x();
    case Kind::kAxis:
      return axes_.front();
    case Kind::kPerQubit:
      if (bath_qubit < 0 || bath_qubit >= static_cast<int>(axes_.size())) {
        throw std::out_of_range("MeasurementBasis: no axis for bath qubit " +
                                std::to_string(bath_qubit));
      }
      return axes_[static_cast<std::size_t>(bath_qubit)];
  }
  return BlochAxis::z();
}

std::string MeasurementBasis::to_string() const {
  switch (kind_) {
    case Kind::kZ:
      return "z";
    case Kind::kX:
      return "x";
    case Kind::kAxis:
      return "axis:" + format_double(axes_.front().polar) + ":" +
             format_double(axes_.front().azimuth);
    case Kind::kPerQubit: {
      std::string out = "axes:";
      for (std::size_t i = 0; i < axes_.size(); ++i) {
        if (i) out += ';';
        out += format_double(axes_[i].polar) + "," + format_double(axes_[i].azimuth);
      }
      return out;
    }
  }
  return "z";
}

MeasurementBasis MeasurementBasis::parse(std::string_view text) {
  if (text == "z") return z();
  if (text == "x") return x();
  if (text.starts_with("axis:")) {
    const auto parts = split(text.substr(5), ':');
    if (parts.size() != 2) throw std::invalid_argument("basis 'axis:' needs <polar>:<azimuth>");
    return axis({parse_double(parts[0]), parse_double(parts[1])});
  }
  if (text.starts_with("axes:")) {
    std::vector<BlochAxis> axes;
    for (std::string_view item : split(text.substr(5), ';')) {
      const auto pa = split(item, ',');
      if (pa.size() != 2) throw std::invalid_argument("basis 'axes:' entries are <polar>,<azimuth>");
      axes.push_back({parse_double(pa[0]), parse_double(pa[1])});
    }
    return per_qubit(std::move(axes));
  }
  throw std::invalid_argument("unknown measurement basis '" + std::string(text) + "'");
}

bool operator==(const MeasurementBasis& a, const MeasurementBasis& b) {
  if (a.kind_ != b.kind_ || a.axes_.size() != b.axes_.size()) return false;
  for (std::size_t i = 0; i < a.axes_.size(); ++i) {
    if (a.axes_[i].polar != b.axes_[i].polar || a.axes_[i].azimuth != b.axes_[i].azimuth) return false;
  }
  return true;
}

ProjectedEnsemble project(const StateVector& state, int n_a, const MeasurementBasis& basis,
                          double cutoff) {
  const int n = state.n_qubits();
  if (n_a < 0 || n_a >= n) {
    throw std::invalid_argument("project: need 0 <= N_A < N (N_A = " + std::to_string(n_a) +
                                ", N = " + std::to_string(n) + ")");
  }
  const int n_b = n - n_a;
  if (basis.kind() == MeasurementBasis::Kind::kPerQubit &&
      static_cast<int>(basis.axes().size()) != n_b) {
    throw std::invalid_argument("project: per-qubit basis needs one axis per bath qubit");
  }

  StateVector rotated = state;
  if (basis.kind() != MeasurementBasis::Kind::kZ) {
    std::vector<BlochAxis> axes;
    std::vector<int> qubits;
    for (int i = 0; i < n_b; ++i) {
      axes.push_back(basis.axis_for(i));
      qubits.push_back(n_a + i);
    }
    rotate_measurement_frame(rotated, axes, qubits);
  }

  const Eigen::Index d_a = Eigen::Index{1} << n_a;
  const Eigen::Index d_b = Eigen::Index{1} << n_b;
  Eigen::Map<const CMatrix> amps(rotated.amplitudes().data(), d_a, d_b);

  ProjectedEnsemble ens;
  ens.n_a = n_a;
  ens.n_qubits = n;
  std::vector<Eigen::Index> kept;
  for (Eigen::Index b = 0; b < d_b; ++b) {
    const double w = amps.col(b).squaredNorm();
    if (w < cutoff) {
      ens.dropped_weight += w;
      continue;
    }
    kept.push_back(b);
    ens.weights.push_back(w);
    ens.outcomes.push_back(static_cast<std::uint64_t>(b));
    ens.outcome_charges.push_back(std::popcount(static_cast<std::uint64_t>(b)));
  }
  ens.states.resize(d_a, static_cast<Eigen::Index>(kept.size()));
  for (std::size_t c = 0; c < kept.size(); ++c) {
    ens.states.col(static_cast<Eigen::Index>(c)) = amps.col(kept[c]) / std::sqrt(ens.weights[c]);
  }
  return ens;
}

MomentOperator moment(const ProjectedEnsemble& ensemble, int k, std::size_t cap) {
  if (k < 1) throw std::invalid_argument("moment: k must be >= 1");
  const int d = ensemble.local_dim();
  const auto dim = static_cast<Eigen::Index>(replica_dimension(d, k, cap));
  MomentOperator out{d, k, CMatrix::Zero(dim, dim)};
  const auto m = static_cast<Eigen::Index>(ensemble.size());
  CMatrix block(dim, std::min(kChunk, std::max<Eigen::Index>(m, 1)));
  for (Eigen::Index start = 0; start < m; start += kChunk) {
    const Eigen::Index len = std::min(kChunk, m - start);
    for (Eigen::Index c = 0; c < len; ++c) {
      const auto w = std::sqrt(ensemble.weights[static_cast<std::size_t>(start + c)]);
      block.col(c) = w * tensor_power(ensemble.states.col(start + c), k);
    }
    out.matrix.selfadjointView<Eigen::Lower>().rankUpdate(block.leftCols(len));
  }
  out.matrix = CMatrix(out.matrix.selfadjointView<Eigen::Lower>());
  return out;
}

CMatrix symmetric_moment(const ProjectedEnsemble& ensemble, const SymmetricBasis& basis) {
  if (basis.local_dim() != ensemble.local_dim()) {
    throw std::invalid_argument("symmetric_moment: basis and ensemble dimensions differ");
  }
  const auto dim = static_cast<Eigen::Index>(basis.dimension());
  CMatrix acc = CMatrix::Zero(dim, dim);
  const auto m = static_cast<Eigen::Index>(ensemble.size());
  CMatrix block(dim, std::min(kChunk, std::max<Eigen::Index>(m, 1)));
  for (Eigen::Index start = 0; start < m; start += kChunk) {
    const Eigen::Index len = std::min(kChunk, m - start);
    for (Eigen::Index c = 0; c < len; ++c) {
      basis.embed(ensemble.states.col(start + c).data(), block.col(c).data());
      block.col(c) *= std::sqrt(ensemble.weights[static_cast<std::size_t>(start + c)]);
    }
    acc.selfadjointView<Eigen::Lower>().rankUpdate(block.leftCols(len));
  }
  return acc.selfadjointView<Eigen::Lower>();
}

CMatrix reduced_density_matrix(const StateVector& state, int n_a) {
  const int n = state.n_qubits();
  if (n_a < 0 || n_a > n) throw std::invalid_argument("reduced_density_matrix: N_A out of range");
  const Eigen::Index d_a = Eigen::Index{1} << n_a;
  const Eigen::Index d_b = Eigen::Index{1} << (n - n_a);
  Eigen::Map<const CMatrix> amps(state.amplitudes().data(), d_a, d_b);
  return amps * amps.adjoint();
}

double conditional_variance(const ProjectedEnsemble& ensemble, const CMatrix& observable) {
  const auto d = static_cast<Eigen::Index>(ensemble.local_dim());
  if (observable.rows() != d || observable.cols() != d) {
    throw std::invalid_argument("conditional_variance: observable dimension mismatch");
  }
  if (!observable.isApprox(observable.adjoint(), 1e-12)) {
    throw std::invalid_argument("conditional_variance: observable is not Hermitian");
  }
  double second = 0.0;
  double mean = 0.0;
  for (std::size_t b = 0; b < ensemble.size(); ++b) {
    const auto psi = ensemble.states.col(static_cast<Eigen::Index>(b));
    const double e = psi.dot(observable * psi).real();
    second += ensemble.weights[b] * e * e;
    mean += ensemble.weights[b] * e;
  }
  return second - mean * mean;
}

double conditional_variance_from_moments(const ProjectedEnsemble& ensemble,
                                         const CMatrix& observable) {
  const CMatrix rho1 = moment(ensemble, 1).matrix;
  const CMatrix rho2 = moment(ensemble, 2).matrix;
  const auto d = rho1.rows();
  if (observable.rows() != d || observable.cols() != d) {
    throw std::invalid_argument("conditional_variance_from_moments: dimension mismatch");
  }
  CMatrix oo(d * d, d * d);
  CMatrix rr(d * d, d * d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      oo.block(i * d, j * d, d, d) = observable(i, j) * observable;
      rr.block(i * d, j * d, d, d) = rho1(i, j) * rho1;
    }
  }
  return ((rho2 - rr) * oo).trace().real();
}

}  // namespace deeptherm
