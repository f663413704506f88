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

#include "deeptherm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace deeptherm {

namespace {

struct Line {
  double slope = 0.0;
  double intercept = 0.0;
  double rms = 0.0;
};

Line least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit: all x values are equal");
  Line line;
  line.slope = sxy / sxx;
  line.intercept = my - line.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (line.intercept + line.slope * x[i]);
    ss += r * r;
  }
  line.rms = std::sqrt(ss / n);
  return line;
}

void check_fit_input(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit: x and y differ in length");
  if (x.size() < 2) throw std::invalid_argument("fit: need at least two points");
  for (double v : y) {
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("fit: y must be positive");
  }
}

}  // namespace

double trace_distance(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols()) {
    throw std::invalid_argument("trace_distance: dimension mismatch (" +
                                std::to_string(a.rows()) + " vs " + std::to_string(b.rows()) + ")");
  }
  const CMatrix diff = a - b;
  const double asym = (diff - diff.adjoint()).cwiseAbs().maxCoeff() / 2.0;
  const double asym_a = (a - a.adjoint()).cwiseAbs().maxCoeff() / 2.0;
  const double asym_b = (b - b.adjoint()).cwiseAbs().maxCoeff() / 2.0;
  if (std::max({asym, asym_a, asym_b}) > 1e-8) {
    throw std::invalid_argument("trace_distance: input is not Hermitian");
  }
  const CMatrix herm = (diff + diff.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(herm, Eigen::EigenvaluesOnly);
  return 0.5 * eig.eigenvalues().cwiseAbs().sum();
}

double trace_distance(const MomentOperator& a, const MomentOperator& b) {
  if (a.local_dim != b.local_dim || a.k != b.k) {
    throw std::invalid_argument("trace_distance: moment operators of different shape");
  }
  return trace_distance(a.matrix, b.matrix);
}

void TimeSeries::validate() const {
  if (times.size() != values.size()) throw std::invalid_argument("TimeSeries: size mismatch");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (i > 0 && times[i] <= times[i - 1]) {
      throw std::invalid_argument("TimeSeries: times must strictly increase");
    }
    if (!(values[i] >= 0.0)) throw std::invalid_argument("TimeSeries: negative value");
  }
}

TimeWindow default_plateau_window(int t_max) {
  if (t_max < 0) throw std::invalid_argument("default_plateau_window: negative t_max");
  return {t_max - t_max / 3, t_max};
}

Plateau plateau_average(const TimeSeries& series, const TimeWindow& window, int min_points) {
  series.validate();
  if (window.t_end < window.t_begin) throw std::invalid_argument("plateau_average: empty window");
  std::vector<double> inside;
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    if (series.times[i] >= window.t_begin && series.times[i] <= window.t_end) {
      inside.push_back(series.values[i]);
    }
  }
  if (static_cast<int>(inside.size()) < std::max(min_points, 1)) {
    throw std::invalid_argument("plateau_average: window [" + std::to_string(window.t_begin) +
                                ", " + std::to_string(window.t_end) + "] holds " +
                                std::to_string(inside.size()) + " points, need " +
                                std::to_string(std::max(min_points, 1)));
  }
  Plateau p;
  p.points = static_cast<int>(inside.size());
  for (double v : inside) p.mean += v;
  p.mean /= p.points;
  if (p.points > 1) {
    double ss = 0.0;
    for (double v : inside) ss += (v - p.mean) * (v - p.mean);
    p.spread = std::sqrt(ss / (p.points - 1));
  }
  return p;
}

ExponentialFit exponential_fit(std::span<const double> x, std::span<const double> y) {
  check_fit_input(x, y);
  std::vector<double> lx(x.begin(), x.end());
  std::vector<double> ly;
  for (double v : y) ly.push_back(std::log2(v));
  const Line line = least_squares(lx, ly);
  return {-line.slope, std::exp2(line.intercept), line.rms};
}

PowerFit power_fit(std::span<const double> x, std::span<const double> y) {
  check_fit_input(x, y);
  std::vector<double> lx, ly;
  for (double v : x) {
    if (!(v > 0.0)) throw std::invalid_argument("power_fit: x must be positive");
    lx.push_back(std::log2(v));
  }
  for (double v : y) ly.push_back(std::log2(v));
  const Line line = least_squares(lx, ly);
  return {line.slope, std::exp2(line.intercept), line.rms};
}

}  // namespace deeptherm
