// Copyright 2026 The alloscore Authors.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "alloscore/spline.hpp"

#include <algorithm>
#include <cmath>

#include "alloscore/errors.hpp"

namespace alloscore {

MonotoneCubicSpline::MonotoneCubicSpline(std::span<const double> x, std::span<const double> y)
    : x_(x.begin(), x.end()), y_(y.begin(), y.end()) {
  const std::size_t n = x_.size();
  if (n < 2 || y_.size() != n) {
    throw InvalidArgument("MonotoneCubicSpline: need at least two knots of matching length");
  }
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (!(x_[k] < x_[k + 1]) || !(y_[k] < y_[k + 1])) {
      throw InvalidArgument("MonotoneCubicSpline: knots must be strictly increasing");
    }
  }

  std::vector<double> secant(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    secant[k] = (y_[k + 1] - y_[k]) / (x_[k + 1] - x_[k]);
  }

  m_.resize(n);
  m_.front() = secant.front();
  m_.back() = secant.back();
  for (std::size_t k = 1; k + 1 < n; ++k) {
    m_[k] = 0.5 * (secant[k - 1] + secant[k]);
  }

  // Fritsch-Carlson limiter: keep (alpha, beta) inside the circle of radius 3.
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double alpha = m_[k] / secant[k];
    const double beta = m_[k + 1] / secant[k];
    const double r2 = alpha * alpha + beta * beta;
    if (r2 > 9.0) {
      const double tau = 3.0 / std::sqrt(r2);
      m_[k] = tau * alpha * secant[k];
      m_[k + 1] = tau * beta * secant[k];
    }
  }

  cumulative_.assign(n, 0.0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    cumulative_[k + 1] = cumulative_[k] + partial_integral(k, 1.0);
  }
}

std::size_t MonotoneCubicSpline::segment_for_x(double x) const {
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  std::size_t k = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
  return std::min(k, x_.size() - 2);
}

double MonotoneCubicSpline::eval_segment(std::size_t k, double t) const {
  const double h = x_[k + 1] - x_[k];
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1;
  const double h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2;
  const double h11 = t3 - t2;
  return h00 * y_[k] + h10 * h * m_[k] + h01 * y_[k + 1] + h11 * h * m_[k + 1];
}

double MonotoneCubicSpline::partial_integral(std::size_t k, double t) const {
  const double h = x_[k + 1] - x_[k];
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double t4 = t3 * t;
  const double i00 = 0.5 * t4 - t3 + t;
  const double i10 = 0.25 * t4 - 2.0 / 3.0 * t3 + 0.5 * t2;
  const double i01 = -0.5 * t4 + t3;
  const double i11 = 0.25 * t4 - t3 / 3.0;
  return h * (i00 * y_[k] + i10 * h * m_[k] + i01 * y_[k + 1] + i11 * h * m_[k + 1]);
}

double MonotoneCubicSpline::operator()(double x) const {
  if (x <= x_.front()) return y_.front();
  if (x >= x_.back()) return y_.back();
  const std::size_t k = segment_for_x(x);
  if (x == x_[k]) return y_[k];
  return eval_segment(k, (x - x_[k]) / (x_[k + 1] - x_[k]));
}

double MonotoneCubicSpline::inverse(double y) const {
  if (y <= y_.front()) return x_.front();
  if (y >= y_.back()) return x_.back();
  auto it = std::upper_bound(y_.begin(), y_.end(), y);
  const std::size_t k = std::min(static_cast<std::size_t>(it - y_.begin()) - 1, y_.size() - 2);
  if (y == y_[k]) return x_[k];

  double lo = 0.0;
  double hi = 1.0;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (eval_segment(k, mid) < y) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return x_[k] + 0.5 * (lo + hi) * (x_[k + 1] - x_[k]);
}

double MonotoneCubicSpline::antiderivative(double x) const {
  const std::size_t k = segment_for_x(x);
  const double t = (x - x_[k]) / (x_[k + 1] - x_[k]);
  return cumulative_[k] + partial_integral(k, t);
}

double MonotoneCubicSpline::integral(double a, double b) const {
  a = std::clamp(a, x_.front(), x_.back());
  b = std::clamp(b, x_.front(), x_.back());
  return antiderivative(b) - antiderivative(a);
}

}  // namespace alloscore
