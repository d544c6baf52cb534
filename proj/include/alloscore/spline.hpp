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

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace alloscore {

/// Monotone piecewise-cubic Hermite interpolant (Fritsch-Carlson).
///
/// Knots must be strictly increasing in both coordinates. The tangents are
/// limited so that every segment stays strictly increasing, which makes the
/// interpolant invertible on [y.front(), y.back()].
class MonotoneCubicSpline {
 public:
  MonotoneCubicSpline(std::span<const double> x, std::span<const double> y);

  double operator()(double x) const;

  /// Inverse map: the unique x in [x.front(), x.back()] with s(x) = y.
  /// Found by bisection within a single segment.
  double inverse(double y) const;

  /// Exact integral of the interpolant over [a, b], both inside the domain.
  double integral(double a, double b) const;

  double x_min() const { return x_.front(); }
  double x_max() const { return x_.back(); }
  double y_min() const { return y_.front(); }
  double y_max() const { return y_.back(); }

  std::span<const double> knots_x() const { return x_; }
  std::span<const double> knots_y() const { return y_; }
  std::span<const double> tangents() const { return m_; }

 private:
  std::size_t segment_for_x(double x) const;
  double eval_segment(std::size_t k, double t) const;
  // Integral from x_[k] to x_[k] + t * h_k.
  double partial_integral(std::size_t k, double t) const;
  double antiderivative(double x) const;

  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> m_;
  std::vector<double> cumulative_;  // integral from x_[0] to x_[k]
};

}  // namespace alloscore
