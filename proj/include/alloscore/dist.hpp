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

// Univariate predictive distributions.
//
// A MarginalDistribution is an immutable value wrapping one of a few closed
// form families or a distribution reconstructed from a finite set of
// predictive quantiles. Everything the allocation solver and the scores need
// goes through four queries: cdf, quantile (generalized inverse, left
// continuous), upper_quantile (the same, parameterized by exceedance
// probability so that levels within 1e-16 of one stay representable) and
// expected_shortage, E[(Y - x)+].

#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "alloscore/spline.hpp"

namespace alloscore {

/// Probability level in [0, 1].
class ProbLevel {
 public:
  ProbLevel(double value);  // NOLINT: implicit on purpose, validates range.
  double value() const { return value_; }
  operator double() const { return value_; }  // NOLINT

 private:
  double value_;
};

/// Predictive quantiles: levels strictly ascending in (0, 1), values
/// non-decreasing, equal length.
class QuantileSet {
 public:
  QuantileSet(std::vector<double> levels, std::vector<double> values);

  std::span<const double> levels() const { return levels_; }
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return levels_.size(); }

  friend bool operator==(const QuantileSet&, const QuantileSet&) = default;

 private:
  std::vector<double> levels_;
  std::vector<double> values_;
};

/// The 23 levels used by the US COVID-19 Forecast Hub:
/// 0.01, 0.025, 0.05, 0.10, 0.15, ..., 0.90, 0.95, 0.975, 0.99.
std::vector<double> hub_quantile_levels();

struct PointMass {
  double location;
  double mass;
};

struct Exponential {
  double scale;
};

struct Normal {
  double mean;
  double sd;
};

struct LogNormal {
  double meanlog;
  double sdlog;
};

/// Normal location-scale fit used for the tails of a reconstruction.
struct NormalTail {
  double mean;
  double sd;
};

/// Mixture of point masses and a continuous part whose quantile function is
/// a monotone cubic spline between the extreme knots and a normal quantile
/// function beyond them. Built by from_quantiles().
class QuantileReconstructed {
 public:
  QuantileReconstructed(std::vector<PointMass> atoms, std::vector<double> continuous_levels,
                        std::vector<double> continuous_values);

  std::span<const PointMass> atoms() const { return atoms_; }
  double atom_mass() const { return atom_mass_; }
  const NormalTail& lower_tail() const { return lower_; }
  const NormalTail& upper_tail() const { return upper_; }
  const MonotoneCubicSpline& interior() const { return interior_; }

  double cdf(double x) const;
  double quantile(double tau) const;
  double upper_quantile(double u) const;
  double expected_shortage(double x) const;
  double mean() const;

 private:
  // Continuous component.
  double cont_cdf(double x) const;
  double cont_quantile(double p) const;
  double cont_shortage(double x) const;
  double cont_mean() const;

  std::vector<PointMass> atoms_;  // sorted by location
  double atom_mass_ = 0.0;
  MonotoneCubicSpline interior_;  // level -> value
  NormalTail lower_{};
  NormalTail upper_{};
};

class MarginalDistribution {
 public:
  using Kind = std::variant<Exponential, Normal, LogNormal, QuantileReconstructed>;

  static MarginalDistribution exponential(double scale);
  static MarginalDistribution normal(double mean, double sd);
  static MarginalDistribution lognormal(double meanlog, double sdlog);

  /// P(Y <= x).
  double cdf(double x) const;

  /// inf{x : cdf(x) >= tau}. tau = 0 gives the infimum of the support
  /// (possibly -inf); tau = 1 throws UnboundedQuantile.
  double quantile(ProbLevel tau) const;

  /// quantile(1 - u), computed without forming 1 - u. u in (0, 1].
  double upper_quantile(double u) const;

  /// E[(Y - x)+]. Throws NonIntegrable if the result is not finite.
  double expected_shortage(double x) const;

  double mean() const;

  /// Point masses of the distribution; empty for the closed-form families.
  std::span<const PointMass> point_masses() const;

  const Kind& kind() const { return kind_; }
  std::string describe() const;

 private:
  friend MarginalDistribution from_quantiles(const QuantileSet& q);
  explicit MarginalDistribution(Kind kind) : kind_(std::move(kind)) {}

  Kind kind_;
};

/// Reconstructs a full distribution from predictive quantiles.
///
/// Runs of two or more equal values become point masses carrying the span of
/// their levels; the remaining knots are re-expressed on the continuous
/// part's own probability scale. The continuous quantile function is a
/// monotone cubic spline between the extreme knots, extended by normal
/// quantile functions matched to the two lowest and two highest knots.
/// Throws DegenerateTail if fewer than two distinct values remain.
MarginalDistribution from_quantiles(const QuantileSet& q);

namespace stdnormal {

double pdf(double z);
double cdf(double z);
/// 1 - cdf(z) without cancellation.
double sf(double z);
double quantile(double p);

}  // namespace stdnormal

}  // namespace alloscore
