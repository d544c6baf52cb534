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

#include "alloscore/dist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/erf.hpp>

#include "alloscore/errors.hpp"

namespace alloscore {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// E[(Z - x)+] for Z ~ N(mean, sd).
double normal_shortage(double mean, double sd, double x) {
  const double z = (x - mean) / sd;
  return sd * (stdnormal::pdf(z) - z * stdnormal::sf(z));
}

NormalTail fit_tail(double p0, double v0, double p1, double v1) {
  const double z0 = stdnormal::quantile(p0);
  const double z1 = stdnormal::quantile(p1);
  const double sd = (v1 - v0) / (z1 - z0);
  if (!(sd > 0.0) || !std::isfinite(sd)) {
    throw DegenerateTail("normal tail fit has non-positive scale");
  }
  return {v0 - sd * z0, sd};
}

}  // namespace

// ---------------------------------------------------------------------------
// Standard normal.

namespace stdnormal {

double pdf(double z) {
  static const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  return kInvSqrt2Pi * std::exp(-0.5 * z * z);
}

double cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double sf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

double quantile(double p) {
  if (p <= 0.0) return -kInf;
  if (p >= 1.0) return kInf;
  if (p > 0.5) return std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * (1.0 - p));
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

}  // namespace stdnormal

// ---------------------------------------------------------------------------
// ProbLevel / QuantileSet.

ProbLevel::ProbLevel(double value) : value_(value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw InvalidArgument("probability level outside [0, 1]: " + std::to_string(value));
  }
}

QuantileSet::QuantileSet(std::vector<double> levels, std::vector<double> values)
    : levels_(std::move(levels)), values_(std::move(values)) {
  if (levels_.size() != values_.size()) {
    throw DimensionMismatch("QuantileSet: levels and values differ in length");
  }
  if (levels_.empty()) throw InvalidArgument("QuantileSet: empty");
  for (std::size_t k = 0; k < levels_.size(); ++k) {
    if (!(levels_[k] > 0.0 && levels_[k] < 1.0)) {
      throw InvalidArgument("QuantileSet: level outside (0, 1)");
    }
    if (!std::isfinite(values_[k])) throw InvalidArgument("QuantileSet: non-finite value");
    if (k > 0 && !(levels_[k - 1] < levels_[k])) {
      throw InvalidArgument("QuantileSet: levels not strictly ascending");
    }
    if (k > 0 && values_[k - 1] > values_[k]) {
      throw CrossedQuantiles("QuantileSet: values decrease with level");
    }
  }
}

std::vector<double> hub_quantile_levels() {
  std::vector<double> levels = {0.01, 0.025};
  for (int k = 1; k <= 19; ++k) levels.push_back(0.05 * k);
  levels.push_back(0.975);
  levels.push_back(0.99);
  // 0.05 * k is not always the nearest double to the decimal level.
  for (double& v : levels) v = std::round(v * 1000.0) / 1000.0;
  return levels;
}

// ---------------------------------------------------------------------------
// QuantileReconstructed.

QuantileReconstructed::QuantileReconstructed(std::vector<PointMass> atoms,
                                             std::vector<double> continuous_levels,
                                             std::vector<double> continuous_values)
    : atoms_(std::move(atoms)), interior_(continuous_levels, continuous_values) {
  for (std::size_t j = 0; j < atoms_.size(); ++j) {
    if (!(atoms_[j].mass > 0.0) || (j > 0 && !(atoms_[j - 1].location < atoms_[j].location))) {
      throw InvalidArgument("point masses must be positive and sorted by location");
    }
    atom_mass_ += atoms_[j].mass;
  }
  if (!(atom_mass_ < 1.0)) throw InvalidArgument("point masses sum to one or more");
  if (!(continuous_levels.front() > 0.0 && continuous_levels.back() < 1.0)) {
    throw InvalidArgument("continuous levels must lie in (0, 1)");
  }
  const std::size_t n = continuous_levels.size();
  lower_ = fit_tail(continuous_levels[0], continuous_values[0], continuous_levels[1],
                    continuous_values[1]);
  upper_ = fit_tail(continuous_levels[n - 2], continuous_values[n - 2], continuous_levels[n - 1],
                    continuous_values[n - 1]);
}

double QuantileReconstructed::cont_cdf(double x) const {
  if (x <= interior_.y_min()) {
    if (x == interior_.y_min()) return interior_.x_min();
    return stdnormal::cdf((x - lower_.mean) / lower_.sd);
  }
  if (x >= interior_.y_max()) {
    if (x == interior_.y_max()) return interior_.x_max();
    return stdnormal::cdf((x - upper_.mean) / upper_.sd);
  }
  return interior_.inverse(x);
}

double QuantileReconstructed::cont_quantile(double p) const {
  if (p < interior_.x_min()) return lower_.mean + lower_.sd * stdnormal::quantile(p);
  if (p > interior_.x_max()) return upper_.mean + upper_.sd * stdnormal::quantile(p);
  return interior_(p);
}

double QuantileReconstructed::cont_shortage(double x) const {
  const double p_lo = interior_.x_min();
  const double p_hi = interior_.x_max();
  if (x >= interior_.y_max()) return normal_shortage(upper_.mean, upper_.sd, x);

  // Integrate (Q(p) - x) over p >= cdf(x), piece by piece.
  double total = (upper_.mean - x) * (1.0 - p_hi) + upper_.sd * stdnormal::pdf(stdnormal::quantile(p_hi));
  if (x <= interior_.y_min()) {
    total += interior_.integral(p_lo, p_hi) - x * (p_hi - p_lo);
    const double z = (x - lower_.mean) / lower_.sd;
    const double p_star = stdnormal::cdf(z);
    total += (lower_.mean - x) * (p_lo - p_star) +
             lower_.sd * (stdnormal::pdf(z) - stdnormal::pdf(stdnormal::quantile(p_lo)));
  } else {
    const double p_star = interior_.inverse(x);
    total += interior_.integral(p_star, p_hi) - x * (p_hi - p_star);
  }
  return std::max(0.0, total);
}

double QuantileReconstructed::cont_mean() const {
  const double p_lo = interior_.x_min();
  const double p_hi = interior_.x_max();
  return lower_.mean * p_lo - lower_.sd * stdnormal::pdf(stdnormal::quantile(p_lo)) +
         interior_.integral(p_lo, p_hi) + upper_.mean * (1.0 - p_hi) +
         upper_.sd * stdnormal::pdf(stdnormal::quantile(p_hi));
}

double QuantileReconstructed::cdf(double x) const {
  double below = 0.0;
  for (const auto& a : atoms_) {
    if (a.location <= x) below += a.mass;
  }
  return std::min(1.0, below + (1.0 - atom_mass_) * cont_cdf(x));
}

double QuantileReconstructed::quantile(double tau) const {
  if (tau <= 0.0) return -kInf;
  const double cont_weight = 1.0 - atom_mass_;
  double below = 0.0;
  for (const auto& a : atoms_) {
    const double left_limit = below + cont_weight * cont_cdf(a.location);
    if (tau <= left_limit) break;
    if (tau <= left_limit + a.mass) return a.location;
    below += a.mass;
  }
  // Near 1 the continuous level rounds to 1; use its exceedance instead,
  // which 1 - tau gives exactly for tau >= 1/2.
  const double cont_u = ((1.0 - tau) - (atom_mass_ - below)) / cont_weight;
  if (tau > 0.5 && cont_u > 0.0 && cont_u < 1.0 - interior_.x_max()) {
    return upper_.mean - upper_.sd * stdnormal::quantile(cont_u);
  }
  const double p = std::clamp((tau - below) / cont_weight, 0.0, 1.0);
  return cont_quantile(p);
}

double QuantileReconstructed::upper_quantile(double u) const {
  const double cont_u = u / (1.0 - atom_mass_);
  if (cont_u < 1.0 - interior_.x_max()) {
    return upper_.mean - upper_.sd * stdnormal::quantile(cont_u);
  }
  return quantile(1.0 - u);
}

double QuantileReconstructed::expected_shortage(double x) const {
  double atoms_part = 0.0;
  for (const auto& a : atoms_) {
    if (a.location > x) atoms_part += a.mass * (a.location - x);
  }
  return atoms_part + (1.0 - atom_mass_) * cont_shortage(x);
}

double QuantileReconstructed::mean() const {
  double m = 0.0;
  for (const auto& a : atoms_) m += a.mass * a.location;
  return m + (1.0 - atom_mass_) * cont_mean();
}

// ---------------------------------------------------------------------------
// MarginalDistribution.

MarginalDistribution MarginalDistribution::exponential(double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw InvalidArgument("Exponential: scale must be > 0");
  return MarginalDistribution(Exponential{scale});
}

MarginalDistribution MarginalDistribution::normal(double mean, double sd) {
  if (!std::isfinite(mean) || !(sd > 0.0) || !std::isfinite(sd)) {
    throw InvalidArgument("Normal: need finite mean and sd > 0");
  }
  return MarginalDistribution(Normal{mean, sd});
}

MarginalDistribution MarginalDistribution::lognormal(double meanlog, double sdlog) {
  if (!std::isfinite(meanlog) || !(sdlog > 0.0) || !std::isfinite(sdlog)) {
    throw InvalidArgument("LogNormal: need finite meanlog and sdlog > 0");
  }
  return MarginalDistribution(LogNormal{meanlog, sdlog});
}

double MarginalDistribution::cdf(double x) const {
  return std::visit(
      Overloaded{
          [x](const Exponential& d) { return x <= 0.0 ? 0.0 : -std::expm1(-x / d.scale); },
          [x](const Normal& d) { return stdnormal::cdf((x - d.mean) / d.sd); },
          [x](const LogNormal& d) {
            return x <= 0.0 ? 0.0 : stdnormal::cdf((std::log(x) - d.meanlog) / d.sdlog);
          },
          [x](const QuantileReconstructed& d) { return d.cdf(x); },
      },
      kind_);
}

double MarginalDistribution::quantile(ProbLevel level) const {
  const double tau = level.value();
  if (tau == 1.0) throw UnboundedQuantile("quantile at level 1 of " + describe());
  return std::visit(
      Overloaded{
          [tau](const Exponential& d) { return -d.scale * std::log1p(-tau); },
          [tau](const Normal& d) { return d.mean + d.sd * stdnormal::quantile(tau); },
          [tau](const LogNormal& d) {
            return tau == 0.0 ? 0.0 : std::exp(d.meanlog + d.sdlog * stdnormal::quantile(tau));
          },
          [tau](const QuantileReconstructed& d) { return d.quantile(tau); },
      },
      kind_);
}

double MarginalDistribution::upper_quantile(double u) const {
  if (!(u > 0.0 && u <= 1.0)) {
    if (u == 0.0) throw UnboundedQuantile("quantile at level 1 of " + describe());
    throw InvalidArgument("upper_quantile: exceedance probability outside (0, 1]");
  }
  return std::visit(
      Overloaded{
          [u](const Exponential& d) { return -d.scale * std::log(u); },
          [u](const Normal& d) { return d.mean - d.sd * stdnormal::quantile(u); },
          [u](const LogNormal& d) {
            return u == 1.0 ? 0.0 : std::exp(d.meanlog - d.sdlog * stdnormal::quantile(u));
          },
          [u](const QuantileReconstructed& d) { return d.upper_quantile(u); },
      },
      kind_);
}

double MarginalDistribution::expected_shortage(double x) const {
  const double s = std::visit(
      Overloaded{
          [x](const Exponential& d) {
            return x <= 0.0 ? d.scale - x : d.scale * std::exp(-x / d.scale);
          },
          [x](const Normal& d) { return normal_shortage(d.mean, d.sd, x); },
          [x](const LogNormal& d) {
            const double m = std::exp(d.meanlog + 0.5 * d.sdlog * d.sdlog);
            if (x <= 0.0) return m - x;
            const double d2 = (d.meanlog - std::log(x)) / d.sdlog;
            return std::max(0.0, m * stdnormal::cdf(d2 + d.sdlog) - x * stdnormal::cdf(d2));
          },
          [x](const QuantileReconstructed& d) { return d.expected_shortage(x); },
      },
      kind_);
  if (!std::isfinite(s)) throw NonIntegrable("expected shortage is not finite for " + describe());
  return s;
}

double MarginalDistribution::mean() const {
  return std::visit(Overloaded{
                        [](const Exponential& d) { return d.scale; },
                        [](const Normal& d) { return d.mean; },
                        [](const LogNormal& d) {
                          return std::exp(d.meanlog + 0.5 * d.sdlog * d.sdlog);
                        },
                        [](const QuantileReconstructed& d) { return d.mean(); },
                    },
                    kind_);
}

std::span<const PointMass> MarginalDistribution::point_masses() const {
  if (const auto* r = std::get_if<QuantileReconstructed>(&kind_)) return r->atoms();
  return {};
}

std::string MarginalDistribution::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(Overloaded{
                 [&os](const Exponential& d) { os << "Exponential(scale=" << d.scale << ")"; },
                 [&os](const Normal& d) { os << "Normal(mean=" << d.mean << ", sd=" << d.sd << ")"; },
                 [&os](const LogNormal& d) {
                   os << "LogNormal(meanlog=" << d.meanlog << ", sdlog=" << d.sdlog << ")";
                 },
                 [&os](const QuantileReconstructed& d) {
                   os << "QuantileReconstructed(knots=" << d.interior().knots_x().size()
                      << ", point_masses=" << d.atoms().size() << ")";
                 },
             },
             kind_);
  return os.str();
}

// ---------------------------------------------------------------------------
// Reconstruction.

MarginalDistribution from_quantiles(const QuantileSet& q) {
  const auto levels = q.levels();
  const auto values = q.values();
  const std::size_t n = q.size();

  // Group runs of equal values.
  struct Run {
    std::size_t first;
    std::size_t last;
  };
  std::vector<Run> runs;
  for (std::size_t k = 0; k < n; ++k) {
    if (!runs.empty() && values[runs.back().last] == values[k]) {
      runs.back().last = k;
    } else {
      runs.push_back({k, k});
    }
  }
  if (runs.size() < 2) {
    throw DegenerateTail("all supplied quantiles are equal; no continuous part to fit");
  }

  std::vector<PointMass> atoms;
  double total_mass = 0.0;
  for (const auto& r : runs) {
    if (r.last > r.first) {
      const double mass = levels[r.last] - levels[r.first];
      atoms.push_back({values[r.first], mass});
      total_mass += mass;
    }
  }

  // Each run contributes one knot of the continuous part. Its level is the
  // run's first level with the mass of lower atoms removed, rescaled.
  std::vector<double> cont_levels;
  std::vector<double> cont_values;
  cont_levels.reserve(runs.size());
  cont_values.reserve(runs.size());
  double below = 0.0;
  for (const auto& r : runs) {
    cont_levels.push_back((levels[r.first] - below) / (1.0 - total_mass));
    cont_values.push_back(values[r.first]);
    if (r.last > r.first) below += levels[r.last] - levels[r.first];
  }

  return MarginalDistribution(
      QuantileReconstructed(std::move(atoms), std::move(cont_levels), std::move(cont_values)));
}

}  // namespace alloscore
