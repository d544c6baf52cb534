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

#include "alloscore/score.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "alloscore/errors.hpp"

namespace alloscore {

namespace {

ScoreReport make_report(const Allocation& x, const Outcome& y, double k, const LossParams& loss,
                        std::span<const std::string> locations) {
  if (!locations.empty() && locations.size() != x.amounts.size()) {
    throw DimensionMismatch("location labels do not match allocation length");
  }
  ScoreReport r;
  r.k = k;
  r.loss = loss.per_unit_loss;
  r.shared_level = x.shared_level;
  r.raw_score = allocation_loss(x, y, loss);
  r.oracle_loss = oracle_loss(y, k, loss);

  // For a feasible x the raw loss is bounded below by the oracle's; a
  // shortfall can only come from rounding or the 1e-6 K slack on sum(x).
  if (r.raw_score < r.oracle_loss) {
    const double slack = loss.per_unit_loss * (std::max(0.0, x.total() - k) +
                                               1e-12 * (k + y.total()));
    if (r.oracle_loss - r.raw_score > slack) {
      throw ComputeError("raw loss below oracle loss; allocation is not feasible for K");
    }
    r.raw_score = r.oracle_loss;
  }
  r.allocation_score = r.raw_score - r.oracle_loss;

  r.per_location.reserve(x.amounts.size());
  for (std::size_t i = 0; i < x.amounts.size(); ++i) {
    const double obs = y.values()[i];
    r.per_location.push_back({locations.empty() ? std::to_string(i) : locations[i], x.amounts[i],
                              obs, std::max(0.0, obs - x.amounts[i])});
  }
  return r;
}

std::size_t grid_size(double lo, double hi, double step) {
  return static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
}

}  // namespace

ScoreReport allocation_score(const MultiForecast& f, const Outcome& y, double k,
                             const LossParams& loss, const SolverConfig& cfg) {
  if (f.size() != y.size()) {
    throw DimensionMismatch("forecast has " + std::to_string(f.size()) + " locations, outcome has " +
                            std::to_string(y.size()));
  }
  const Allocation x = solve_allocation(f, k, cfg);
  return make_report(x, y, k, loss, f.locations());
}

ScoreReport score_fixed_allocation(const Allocation& x, const Outcome& y, double k,
                                   const LossParams& loss,
                                   const std::vector<std::string>& locations) {
  if (std::abs(x.constraint - k) > 1e-12 * k) {
    throw InfeasibleAllocation("allocation was built for a different constraint");
  }
  check_feasible(x);
  Allocation fixed = x;
  fixed.shared_level.reset();
  return make_report(fixed, y, k, loss, locations);
}

std::vector<WeightedK> weight_grid(const WeightSpec& w) {
  if (!(w.grid_step > 0.0)) throw InvalidArgument("weight grid step must be positive");
  std::vector<WeightedK> grid;
  if (const auto* pm = std::get_if<PointMassWeight>(&w.kind)) {
    if (!(pm->k > 0.0)) throw InvalidArgument("point-mass weight needs K > 0");
    grid.push_back({pm->k, 1.0});
    return grid;
  }
  if (const auto* u = std::get_if<UniformWeight>(&w.kind)) {
    if (!(u->k_min > 0.0) || !(u->k_min < u->k_max)) {
      throw InvalidArgument("uniform weight needs 0 < k_min < k_max");
    }
    const std::size_t n = grid_size(u->k_min, u->k_max, w.grid_step);
    for (std::size_t g = 0; g < n; ++g) {
      grid.push_back({u->k_min + static_cast<double>(g) * w.grid_step, 1.0 / static_cast<double>(n)});
    }
    return grid;
  }
  const auto& t = std::get<TruncNormalWeight>(w.kind);
  if (!(t.sd > 0.0) || !(t.lower > 0.0) || !(t.lower < t.upper)) {
    throw InvalidArgument("truncated-normal weight needs sd > 0 and 0 < lower < upper");
  }
  const std::size_t n = grid_size(t.lower, t.upper, w.grid_step);
  double total = 0.0;
  for (std::size_t g = 0; g < n; ++g) {
    const double k = t.lower + static_cast<double>(g) * w.grid_step;
    const double z = (k - t.center) / t.sd;
    const double density = std::exp(-0.5 * z * z);
    grid.push_back({k, density});
    total += density;
  }
  if (!(total > 0.0)) throw InvalidArgument("truncated-normal weight has no mass on the grid");
  for (auto& g : grid) g.weight /= total;
  return grid;
}

double integrated_allocation_score(const MultiForecast& f, const Outcome& y, const WeightSpec& w,
                                   const LossParams& loss, const SolverConfig& cfg) {
  double ias = 0.0;
  for (const auto& [k, weight] : weight_grid(w)) {
    ias += weight * allocation_score(f, y, k, loss, cfg).allocation_score;
  }
  return ias;
}

double quantile_score(double q, double tau, double y) {
  return 2.0 * ((y <= q ? 1.0 : 0.0) - tau) * (q - y);
}

double wis(const QuantileSet& q, double y) {
  double total = 0.0;
  for (std::size_t k = 0; k < q.size(); ++k) total += quantile_score(q.values()[k], q.levels()[k], y);
  return total / static_cast<double>(q.size());
}

double mean_wis(const std::vector<QuantileSet>& forecasts, const Outcome& y) {
  if (forecasts.size() != y.size()) {
    throw DimensionMismatch("mean_wis: " + std::to_string(forecasts.size()) +
                            " forecasts for " + std::to_string(y.size()) + " outcomes");
  }
  if (forecasts.empty()) throw InvalidArgument("mean_wis: no locations");
  double total = 0.0;
  for (std::size_t i = 0; i < forecasts.size(); ++i) total += wis(forecasts[i], y.values()[i]);
  return total / static_cast<double>(forecasts.size());
}

WisComponents wis_decomposition(const QuantileSet& q, double y) {
  const auto levels = q.levels();
  const auto values = q.values();
  const std::size_t n = q.size();
  constexpr double kTol = 1e-9;

  WisComponents c;
  for (std::size_t k = 0; k < n / 2; ++k) {
    const std::size_t j = n - 1 - k;
    if (std::abs(levels[k] + levels[j] - 1.0) > kTol) {
      throw AsymmetricLevels("levels " + std::to_string(levels[k]) + " and " +
                             std::to_string(levels[j]) + " do not form a central interval");
    }
    const double lower = values[k];
    const double upper = values[j];
    const double over = 2.0 * std::max(0.0, lower - y);
    const double under = 2.0 * std::max(0.0, y - upper);
    const double pair = quantile_score(lower, levels[k], y) + quantile_score(upper, levels[j], y);
    c.overprediction += over;
    c.underprediction += under;
    c.dispersion += pair - over - under;
  }
  if (n % 2 == 1) {
    const std::size_t mid = n / 2;
    if (std::abs(levels[mid] - 0.5) > kTol) {
      throw AsymmetricLevels("unpaired level " + std::to_string(levels[mid]) + " is not the median");
    }
    c.overprediction += std::max(0.0, values[mid] - y);
    c.underprediction += std::max(0.0, y - values[mid]);
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  c.dispersion = std::max(0.0, c.dispersion) * inv_n;
  c.overprediction *= inv_n;
  c.underprediction *= inv_n;
  return c;
}

RankTable standardized_ranks(const std::vector<std::pair<std::string, double>>& scores) {
  RankTable table;
  const std::size_t m = scores.size();
  table.entries.reserve(m);
  for (const auto& [model, score] : scores) {
    if (std::isnan(score)) throw InvalidArgument("standardized_ranks: NaN score for " + model);
  }
  for (const auto& [model, score] : scores) {
    std::size_t better = 0;
    for (const auto& other : scores) {
      if (other.second < score) ++better;
    }
    const double rank = m == 1 ? 1.0
                               : static_cast<double>(m - 1 - better) / static_cast<double>(m - 1);
    table.entries.push_back({model, score, rank});
  }
  return table;
}

}  // namespace alloscore
