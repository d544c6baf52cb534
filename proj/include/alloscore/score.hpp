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

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "alloscore/alloc.hpp"
#include "alloscore/dist.hpp"

namespace alloscore {

struct LocationOutcome {
  std::string location;
  double allocated = 0.0;
  double observed = 0.0;
  double unmet = 0.0;

  friend bool operator==(const LocationOutcome&, const LocationOutcome&) = default;
};

/// Scores of one allocation against one outcome. allocation_score is the
/// avoidable part of the loss: raw_score - oracle_loss, never negative.
struct ScoreReport {
  double raw_score = 0.0;
  double oracle_loss = 0.0;
  double allocation_score = 0.0;
  std::optional<double> shared_level;
  std::vector<LocationOutcome> per_location;
  double k = 0.0;
  double loss = 1.0;

  friend bool operator==(const ScoreReport&, const ScoreReport&) = default;
};

/// Allocation score of forecast f: solve, then score the Bayes allocation.
ScoreReport allocation_score(const MultiForecast& f, const Outcome& y, double k,
                             const LossParams& loss = {}, const SolverConfig& cfg = {});

/// Scores an allocation that did not come from a forecast (benchmarks).
/// Locations are optional labels for the per-location breakdown.
ScoreReport score_fixed_allocation(const Allocation& x, const Outcome& y, double k,
                                   const LossParams& loss = {},
                                   const std::vector<std::string>& locations = {});

// --- integrated allocation score -------------------------------------------

struct UniformWeight {
  double k_min;
  double k_max;
};

/// Normal density centred at `center`, truncated to [lower, upper].
struct TruncNormalWeight {
  double center;
  double sd;
  double lower;
  double upper;
};

struct PointMassWeight {
  double k;
};

struct WeightSpec {
  std::variant<UniformWeight, TruncNormalWeight, PointMassWeight> kind;
  double grid_step = 200.0;
};

struct WeightedK {
  double k;
  double weight;
};

/// Grid of K values with weights summing to one.
std::vector<WeightedK> weight_grid(const WeightSpec& w);

/// Weighted mean of allocation scores over weight_grid(w).
double integrated_allocation_score(const MultiForecast& f, const Outcome& y, const WeightSpec& w,
                                   const LossParams& loss = {}, const SolverConfig& cfg = {});

// --- quantile scores -------------------------------------------------------

/// Pinball loss 2 * (1{y <= q} - tau) * (q - y).
double quantile_score(double q, double tau, double y);

/// Equal-weight mean of quantile scores over the supplied levels.
double wis(const QuantileSet& q, double y);

/// Mean of per-location WIS.
double mean_wis(const std::vector<QuantileSet>& forecasts, const Outcome& y);

struct WisComponents {
  double dispersion = 0.0;
  double underprediction = 0.0;
  double overprediction = 0.0;

  double total() const { return dispersion + underprediction + overprediction; }
};

/// Splits wis(q, y) into interval width and the two miss penalties. The
/// levels must pair up as tau and 1 - tau, with an optional median.
WisComponents wis_decomposition(const QuantileSet& q, double y);

// --- ranks -----------------------------------------------------------------

struct RankEntry {
  std::string model;
  double score = 0.0;
  double standardized_rank = 0.0;

  friend bool operator==(const RankEntry&, const RankEntry&) = default;
};

struct RankTable {
  std::vector<RankEntry> entries;

  friend bool operator==(const RankTable&, const RankTable&) = default;
};

/// Lower score is better. Best maps to 1, worst to 0; ties share the better
/// rank. Entries keep their input order.
RankTable standardized_ranks(const std::vector<std::pair<std::string, double>>& scores);

}  // namespace alloscore
