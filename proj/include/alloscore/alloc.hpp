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

// The resource allocation problem
//
//   minimize  sum_i L * E[(Y_i - x_i)+]   subject to  x >= 0, sum_i x_i = K.
//
// Its solution allocates the quantile of every marginal at one shared
// probability level, the level at which those quantiles sum to K. The solver
// finds that level by bisection.

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "alloscore/dist.hpp"

namespace alloscore {

/// Location-labelled marginal forecasts.
class MultiForecast {
 public:
  MultiForecast(std::vector<std::string> locations, std::vector<MarginalDistribution> marginals);

  std::size_t size() const { return marginals_.size(); }
  std::span<const std::string> locations() const { return locations_; }
  std::span<const MarginalDistribution> marginals() const { return marginals_; }
  const MarginalDistribution& operator[](std::size_t i) const { return marginals_[i]; }

 private:
  std::vector<std::string> locations_;
  std::vector<MarginalDistribution> marginals_;
};

/// Realized need, aligned with a MultiForecast's locations.
class Outcome {
 public:
  explicit Outcome(std::vector<double> values);

  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double total() const;

 private:
  std::vector<double> values_;
};

struct Allocation {
  std::vector<double> amounts;
  double constraint = 0.0;
  /// Level at which the allocation was taken; unset for fixed benchmarks.
  std::optional<double> shared_level;

  double total() const;
};

struct LossParams {
  double per_unit_loss = 1.0;
};

struct SolverConfig {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  int max_iter = 200;
};

/// Validates an allocation against the constraint K; throws
/// InfeasibleAllocation on negative amounts or a sum off by more than 1e-6 K.
void check_feasible(const Allocation& x);

/// Per-location unmet need L * max(0, y_i - x_i).
std::vector<double> unmet_need(const Allocation& x, const Outcome& y, const LossParams& loss = {});

/// sum_i L * max(0, y_i - x_i).
double allocation_loss(const Allocation& x, const Outcome& y, const LossParams& loss = {});

/// sum_i L * E_{F_i}[(Y_i - x_i)+].
double expected_allocation_loss(const MultiForecast& f, const Allocation& x,
                                const LossParams& loss = {});

/// Bayes allocation of K units under forecast f.
Allocation solve_allocation(const MultiForecast& f, double k, const SolverConfig& cfg = {});

/// Loss of an allocator that knows y: L * max(0, sum(y) - K).
double oracle_loss(const Outcome& y, double k, const LossParams& loss = {});

}  // namespace alloscore
