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

// Monte Carlo checks of the allocation score's behaviour as a scoring rule.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "alloscore/alloc.hpp"

namespace alloscore {

/// Counter-based uniform generator: uniform(i) is a pure function of
/// (seed, i), so draws do not depend on evaluation order or platform.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t bits(std::uint64_t counter) const;
  /// Uniform on the open interval (0, 1).
  double uniform(std::uint64_t counter) const;

 private:
  std::uint64_t seed_;
};

/// Sum in a fixed pairwise order, independent of how the values were produced.
double pairwise_sum(std::span<const double> values);

struct ProprietyResult {
  double mean_self = 0.0;
  double mean_other = 0.0;
  double se = 0.0;  // standard error of the paired difference
  std::size_t n_draws = 0;
  std::uint64_t seed = 0;
  bool consistent = true;  // mean_self <= mean_other + 3 se

  std::string verdict() const { return consistent ? "consistent" : "violated"; }
};

/// Draws Y ~ f by inverse transform and scores f and g on the same draws.
ProprietyResult mc_propriety(const MultiForecast& f, const MultiForecast& g, double k,
                             std::size_t n, std::uint64_t seed, const LossParams& loss = {},
                             const SolverConfig& cfg = {});

struct PosthocReport {
  double k = 0.0;
  std::vector<double> levels;
  Allocation true_allocation;
  Allocation reconstructed_allocation;
  double max_abs_allocation_gap = 0.0;
  double l1_allocation_gap = 0.0;
  /// True when the true shared level lies outside [levels.front(), levels.back()].
  bool level_in_extrapolated_tail = false;
  /// Exact E_F[loss] of each allocation.
  double expected_loss_true = 0.0;
  double expected_loss_reconstructed = 0.0;
  /// Monte Carlo scores: self = f's allocation, other = reconstruction's.
  ProprietyResult monte_carlo;
};

/// Compares f's Bayes allocation with that of the distribution rebuilt from
/// f's quantiles at `levels` (normal tails), and estimates both expected
/// allocation scores under f.
PosthocReport posthoc_impropriety_demo(const MultiForecast& f, double k, std::size_t n,
                                       std::uint64_t seed,
                                       const std::vector<double>& levels = hub_quantile_levels(),
                                       const LossParams& loss = {}, const SolverConfig& cfg = {});

/// Rebuilds every marginal of f from its quantiles at `levels`.
MultiForecast reconstruct_from_quantiles(const MultiForecast& f, const std::vector<double>& levels);

std::string to_json(const ProprietyResult& r);
std::string to_json(const PosthocReport& r);

}  // namespace alloscore
