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

#include "alloscore/lab.hpp"

#include <algorithm>
#include <cmath>

#include "alloscore/errors.hpp"
#include "json.hpp"

namespace alloscore {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Avoidable loss of a fixed allocation; rounding below the oracle bound is
// reported as zero.
double avoidable_loss(const Allocation& x, const Outcome& y, double k, const LossParams& loss) {
  return std::max(0.0, allocation_loss(x, y, loss) - oracle_loss(y, k, loss));
}

struct PairedScores {
  std::vector<double> self;
  std::vector<double> other;
};

PairedScores score_draws(const MultiForecast& f, const Allocation& x_self,
                         const Allocation& x_other, double k, std::size_t n, std::uint64_t seed,
                         const LossParams& loss) {
  const CounterRng rng(seed);
  const std::size_t dim = f.size();
  PairedScores s;
  s.self.resize(n);
  s.other.resize(n);
  std::vector<double> draw(dim);
  for (std::size_t d = 0; d < n; ++d) {
    for (std::size_t i = 0; i < dim; ++i) {
      draw[i] = f[i].quantile(rng.uniform(static_cast<std::uint64_t>(d * dim + i)));
    }
    const Outcome y(draw);
    s.self[d] = avoidable_loss(x_self, y, k, loss);
    s.other[d] = avoidable_loss(x_other, y, k, loss);
  }
  return s;
}

ProprietyResult summarize(const PairedScores& s, std::uint64_t seed) {
  const std::size_t n = s.self.size();
  ProprietyResult r;
  r.n_draws = n;
  r.seed = seed;
  if (n == 0) return r;
  const double inv_n = 1.0 / static_cast<double>(n);
  r.mean_self = pairwise_sum(s.self) * inv_n;
  r.mean_other = pairwise_sum(s.other) * inv_n;

  std::vector<double> diff(n);
  for (std::size_t d = 0; d < n; ++d) diff[d] = s.self[d] - s.other[d];
  const double mean_diff = pairwise_sum(diff) * inv_n;
  if (n > 1) {
    for (double& v : diff) v = (v - mean_diff) * (v - mean_diff);
    const double var = pairwise_sum(diff) / static_cast<double>(n - 1);
    r.se = std::sqrt(var * inv_n);
  }
  r.consistent = r.mean_self <= r.mean_other + 3.0 * r.se;
  return r;
}

nlohmann::ordered_json propriety_json(const ProprietyResult& r) {
  nlohmann::ordered_json j;
  j["mean_self"] = r.mean_self;
  j["mean_other"] = r.mean_other;
  j["se"] = r.se;
  j["n_draws"] = r.n_draws;
  j["seed"] = r.seed;
  j["verdict"] = r.verdict();
  return j;
}

nlohmann::ordered_json allocation_json(const Allocation& x) {
  nlohmann::ordered_json j;
  j["K"] = x.constraint;
  j["amounts"] = x.amounts;
  j["shared_level"] = x.shared_level ? nlohmann::ordered_json(*x.shared_level)
                                     : nlohmann::ordered_json(nullptr);
  return j;
}

}  // namespace

std::uint64_t CounterRng::bits(std::uint64_t counter) const {
  return splitmix64(splitmix64(seed_) ^ splitmix64(counter ^ 0x5851F42D4C957F2DULL));
}

double CounterRng::uniform(std::uint64_t counter) const {
  // 53 random bits, centred in their cell so 0 and 1 never occur.
  return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

ProprietyResult mc_propriety(const MultiForecast& f, const MultiForecast& g, double k,
                             std::size_t n, std::uint64_t seed, const LossParams& loss,
                             const SolverConfig& cfg) {
  if (f.size() != g.size()) throw DimensionMismatch("mc_propriety: forecasts differ in size");
  const Allocation x_f = solve_allocation(f, k, cfg);
  const Allocation x_g = solve_allocation(g, k, cfg);
  return summarize(score_draws(f, x_f, x_g, k, n, seed, loss), seed);
}

MultiForecast reconstruct_from_quantiles(const MultiForecast& f, const std::vector<double>& levels) {
  std::vector<MarginalDistribution> rebuilt;
  rebuilt.reserve(f.size());
  for (const auto& m : f.marginals()) {
    std::vector<double> values;
    values.reserve(levels.size());
    for (double tau : levels) values.push_back(m.quantile(tau));
    rebuilt.push_back(from_quantiles(QuantileSet(levels, std::move(values))));
  }
  return MultiForecast({f.locations().begin(), f.locations().end()}, std::move(rebuilt));
}

PosthocReport posthoc_impropriety_demo(const MultiForecast& f, double k, std::size_t n,
                                       std::uint64_t seed, const std::vector<double>& levels,
                                       const LossParams& loss, const SolverConfig& cfg) {
  const MultiForecast g = reconstruct_from_quantiles(f, levels);
  PosthocReport r;
  r.k = k;
  r.levels = levels;
  r.true_allocation = solve_allocation(f, k, cfg);
  r.reconstructed_allocation = solve_allocation(g, k, cfg);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double gap =
        std::abs(r.true_allocation.amounts[i] - r.reconstructed_allocation.amounts[i]);
    r.max_abs_allocation_gap = std::max(r.max_abs_allocation_gap, gap);
    r.l1_allocation_gap += gap;
  }
  const double tau = r.true_allocation.shared_level.value_or(0.5);
  r.level_in_extrapolated_tail = tau < levels.front() || tau > levels.back();
  r.expected_loss_true = expected_allocation_loss(f, r.true_allocation, loss);
  r.expected_loss_reconstructed = expected_allocation_loss(f, r.reconstructed_allocation, loss);
  r.monte_carlo = summarize(
      score_draws(f, r.true_allocation, r.reconstructed_allocation, k, n, seed, loss), seed);
  return r;
}

std::string to_json(const ProprietyResult& r) { return propriety_json(r).dump(2); }

std::string to_json(const PosthocReport& r) {
  nlohmann::ordered_json j;
  j["K"] = r.k;
  j["levels"] = r.levels;
  j["true_allocation"] = allocation_json(r.true_allocation);
  j["reconstructed_allocation"] = allocation_json(r.reconstructed_allocation);
  j["max_abs_allocation_gap"] = r.max_abs_allocation_gap;
  j["l1_allocation_gap"] = r.l1_allocation_gap;
  j["level_in_extrapolated_tail"] = r.level_in_extrapolated_tail;
  j["expected_loss_true"] = r.expected_loss_true;
  j["expected_loss_reconstructed"] = r.expected_loss_reconstructed;
  j["monte_carlo"] = propriety_json(r.monte_carlo);
  return j.dump(2);
}

}  // namespace alloscore
