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

#include "alloscore/alloc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "alloscore/errors.hpp"

namespace alloscore {

MultiForecast::MultiForecast(std::vector<std::string> locations,
                             std::vector<MarginalDistribution> marginals)
    : locations_(std::move(locations)), marginals_(std::move(marginals)) {
  if (locations_.size() != marginals_.size()) {
    throw DimensionMismatch("MultiForecast: " + std::to_string(locations_.size()) +
                            " locations but " + std::to_string(marginals_.size()) + " marginals");
  }
  if (marginals_.empty()) throw InvalidArgument("MultiForecast: no locations");
  std::set<std::string> seen;
  for (const auto& loc : locations_) {
    if (!seen.insert(loc).second) throw InvalidArgument("MultiForecast: duplicate location " + loc);
  }
}

Outcome::Outcome(std::vector<double> values) : values_(std::move(values)) {
  for (double v : values_) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw InvalidArgument("Outcome: values must be finite and non-negative");
    }
  }
}

double Outcome::total() const { return std::accumulate(values_.begin(), values_.end(), 0.0); }

double Allocation::total() const { return std::accumulate(amounts.begin(), amounts.end(), 0.0); }

void check_feasible(const Allocation& x) {
  if (!(x.constraint > 0.0) || !std::isfinite(x.constraint)) {
    throw InfeasibleAllocation("resource constraint must be positive and finite");
  }
  for (double a : x.amounts) {
    if (!(a >= 0.0) || !std::isfinite(a)) {
      throw InfeasibleAllocation("allocation has a negative or non-finite amount");
    }
  }
  if (std::abs(x.total() - x.constraint) > 1e-6 * x.constraint) {
    throw InfeasibleAllocation("allocation sums to " + std::to_string(x.total()) + ", expected " +
                               std::to_string(x.constraint));
  }
}

namespace {

void check_aligned(std::size_t n_alloc, std::size_t n_other, const char* what) {
  if (n_alloc != n_other) {
    throw DimensionMismatch(std::string(what) + ": allocation has " + std::to_string(n_alloc) +
                            " locations, other side has " + std::to_string(n_other));
  }
}

void check_loss(const LossParams& loss) {
  if (!(loss.per_unit_loss > 0.0) || !std::isfinite(loss.per_unit_loss)) {
    throw InvalidArgument("per-unit loss must be positive");
  }
}

// Clamped allocations at a shared level, either parameterized by the level
// itself or by its exceedance probability.
class LevelEvaluator {
 public:
  explicit LevelEvaluator(const MultiForecast& f) : f_(f) {}

  double at_level(double tau, std::vector<double>& out) const {
    out.resize(f_.size());
    for (std::size_t i = 0; i < f_.size(); ++i) out[i] = std::max(0.0, f_[i].quantile(tau));
    return std::accumulate(out.begin(), out.end(), 0.0);
  }

  double at_exceedance(double u, std::vector<double>& out) const {
    out.resize(f_.size());
    for (std::size_t i = 0; i < f_.size(); ++i) out[i] = std::max(0.0, f_[i].upper_quantile(u));
    return std::accumulate(out.begin(), out.end(), 0.0);
  }

 private:
  const MultiForecast& f_;
};

// Bracket end: a level together with its clamped allocations.
struct Endpoint {
  double level = 0.0;
  double total = 0.0;
  std::vector<double> amounts;
};

// The bracket satisfies lo.total < K <= hi.total. Locations whose quantile
// moves between the two ends absorb K - lo.total in proportion to how far
// they move; this covers continuous marginals (tiny moves) and jumps across
// point masses or density gaps alike, and makes the sum exactly K.
Allocation finish(const Endpoint& lo, const Endpoint& hi, double k, double level_lo,
                  double level_hi) {
  const double gap = hi.total - lo.total;
  const double w = gap > 0.0 ? std::clamp((k - lo.total) / gap, 0.0, 1.0) : 1.0;
  Allocation x;
  x.constraint = k;
  x.amounts.resize(lo.amounts.size());
  for (std::size_t i = 0; i < x.amounts.size(); ++i) {
    x.amounts[i] = lo.amounts[i] + w * (hi.amounts[i] - lo.amounts[i]);
    if (!std::isfinite(x.amounts[i])) {
      throw UnboundedQuantile("allocation for location " + std::to_string(i) + " is not finite");
    }
  }
  x.shared_level = level_lo + w * (level_hi - level_lo);
  return x;
}

}  // namespace

std::vector<double> unmet_need(const Allocation& x, const Outcome& y, const LossParams& loss) {
  check_aligned(x.amounts.size(), y.size(), "unmet_need");
  check_loss(loss);
  std::vector<double> out(y.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = loss.per_unit_loss * std::max(0.0, y.values()[i] - x.amounts[i]);
  }
  return out;
}

double allocation_loss(const Allocation& x, const Outcome& y, const LossParams& loss) {
  const auto terms = unmet_need(x, y, loss);
  return std::accumulate(terms.begin(), terms.end(), 0.0);
}

double expected_allocation_loss(const MultiForecast& f, const Allocation& x,
                                const LossParams& loss) {
  check_aligned(x.amounts.size(), f.size(), "expected_allocation_loss");
  check_loss(loss);
  double total = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) total += f[i].expected_shortage(x.amounts[i]);
  return loss.per_unit_loss * total;
}

double oracle_loss(const Outcome& y, double k, const LossParams& loss) {
  if (!(k > 0.0) || !std::isfinite(k)) throw InvalidArgument("resource constraint must be positive");
  check_loss(loss);
  return loss.per_unit_loss * std::max(0.0, y.total() - k);
}

Allocation solve_allocation(const MultiForecast& f, double k, const SolverConfig& cfg) {
  if (!(k > 0.0) || !std::isfinite(k)) throw InvalidArgument("resource constraint must be positive");
  if (!(cfg.rel_tol > 0.0) || !(cfg.abs_tol > 0.0) || cfg.max_iter <= 0) {
    throw InvalidArgument("solver tolerances and iteration limit must be positive");
  }

  const LevelEvaluator eval(f);
  const double level_cap = std::nextafter(1.0, 0.0);
  int iter = 0;
  auto count = [&] {
    if (++iter > cfg.max_iter) {
      throw NoConvergence("allocation bisection did not converge in " +
                          std::to_string(cfg.max_iter) + " iterations");
    }
  };

  Endpoint lo;
  Endpoint hi;
  for (const auto& m : f.marginals()) hi.level = std::max(hi.level, m.cdf(k));
  hi.level = std::min(hi.level, level_cap);
  hi.total = eval.at_level(hi.level, hi.amounts);

  // Widen the bracket toward 1 while the upper end is still short of K.
  while (hi.total < k && hi.level <= 1.0 - 1e-12) {
    count();
    lo = hi;
    hi.level = std::min(0.5 * (1.0 + hi.level), level_cap);
    hi.total = eval.at_level(hi.level, hi.amounts);
  }

  if (hi.total >= k) {
    if (lo.amounts.empty()) lo.total = eval.at_level(lo.level, lo.amounts);
    while (!(hi.level < (1.0 + cfg.rel_tol) * lo.level) && !(hi.level - lo.level < cfg.abs_tol)) {
      count();
      Endpoint mid;
      mid.level = 0.5 * (lo.level + hi.level);
      mid.total = eval.at_level(mid.level, mid.amounts);
      (mid.total >= k ? hi : lo) = std::move(mid);
    }
    return finish(lo, hi, k, lo.level, hi.level);
  }

  // The root sits closer to 1 than doubles resolve; continue on the
  // exceedance probability u = 1 - tau with geometric bisection.
  Endpoint short_end;  // level holds u, total < K
  short_end.level = 1.0 - hi.level;
  short_end.total = eval.at_exceedance(short_end.level, short_end.amounts);
  Endpoint long_end;  // total >= K
  long_end.level = 1e-300;
  long_end.total = eval.at_exceedance(long_end.level, long_end.amounts);
  if (long_end.total < k) {
    throw InfeasibleConstraint("resource constraint " + std::to_string(k) +
                               " exceeds the total allocation the forecast supports");
  }
  while (!(short_end.level < (1.0 + cfg.rel_tol) * long_end.level)) {
    count();
    Endpoint mid;
    mid.level = std::sqrt(short_end.level) * std::sqrt(long_end.level);
    mid.total = eval.at_exceedance(mid.level, mid.amounts);
    (mid.total >= k ? long_end : short_end) = std::move(mid);
  }
  return finish(short_end, long_end, k, 1.0 - short_end.level, 1.0 - long_end.level);
}

}  // namespace alloscore
