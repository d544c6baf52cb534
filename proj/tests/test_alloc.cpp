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

#include <cmath>
#include <functional>
#include <vector>

#include "alloscore/errors.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace alloscore;
using doctest::Approx;

namespace {

MultiForecast exps(std::vector<double> scales) {
  std::vector<std::string> locs;
  std::vector<MarginalDistribution> m;
  for (std::size_t i = 0; i < scales.size(); ++i) {
    locs.push_back("L" + std::to_string(i));
    m.push_back(MarginalDistribution::exponential(scales[i]));
  }
  return {locs, m};
}

Allocation fixed(std::vector<double> x, double k) { return {std::move(x), k, std::nullopt}; }

}  // namespace

TEST_CASE("two-location exponential allocations") {
  const auto f = exps({1.0, 4.0});
  const auto a5 = solve_allocation(f, 5.0);
  CHECK(a5.amounts[0] == Approx(1.0).epsilon(1e-9));
  CHECK(a5.amounts[1] == Approx(4.0).epsilon(1e-9));
  REQUIRE(a5.shared_level);
  CHECK(*a5.shared_level == Approx(1.0 - std::exp(-1.0)).epsilon(1e-8));
  const auto a10 = solve_allocation(f, 10.0);
  CHECK(a10.amounts[0] == Approx(2.0).epsilon(1e-9));
  CHECK(a10.amounts[1] == Approx(8.0).epsilon(1e-9));
}

TEST_CASE("doubled scales give the same allocation") {
  const auto a = solve_allocation(exps({1.0, 4.0}), 10.0);
  const auto b = solve_allocation(exps({2.0, 8.0}), 10.0);
  CHECK(b.amounts[0] == Approx(2.0).epsilon(1e-9));
  CHECK(b.amounts[1] == Approx(8.0).epsilon(1e-9));
  CHECK(std::abs(a.amounts[0] - b.amounts[0]) < 1e-9);
}

TEST_CASE("identical marginals split evenly") {
  const auto a = solve_allocation(exps({3.0, 3.0, 3.0, 3.0}), 12.0);
  for (double x : a.amounts) CHECK(x == Approx(3.0).epsilon(1e-9));
}

TEST_CASE("allocation loss and oracle examples") {
  const Outcome y({1.0, 10.0});
  CHECK(allocation_loss(fixed({1.0, 4.0}, 5.0), y) == 6.0);
  CHECK(allocation_loss(fixed({2.0, 8.0}, 10.0), y) == 2.0);
  CHECK(allocation_loss(fixed({1.0, 10.0}, 11.0), y) == 0.0);
  CHECK(allocation_loss(fixed({1.0, 4.0}, 5.0), y, LossParams{2.5}) == 15.0);
  CHECK(oracle_loss(y, 5.0) == 6.0);
  CHECK(oracle_loss(y, 10.0) == 1.0);
  CHECK(oracle_loss(y, 20.0) == 0.0);
  const auto unmet = unmet_need(fixed({1.0, 4.0}, 5.0), y);
  CHECK(unmet == std::vector<double>{0.0, 6.0});
  CHECK_THROWS_AS(allocation_loss(fixed({1.0}, 1.0), y), DimensionMismatch);
}

TEST_CASE("expected loss closed form") {
  const auto f = exps({1.0, 4.0});
  CHECK(expected_allocation_loss(f, fixed({1.0, 4.0}, 5.0)) == Approx(5.0 * std::exp(-1.0)));
  CHECK(expected_allocation_loss(exps({2.0}), fixed({0.0}, 0.0)) == Approx(2.0));
}

TEST_CASE("solver negative quantiles are clamped at zero") {
  const MultiForecast f({"a", "b"}, {MarginalDistribution::normal(-5.0, 1.0),
                                     MarginalDistribution::normal(10.0, 1.0)});
  const auto a = solve_allocation(f, 3.0);
  CHECK(a.amounts[0] == 0.0);
  CHECK(a.amounts[1] == Approx(3.0).epsilon(1e-12));
}

TEST_CASE("single location takes everything") {
  const auto a = solve_allocation(exps({2.0}), 7.0);
  CHECK(a.amounts[0] == Approx(7.0).epsilon(1e-12));
}

TEST_CASE("constraint beyond representable levels") {
  // tau = 1 - exp(-60) is indistinguishable from 1 in double precision.
  const auto a = solve_allocation(exps({1.0, 4.0}), 300.0);
  CHECK(a.amounts[0] == Approx(60.0).epsilon(1e-9));
  CHECK(a.amounts[1] == Approx(240.0).epsilon(1e-9));
  CHECK_THROWS_AS(solve_allocation(exps({1.0}), 1e6), InfeasibleConstraint);
}

TEST_CASE("point masses absorb the residual at a jump") {
  const MultiForecast f({"a", "b"},
                        {from_quantiles(QuantileSet({0.1, 0.5, 0.9}, {5.0, 5.0, 9.0})),
                         MarginalDistribution::exponential(1e-3)});
  const auto a = solve_allocation(f, 4.0);
  CHECK(a.total() == Approx(4.0).epsilon(1e-12));
  check_feasible(a);
  // The shared level falls inside the atom's level span, so location a stays
  // on the atom.
  const auto b = solve_allocation(f, 5.0005);
  CHECK(b.total() == Approx(5.0005).epsilon(1e-12));
  CHECK(b.amounts[0] == Approx(5.0).epsilon(1e-12));
  REQUIRE(b.shared_level);
  CHECK(*b.shared_level > 0.1);
  CHECK(*b.shared_level < 0.5);
}

TEST_CASE("errors") {
  const auto f = exps({1.0, 4.0});
  CHECK_THROWS_AS(solve_allocation(f, 0.0), InvalidArgument);
  CHECK_THROWS_AS(solve_allocation(f, -1.0), InvalidArgument);
  CHECK_THROWS_AS(solve_allocation(f, 5.0, SolverConfig{1e-9, 1e-12, 1}), NoConvergence);
  CHECK_THROWS_AS(check_feasible(fixed({1.0, 1.0}, 5.0)), InfeasibleAllocation);
  CHECK_THROWS_AS(check_feasible(fixed({-1.0, 6.0}, 5.0)), InfeasibleAllocation);
  CHECK_THROWS_AS(Outcome({-1.0}), InvalidArgument);
  CHECK_THROWS_AS(MultiForecast({"a", "a"}, {MarginalDistribution::exponential(1.0),
                                             MarginalDistribution::exponential(1.0)}),
                  InvalidArgument);
}

TEST_CASE("properties on random instances") {
  oracle::Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = rng.integer(1, 8);
    std::vector<std::string> locs;
    std::vector<MarginalDistribution> m;
    std::vector<double> scales;
    bool all_exp = true;
    for (int i = 0; i < n; ++i) {
      locs.push_back("L" + std::to_string(i));
      switch (rng.integer(0, 2)) {
        case 0:
          scales.push_back(rng.uniform(0.1, 50.0));
          m.push_back(MarginalDistribution::exponential(scales.back()));
          break;
        case 1:
          all_exp = false;
          m.push_back(MarginalDistribution::normal(rng.uniform(0.0, 40.0), rng.uniform(0.5, 10.0)));
          break;
        default:
          all_exp = false;
          m.push_back(MarginalDistribution::lognormal(rng.uniform(-1.0, 3.0), rng.uniform(0.1, 1.5)));
      }
    }
    const MultiForecast f(locs, m);
    const double k = rng.uniform(0.5, 100.0 * n);
    const auto a = solve_allocation(f, k);
    CAPTURE(trial);
    CHECK(std::abs(a.total() - k) <= 1e-6 * k);
    for (double x : a.amounts) CHECK(x >= 0.0);

    // Positive allocations share an exceedance level.
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i < n; ++i) {
      if (a.amounts[i] <= 0.0) continue;
      const double c = f[i].cdf(a.amounts[i]);
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
    if (hi >= lo) CHECK(hi - lo <= 1e-4);

    if (all_exp) {
      double total_scale = 0.0;
      for (double s : scales) total_scale += s;
      for (int i = 0; i < n; ++i) {
        CHECK(a.amounts[i] == Approx(k * scales[i] / total_scale).epsilon(1e-6));
      }
    }

    const auto b = solve_allocation(f, k * 1.3);
    for (int i = 0; i < n; ++i) CHECK(b.amounts[i] >= a.amounts[i] - 1e-9 * k);

    std::vector<double> y(n);
    for (int i = 0; i < n; ++i) y[i] = f[i].quantile(rng.uniform());
    for (double& v : y) v = std::max(0.0, v);
    const Outcome out(y);
    CHECK(allocation_loss(a, out) >= oracle_loss(out, k) - 1e-12 * (k + out.total()));
  }
}

TEST_CASE("beats a brute-force grid for two locations") {
  oracle::Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const bool use_normal = rng.uniform() < 0.5;
    const double p1 = rng.uniform(0.5, 20.0), p2 = rng.uniform(0.5, 20.0);
    const double s1 = rng.uniform(0.5, 5.0), s2 = rng.uniform(0.5, 5.0);
    MultiForecast f = use_normal
        ? MultiForecast({"a", "b"}, {MarginalDistribution::normal(p1, s1),
                                     MarginalDistribution::normal(p2, s2)})
        : MultiForecast({"a", "b"}, {MarginalDistribution::exponential(p1),
                                     MarginalDistribution::exponential(p2)});
    const auto loss = [&](double x1, double k) {
      return use_normal ? oracle::normal_shortage(p1, s1, x1) + oracle::normal_shortage(p2, s2, k - x1)
                        : oracle::exp_shortage(p1, x1) + oracle::exp_shortage(p2, k - x1);
    };
    const double k = rng.uniform(1.0, 40.0);
    const auto best = oracle::grid_minimum([&](double x1) { return loss(x1, k); }, 0.0, k, 10001);
    const auto a = solve_allocation(f, k);
    CAPTURE(trial);
    CHECK(expected_allocation_loss(f, a) <= best.value + 1e-4 * k);
    CHECK(loss(a.amounts[0], k) == Approx(expected_allocation_loss(f, a)).epsilon(1e-9));
  }
}
