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

#include <cmath>
#include <limits>
#include <vector>

#include "alloscore/errors.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace alloscore;
using doctest::Approx;

namespace {

std::vector<MarginalDistribution> assorted() {
  std::vector<MarginalDistribution> d;
  d.push_back(MarginalDistribution::exponential(1.0));
  d.push_back(MarginalDistribution::exponential(37.5));
  d.push_back(MarginalDistribution::normal(3.0, 2.0));
  d.push_back(MarginalDistribution::normal(-100.0, 0.5));
  d.push_back(MarginalDistribution::lognormal(0.0, 1.0));
  d.push_back(MarginalDistribution::lognormal(2.0, 0.3));
  std::vector<double> v;
  for (double tau : oracle::hub_levels()) v.push_back(oracle::exp_quantile(5.0, tau));
  d.push_back(from_quantiles(QuantileSet(oracle::hub_levels(), v)));
  d.push_back(from_quantiles(QuantileSet({0.1, 0.3, 0.5, 0.7, 0.9}, {0.0, 0.0, 2.0, 3.0, 10.0})));
  return d;
}

QuantileSet random_set(oracle::Rng& rng) {
  const int n = rng.integer(2, 23);
  std::vector<double> levels, values;
  double level = 0.0, value = rng.uniform(-50.0, 50.0);
  for (int i = 0; i < n; ++i) {
    level += rng.uniform(1e-3, (1.0 - level) / (n - i + 1));
    value += rng.uniform(1e-3, 20.0);
    levels.push_back(level);
    values.push_back(value);
  }
  return {levels, values};
}

}  // namespace

TEST_CASE("exponential closed forms") {
  const auto e1 = MarginalDistribution::exponential(1.0);
  CHECK(e1.cdf(0.0) == 0.0);
  CHECK(e1.cdf(-3.0) == 0.0);
  CHECK(e1.cdf(1.0) == Approx(1.0 - std::exp(-1.0)).epsilon(1e-15));
  CHECK(e1.expected_shortage(0.0) == Approx(1.0).epsilon(1e-15));
  CHECK(e1.expected_shortage(1e6) == 0.0);
  CHECK(e1.mean() == 1.0);

  const auto e4 = MarginalDistribution::exponential(4.0);
  CHECK(e4.quantile(1.0 - std::exp(-1.0)) == Approx(4.0).epsilon(1e-14));
  CHECK(e4.quantile(0.0) == 0.0);
  CHECK_THROWS_AS(e4.quantile(1.0), UnboundedQuantile);
}

TEST_CASE("lognormal and normal quantiles match an independent inverse") {
  const auto ln = MarginalDistribution::lognormal(0.0, 1.0);
  CHECK(ln.quantile(0.5) == Approx(1.0).epsilon(1e-14));
  const auto nm = MarginalDistribution::normal(2.0, 3.0);
  for (double tau : {1e-10, 0.001, 0.1, 0.37, 0.5, 0.9, 0.999, 1.0 - 1e-9}) {
    CAPTURE(tau);
    CHECK(ln.quantile(tau) == Approx(std::exp(oracle::normal_quantile(tau))).epsilon(1e-12));
    CHECK(nm.quantile(tau) == Approx(2.0 + 3.0 * oracle::normal_quantile(tau)).epsilon(1e-12));
    CHECK(stdnormal::quantile(tau) == Approx(oracle::normal_quantile(tau)).epsilon(1e-13));
  }
  CHECK(nm.quantile(0.0) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("expected shortage matches quadrature") {
  SUBCASE("exponential") {
    for (double scale : {0.5, 1.0, 4.0}) {
      const auto d = MarginalDistribution::exponential(scale);
      const auto dens = [&](double y) { return std::exp(-y / scale) / scale; };
      for (double x : {-1.0, 0.0, 0.3, 2.0, 7.5}) {
        CAPTURE(x);
        CHECK(d.expected_shortage(x) ==
              Approx(oracle::shortage_by_density(dens, x, 0.0, 60.0 * scale)).epsilon(1e-7));
      }
    }
  }
  SUBCASE("normal") {
    const auto d = MarginalDistribution::normal(1.0, 2.0);
    const auto dens = [](double y) { return oracle::normal_pdf((y - 1.0) / 2.0) / 2.0; };
    for (double x : {-10.0, -1.0, 0.0, 1.0, 4.0, 9.0}) {
      CAPTURE(x);
      CHECK(std::abs(d.expected_shortage(x) - oracle::shortage_by_density(dens, x, -40.0, 42.0)) <
            1e-7);
    }
  }
  SUBCASE("lognormal") {
    const auto d = MarginalDistribution::lognormal(0.5, 0.8);
    const auto dens = [](double y) {
      if (y <= 0.0) return 0.0;
      return oracle::normal_pdf((std::log(y) - 0.5) / 0.8) / (0.8 * y);
    };
    for (double x : {0.0, 0.5, 2.0, 10.0}) {
      CAPTURE(x);
      CHECK(std::abs(d.expected_shortage(x) - oracle::shortage_by_density(dens, x, 1e-12, 2000.0)) <
            1e-7);
    }
  }
}

TEST_CASE("shortage derivative equals cdf - 1") {
  const double h = 1e-5;
  for (const auto& d : assorted()) {
    CAPTURE(d.describe());
    for (double tau : {0.05, 0.2, 0.5, 0.8, 0.97}) {
      const double x = d.quantile(tau);
      if (!d.point_masses().empty() && d.point_masses().front().location == x) continue;
      const double deriv = (d.expected_shortage(x + h) - d.expected_shortage(x - h)) / (2 * h);
      CHECK(std::abs(deriv - (d.cdf(x) - 1.0)) < 1e-5);
    }
  }
}

TEST_CASE("cdf and quantile are monotone") {
  oracle::Rng rng(11);
  for (const auto& d : assorted()) {
    CAPTURE(d.describe());
    for (int i = 0; i < 500; ++i) {
      const double t1 = rng.uniform(), t2 = rng.uniform();
      const double q1 = d.quantile(std::min(t1, t2)), q2 = d.quantile(std::max(t1, t2));
      REQUIRE(q1 <= q2);
      REQUIRE(d.cdf(q1) <= d.cdf(q2));
    }
  }
}

TEST_CASE("reconstruction from three quantiles interpolates the median") {
  const auto d = from_quantiles(QuantileSet({0.25, 0.5, 0.75}, {1.0, 2.0, 3.0}));
  CHECK(d.quantile(0.5) == Approx(2.0).epsilon(1e-12));
  CHECK(d.cdf(2.0) == Approx(0.5).epsilon(1e-12));
  CHECK(d.point_masses().empty());
}

TEST_CASE("repeated quantile values become a point mass") {
  const auto d = from_quantiles(QuantileSet({0.1, 0.5, 0.9}, {5.0, 5.0, 9.0}));
  REQUIRE(d.point_masses().size() == 1);
  CHECK(d.point_masses()[0].location == 5.0);
  CHECK(d.point_masses()[0].mass >= 0.4 - 1e-15);
  CHECK(d.cdf(5.0) - d.cdf(std::nextafter(5.0, 0.0)) == Approx(0.4).epsilon(1e-9));
  CHECK(d.quantile(0.3) == 5.0);
  CHECK(d.quantile(0.5) == 5.0);
  CHECK(d.quantile(0.1) == Approx(5.0).epsilon(1e-12));
  CHECK(d.quantile(0.9) == Approx(9.0).epsilon(1e-12));
  CHECK(d.cdf(9.0) == Approx(0.9).epsilon(1e-9));
  // Just above the atom the quantile leaves it; the left-continuous inverse
  // returns the atom itself at the top of its jump.
  CHECK(d.quantile(d.cdf(5.0)) == 5.0);
  CHECK(d.quantile(0.5 + 1e-6) > 5.0);
}

TEST_CASE("23-level exponential quantiles round trip") {
  const auto levels = oracle::hub_levels();
  for (double scale : {1.0, 4.0, 0.01, 1000.0}) {
    std::vector<double> v;
    for (double tau : levels) v.push_back(oracle::exp_quantile(scale, tau));
    const auto d = from_quantiles(QuantileSet(levels, v));
    for (std::size_t k = 0; k < levels.size(); ++k) {
      CAPTURE(levels[k]);
      CHECK(d.quantile(levels[k]) == Approx(v[k]).epsilon(1e-9));
    }
    CHECK(d.cdf(v.front()) == Approx(levels.front()).epsilon(1e-8));
    CHECK(d.cdf(v[1]) == Approx(levels[1]).epsilon(1e-8));
    CHECK(d.cdf(v.back()) == Approx(levels.back()).epsilon(1e-8));
    CHECK(d.cdf(v[v.size() - 2]) == Approx(levels[levels.size() - 2]).epsilon(1e-8));
  }
}

TEST_CASE("hub levels") {
  const auto mine = hub_quantile_levels();
  const auto ref = oracle::hub_levels();
  REQUIRE(mine.size() == 23);
  for (std::size_t k = 0; k < ref.size(); ++k) CHECK(mine[k] == ref[k]);
}

TEST_CASE("random quantile sets round trip and match their tails") {
  oracle::Rng rng(2026);
  for (int trial = 0; trial < 300; ++trial) {
    const QuantileSet q = random_set(rng);
    const auto d = from_quantiles(q);
    const auto l = q.levels();
    const auto v = q.values();
    for (std::size_t k = 0; k < q.size(); ++k) {
      REQUIRE(d.quantile(l[k]) == Approx(v[k]).epsilon(1e-9).scale(1.0));
    }
    CHECK(std::abs(d.cdf(v.front()) - l.front()) < 1e-8);
    CHECK(std::abs(d.cdf(v.back()) - l.back()) < 1e-8);
  }
}

TEST_CASE("reconstructed shortage and mean agree with quadrature of the cdf") {
  std::vector<double> v;
  for (double tau : oracle::hub_levels()) v.push_back(std::exp(0.3 + 0.6 * oracle::normal_quantile(tau)));
  const auto d = from_quantiles(QuantileSet(oracle::hub_levels(), v));
  const auto sf = [&](double t) { return 1.0 - d.cdf(t); };
  const double hi = d.quantile(1.0 - 1e-15) + 5.0;
  for (double x : {v.front(), v[5], v[11], v.back(), v.back() + 1.0}) {
    CAPTURE(x);
    CHECK(std::abs(d.expected_shortage(x) - oracle::integrate(sf, x, hi, 256, 1e-11)) < 1e-7);
  }
  const double lo = d.quantile(1e-15) - 5.0;
  const double mean = lo + oracle::integrate(sf, lo, hi, 512, 1e-11);
  CHECK(std::abs(d.mean() - mean) < 1e-6);
}

TEST_CASE("upper_quantile agrees with quantile away from 1") {
  for (const auto& d : assorted()) {
    for (double u : {0.5, 0.1, 0.01, 1e-4}) {
      CHECK(d.upper_quantile(u) == Approx(d.quantile(1.0 - u)).epsilon(1e-9).scale(1.0));
    }
  }
  const auto e = MarginalDistribution::exponential(2.0);
  CHECK(e.upper_quantile(1e-200) == Approx(2.0 * 200.0 * std::log(10.0)).epsilon(1e-12));
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(ProbLevel(1.5), InvalidArgument);
  CHECK_THROWS_AS(ProbLevel(-0.1), InvalidArgument);
  CHECK_THROWS_AS(QuantileSet({0.2, 0.1}, {1.0, 2.0}), InvalidArgument);
  CHECK_THROWS_AS(QuantileSet({0.1, 0.2}, {2.0, 1.0}), CrossedQuantiles);
  CHECK_THROWS_AS(QuantileSet({0.1, 0.2}, {1.0}), DimensionMismatch);
  CHECK_THROWS_AS(QuantileSet({0.0, 0.2}, {1.0, 2.0}), InvalidArgument);
  CHECK_THROWS_AS(from_quantiles(QuantileSet({0.1, 0.5, 0.9}, {3.0, 3.0, 3.0})), DegenerateTail);
  CHECK_THROWS_AS(MarginalDistribution::exponential(0.0), InvalidArgument);
  CHECK_THROWS_AS(MarginalDistribution::normal(0.0, -1.0), InvalidArgument);
  CHECK_THROWS_AS(MarginalDistribution::lognormal(0.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(MarginalDistribution::exponential(1.0).upper_quantile(0.0), UnboundedQuantile);
}

TEST_CASE("reconstructed quantiles stay finite next to level 1") {
  const auto d = from_quantiles(QuantileSet({0.1, 0.3, 0.5, 0.7, 0.9}, {1.0, 1.0, 2.0, 3.0, 4.0}));
  const double top = std::nextafter(1.0, 0.0);
  CHECK(std::isfinite(d.quantile(top)));
  CHECK(d.quantile(top) == doctest::Approx(d.upper_quantile(1.0 - top)).epsilon(1e-12));
  CHECK(d.quantile(1.0 - 1e-9) == doctest::Approx(d.upper_quantile(1e-9)).epsilon(1e-9));
}
