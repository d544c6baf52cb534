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

#include "alloscore/spline.hpp"

#include <vector>

#include "alloscore/errors.hpp"
#include "doctest.h"
#include "oracles.hpp"

using alloscore::MonotoneCubicSpline;

TEST_CASE("interpolates the knots") {
  const std::vector<double> x{0.1, 0.3, 0.35, 0.8, 0.9};
  const std::vector<double> y{-2.0, 0.0, 4.0, 4.5, 20.0};
  const MonotoneCubicSpline s(x, y);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(s(x[i]) == doctest::Approx(y[i]).epsilon(1e-15));
}

TEST_CASE("linear data is reproduced exactly") {
  const std::vector<double> x{0.0, 0.25, 0.5, 1.0};
  const std::vector<double> y{1.0, 1.5, 2.0, 3.0};
  const MonotoneCubicSpline s(x, y);
  for (double t = 0.0; t <= 1.0; t += 0.01) CHECK(s(t) == doctest::Approx(1.0 + 2.0 * t));
}

TEST_CASE("monotone on random increasing data") {
  oracle::Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = rng.integer(2, 12);
    std::vector<double> x(n), y(n);
    double xa = 0.0, ya = rng.uniform(-5, 5);
    for (int i = 0; i < n; ++i) {
      // Mix of tiny and large steps to provoke overshoot in a naive spline.
      xa += rng.uniform() < 0.3 ? 1e-3 : rng.uniform(0.01, 1.0);
      ya += rng.uniform() < 0.3 ? 1e-4 : rng.uniform(0.0, 10.0) + 1e-9;
      x[i] = xa;
      y[i] = ya;
    }
    const MonotoneCubicSpline s(x, y);
    double prev = s(x.front());
    for (int k = 1; k <= 2000; ++k) {
      const double v = s(x.front() + (x.back() - x.front()) * k / 2000.0);
      REQUIRE(v >= prev);
      prev = v;
    }
    CHECK(prev == doctest::Approx(y.back()));
  }
}

TEST_CASE("inverse undoes evaluation") {
  const std::vector<double> x{0.0, 0.2, 0.7, 1.0};
  const std::vector<double> y{0.0, 1.0, 1.1, 5.0};
  const MonotoneCubicSpline s(x, y);
  for (double t = 0.0; t <= 1.0; t += 0.037) CHECK(s.inverse(s(t)) == doctest::Approx(t).epsilon(1e-11));
}

TEST_CASE("integral agrees with quadrature") {
  const std::vector<double> x{0.01, 0.2, 0.5, 0.9, 0.99};
  const std::vector<double> y{-3.0, -1.0, 0.5, 2.0, 9.0};
  const MonotoneCubicSpline s(x, y);
  const auto f = [&](double t) { return s(t); };
  CHECK(s.integral(0.01, 0.99) == doctest::Approx(oracle::integrate(f, 0.01, 0.99)).epsilon(1e-12));
  CHECK(s.integral(0.3, 0.95) == doctest::Approx(oracle::integrate(f, 0.3, 0.95)).epsilon(1e-12));
  CHECK(s.integral(0.4, 0.4) == 0.0);
}

TEST_CASE("rejects non-increasing knots") {
  const std::vector<double> x{0.0, 0.5, 0.5};
  const std::vector<double> y{0.0, 1.0, 2.0};
  CHECK_THROWS_AS(MonotoneCubicSpline(x, y), alloscore::InvalidArgument);
  const std::vector<double> x2{0.0, 0.5, 1.0};
  const std::vector<double> y2{0.0, 1.0, 1.0};
  CHECK_THROWS_AS(MonotoneCubicSpline(x2, y2), alloscore::InvalidArgument);
}
