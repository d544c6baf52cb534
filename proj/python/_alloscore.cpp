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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "alloscore/alloc.hpp"
#include "alloscore/cli.hpp"
#include "alloscore/dist.hpp"
#include "alloscore/errors.hpp"
#include "alloscore/hubio.hpp"
#include "alloscore/lab.hpp"
#include "alloscore/score.hpp"

#include <sstream>

namespace py = pybind11;
using namespace alloscore;

namespace {

MultiForecast make_forecast(std::vector<std::string> locations,
                            std::vector<MarginalDistribution> marginals) {
  return MultiForecast(std::move(locations), std::move(marginals));
}

py::dict report_dict(const ScoreReport& r) {
  py::list per_location;
  for (const auto& l : r.per_location) {
    py::dict d;
    d["location"] = l.location;
    d["allocated"] = l.allocated;
    d["observed"] = l.observed;
    d["unmet"] = l.unmet;
    per_location.append(d);
  }
  py::dict d;
  d["K"] = r.k;
  d["L"] = r.loss;
  d["raw_score"] = r.raw_score;
  d["oracle_loss"] = r.oracle_loss;
  d["allocation_score"] = r.allocation_score;
  d["shared_level"] = r.shared_level ? py::object(py::float_(*r.shared_level)) : py::object(py::none());
  d["per_location"] = per_location;
  return d;
}

}  // namespace

PYBIND11_MODULE(_alloscore, m) {
  m.doc() = "Allocation scores for multivariate probabilistic forecasts";

  // Exception hierarchy mirrors the C++ one; input errors are ValueErrors.
  static py::exception<Error> error(m, "Error");
  static py::exception<InputError> input_error(m, "InputError", PyExc_ValueError);
  static py::exception<ComputeError> compute_error(m, "ComputeError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const InputError& e) {
      py::set_error(input_error, e.what());
    } catch (const ComputeError& e) {
      py::set_error(compute_error, e.what());
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  py::class_<QuantileSet>(m, "QuantileSet")
      .def(py::init<std::vector<double>, std::vector<double>>(), py::arg("levels"), py::arg("values"))
      .def_property_readonly("levels", [](const QuantileSet& q) {
        return std::vector<double>(q.levels().begin(), q.levels().end());
      })
      .def_property_readonly("values", [](const QuantileSet& q) {
        return std::vector<double>(q.values().begin(), q.values().end());
      })
      .def("__len__", &QuantileSet::size);

  py::class_<MarginalDistribution>(m, "MarginalDistribution")
      .def_static("exponential", &MarginalDistribution::exponential, py::arg("scale"))
      .def_static("normal", &MarginalDistribution::normal, py::arg("mean"), py::arg("sd"))
      .def_static("lognormal", &MarginalDistribution::lognormal, py::arg("meanlog"), py::arg("sdlog"))
      .def_static("from_quantiles", &from_quantiles, py::arg("quantiles"))
      .def("cdf", &MarginalDistribution::cdf, py::arg("x"))
      .def("quantile", [](const MarginalDistribution& d, double tau) { return d.quantile(tau); },
           py::arg("tau"))
      .def("expected_shortage", &MarginalDistribution::expected_shortage, py::arg("x"))
      .def("mean", &MarginalDistribution::mean)
      .def("point_masses", [](const MarginalDistribution& d) {
        std::vector<std::pair<double, double>> out;
        for (const auto& a : d.point_masses()) out.emplace_back(a.location, a.mass);
        return out;
      })
      .def("__repr__", &MarginalDistribution::describe);

  py::class_<MultiForecast>(m, "MultiForecast")
      .def(py::init(&make_forecast), py::arg("locations"), py::arg("marginals"))
      .def("__len__", &MultiForecast::size)
      .def_property_readonly("locations", [](const MultiForecast& f) {
        return std::vector<std::string>(f.locations().begin(), f.locations().end());
      });

  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init([](double rel_tol, double abs_tol, int max_iter) {
             return SolverConfig{rel_tol, abs_tol, max_iter};
           }),
           py::arg("rel_tol") = 1e-9, py::arg("abs_tol") = 1e-12, py::arg("max_iter") = 200)
      .def_readwrite("rel_tol", &SolverConfig::rel_tol)
      .def_readwrite("abs_tol", &SolverConfig::abs_tol)
      .def_readwrite("max_iter", &SolverConfig::max_iter);

  m.def("hub_quantile_levels", &hub_quantile_levels);

  m.def(
      "solve_allocation",
      [](const MultiForecast& f, double k, const SolverConfig& cfg) {
        const Allocation x = solve_allocation(f, k, cfg);
        return py::make_tuple(x.amounts, x.shared_level);
      },
      py::arg("forecast"), py::arg("k"), py::arg("config") = SolverConfig{},
      "Bayes allocation of K units: (amounts, shared_level).");

  m.def(
      "allocation_score",
      [](const MultiForecast& f, std::vector<double> y, double k, double loss,
         const SolverConfig& cfg) {
        return report_dict(allocation_score(f, Outcome(std::move(y)), k, LossParams{loss}, cfg));
      },
      py::arg("forecast"), py::arg("y"), py::arg("k"), py::arg("loss") = 1.0,
      py::arg("config") = SolverConfig{});

  m.def(
      "score_fixed_allocation",
      [](std::vector<double> x, std::vector<double> y, double k, double loss) {
        return report_dict(
            score_fixed_allocation({std::move(x), k, std::nullopt}, Outcome(std::move(y)), k, LossParams{loss}));
      },
      py::arg("x"), py::arg("y"), py::arg("k"), py::arg("loss") = 1.0);

  m.def(
      "integrated_allocation_score",
      [](const MultiForecast& f, std::vector<double> y, const std::string& weight,
         std::vector<double> params, double step, double loss) {
        WeightSpec w;
        w.grid_step = step;
        if (weight == "uniform" && params.size() == 2) {
          w.kind = UniformWeight{params[0], params[1]};
        } else if (weight == "truncnormal" && params.size() == 4) {
          w.kind = TruncNormalWeight{params[0], params[1], params[2], params[3]};
        } else if (weight == "point" && params.size() == 1) {
          w.kind = PointMassWeight{params[0]};
        } else {
          throw InvalidArgument("weight must be uniform(k_min, k_max), truncnormal(center, sd, lo, hi) "
                                "or point(k)");
        }
        return integrated_allocation_score(f, Outcome(std::move(y)), w, LossParams{loss});
      },
      py::arg("forecast"), py::arg("y"), py::arg("weight"), py::arg("params"),
      py::arg("step") = 200.0, py::arg("loss") = 1.0);

  m.def("quantile_score", &quantile_score, py::arg("q"), py::arg("tau"), py::arg("y"));
  m.def("wis", &wis, py::arg("quantiles"), py::arg("y"));
  m.def(
      "mean_wis",
      [](const std::vector<QuantileSet>& q, std::vector<double> y) {
        return mean_wis(q, Outcome(std::move(y)));
      },
      py::arg("quantiles"), py::arg("y"));
  m.def(
      "wis_decomposition",
      [](const QuantileSet& q, double y) {
        const auto c = wis_decomposition(q, y);
        py::dict d;
        d["dispersion"] = c.dispersion;
        d["underprediction"] = c.underprediction;
        d["overprediction"] = c.overprediction;
        return d;
      },
      py::arg("quantiles"), py::arg("y"));
  m.def(
      "standardized_ranks",
      [](const std::vector<std::pair<std::string, double>>& scores) {
        std::vector<std::tuple<std::string, double, double>> out;
        for (const auto& e : standardized_ranks(scores).entries) {
          out.emplace_back(e.model, e.score, e.standardized_rank);
        }
        return out;
      },
      py::arg("scores"), "[(model, score)] -> [(model, score, standardized_rank)]");

  m.def(
      "mc_propriety",
      [](const MultiForecast& f, const MultiForecast& g, double k, std::size_t n, std::uint64_t seed,
         double loss) {
        ProprietyResult r;
        {
          py::gil_scoped_release release;
          r = mc_propriety(f, g, k, n, seed, LossParams{loss});
        }
        py::dict d;
        d["mean_self"] = r.mean_self;
        d["mean_other"] = r.mean_other;
        d["se"] = r.se;
        d["n_draws"] = r.n_draws;
        d["seed"] = r.seed;
        d["verdict"] = r.verdict();
        return d;
      },
      py::arg("f"), py::arg("g"), py::arg("k"), py::arg("n") = 10000, py::arg("seed") = 1,
      py::arg("loss") = 1.0);

  m.def(
      "posthoc_impropriety_demo",
      [](const MultiForecast& f, double k, std::size_t n, std::uint64_t seed) {
        return py::module_::import("json").attr("loads")(to_json(posthoc_impropriety_demo(f, k, n, seed)));
      },
      py::arg("forecast"), py::arg("k"), py::arg("n") = 10000, py::arg("seed") = 1);

  m.def(
      "per_capita_allocation",
      [](const PopulationTable& pop, const std::vector<std::string>& locations, double k) {
        return per_capita_allocation(pop, locations, k).amounts;
      },
      py::arg("population"), py::arg("locations"), py::arg("k"));

  m.def(
      "run_cli",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "alloscore");
        std::ostringstream out, err;
        int code = 0;
        {
          py::gil_scoped_release release;
          code = cli::run(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command line in-process: (exit_code, stdout, stderr).");
}
