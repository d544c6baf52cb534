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

#include "alloscore/cli.hpp"

#include <algorithm>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "alloscore/alloc.hpp"
#include "alloscore/errors.hpp"
#include "alloscore/hubio.hpp"
#include "alloscore/lab.hpp"
#include "alloscore/score.hpp"

namespace alloscore::cli {

namespace {

constexpr const char* kPerCapita = "per-capita";

struct RunConfig {
  std::string forecasts;
  std::string truth;
  std::string population;
  std::string output;
  std::string ranks;
  std::string format = "csv";
  std::vector<std::string> models;
  double k = 15000.0;
  double loss = 1.0;
  double k_min = 200.0;
  double k_max = 60000.0;
  double k_step = 200.0;
  std::string weight = "truncnormal:15000,3000,5000,25000";
  int min_weeks = 0;
  int jobs = 1;
  SolverConfig solver;

  // lab
  std::vector<double> f_scales = {1.0, 4.0};
  std::vector<double> g_scales = {4.0, 1.0};
  std::vector<double> meanlog = {0.0, 0.0};
  std::vector<double> sdlog = {0.25, 1.0};
  std::optional<double> level;
  std::size_t draws = 10000;
  std::uint64_t seed = 1;

  void validate() const {
    auto positive = [](double v, const char* name) {
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw InvalidArgument(std::string("--") + name + " must be positive");
      }
    };
    positive(k, "k");
    positive(loss, "loss");
    positive(k_min, "k-min");
    positive(k_max, "k-max");
    positive(k_step, "k-step");
    if (!(k_min <= k_max)) throw InvalidArgument("--k-min must not exceed --k-max");
    if (min_weeks < 0) throw InvalidArgument("--min-weeks must be >= 0");
    if (jobs < 1) throw InvalidArgument("--jobs must be >= 1");
    positive(solver.rel_tol, "rel-tol");
    positive(solver.abs_tol, "abs-tol");
    if (solver.max_iter <= 0) throw InvalidArgument("--max-iter must be positive");
    parse_format(format);
  }

  LossParams loss_params() const { return {loss}; }
};

WeightSpec parse_weight(const RunConfig& cfg) {
  const std::string& s = cfg.weight;
  WeightSpec w;
  w.grid_step = cfg.k_step;
  if (s == "uniform") {
    w.kind = UniformWeight{cfg.k_min, cfg.k_max};
    return w;
  }
  auto params = [&s](std::size_t prefix) {
    std::vector<double> v;
    std::stringstream ss(s.substr(prefix));
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        v.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw InvalidArgument("--weight: bad number '" + item + "'");
      }
    }
    return v;
  };
  if (s.rfind("truncnormal:", 0) == 0) {
    const auto v = params(12);
    if (v.size() != 4) throw InvalidArgument("--weight truncnormal needs center,sd,lo,hi");
    w.kind = TruncNormalWeight{v[0], v[1], v[2], v[3]};
    return w;
  }
  if (s.rfind("point:", 0) == 0) {
    const auto v = params(6);
    if (v.size() != 1) throw InvalidArgument("--weight point needs one K");
    w.kind = PointMassWeight{v[0]};
    return w;
  }
  throw InvalidArgument("--weight must be uniform, truncnormal:center,sd,lo,hi or point:k");
}

std::vector<double> k_grid(const RunConfig& cfg) {
  std::vector<double> ks;
  const auto n = static_cast<std::size_t>(std::floor((cfg.k_max - cfg.k_min) / cfg.k_step + 1e-9)) + 1;
  for (std::size_t g = 0; g < n; ++g) ks.push_back(cfg.k_min + static_cast<double>(g) * cfg.k_step);
  return ks;
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads. Results are placed by
// index, so output order does not depend on scheduling. The first failure
// by index is rethrown.
template <class T>
std::vector<T> parallel_map(std::size_t n, int jobs, const std::function<T(std::size_t)>& fn) {
  std::vector<std::optional<T>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < n; i += stride) {
      try {
        slots[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto threads = static_cast<std::size_t>(std::max(1, jobs));
  if (threads == 1 || n < 2) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<T> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

void emit(const RunConfig& cfg, std::ostream& out, const std::function<void(std::ostream&)>& fn) {
  if (cfg.output.empty()) {
    fn(out);
    return;
  }
  std::ofstream file(cfg.output, std::ios::binary);
  if (!file) throw IoError("cannot write " + cfg.output);
  fn(file);
  if (!file) throw IoError("failed writing " + cfg.output);
}

// --- data preparation ------------------------------------------------------

struct Task {
  ForecastKey key;
  const ForecastSubmission* submission;
};

struct Inputs {
  ForecastTable forecasts;
  TruthTable truth;
  std::optional<PopulationTable> population;
  std::vector<Task> tasks;  // ordered by (target_date, model)
  std::map<std::string, std::vector<std::string>> locations_by_date;
};

Inputs load_inputs(const RunConfig& cfg, bool need_truth) {
  Inputs in;
  ForecastLoadOptions opts;
  opts.drop_incomplete = cfg.min_weeks > 0;
  in.forecasts = load_forecasts(cfg.forecasts, opts);
  if (need_truth) in.truth = load_truth(cfg.truth);
  if (!cfg.population.empty()) in.population = load_population(cfg.population);

  const std::set<std::string> wanted(cfg.models.begin(), cfg.models.end());
  std::map<std::string, int> weeks;
  for (const auto& [key, sub] : in.forecasts.groups) ++weeks[key.model];

  for (const auto& [key, sub] : in.forecasts.groups) {
    if (!wanted.empty() && !wanted.count(key.model)) continue;
    if (weeks[key.model] < cfg.min_weeks) continue;
    in.tasks.push_back({key, &sub});
    in.locations_by_date.emplace(key.target_date, sub.locations);
  }
  std::stable_sort(in.tasks.begin(), in.tasks.end(), [](const Task& a, const Task& b) {
    return std::tie(a.key.target_date, a.key.model) < std::tie(b.key.target_date, b.key.model);
  });
  return in;
}

MultiForecast build_forecast(const ForecastSubmission& sub) {
  std::vector<MarginalDistribution> marginals;
  marginals.reserve(sub.quantiles.size());
  for (const auto& q : sub.quantiles) marginals.push_back(from_quantiles(q));
  return MultiForecast(sub.locations, std::move(marginals));
}

Outcome observed(const TruthTable& truth, const std::vector<std::string>& locations,
                 const std::string& date) {
  std::vector<double> y;
  y.reserve(locations.size());
  for (const auto& loc : locations) {
    auto it = truth.find({loc, date});
    if (it == truth.end()) {
      throw MissingLocation("no truth value for location " + loc + " on " + date);
    }
    y.push_back(it->second);
  }
  return Outcome(std::move(y));
}

std::vector<std::string> per_capita_dates(const Inputs& in) {
  std::vector<std::string> dates;
  if (!in.population) return dates;
  for (const auto& [date, locs] : in.locations_by_date) dates.push_back(date);
  return dates;
}

// --- subcommands -----------------------------------------------------------

int cmd_allocate(const RunConfig& cfg, std::ostream& out) {
  const Inputs in = load_inputs(cfg, false);
  const auto allocations = parallel_map<Allocation>(in.tasks.size(), cfg.jobs, [&](std::size_t i) {
    return solve_allocation(build_forecast(*in.tasks[i].submission), cfg.k, cfg.solver);
  });
  Table t;
  t.columns = {"model", "target_date", "location", "allocated", "shared_level"};
  for (std::size_t i = 0; i < in.tasks.size(); ++i) {
    const auto& task = in.tasks[i];
    for (std::size_t j = 0; j < task.submission->locations.size(); ++j) {
      t.rows.push_back({task.key.model, task.key.target_date, task.submission->locations[j],
                        allocations[i].amounts[j],
                        allocations[i].shared_level ? Table::Cell(*allocations[i].shared_level)
                                                    : Table::Cell(std::monostate{})});
    }
  }
  emit(cfg, out, [&](std::ostream& os) { write_table(os, t, parse_format(cfg.format)); });
  return kExitOk;
}

std::vector<LabeledReport> score_reports(const RunConfig& cfg, const Inputs& in,
                                         const std::vector<double>& ks) {
  struct Job {
    std::size_t task;  // index into in.tasks, or npos for per-capita
    std::string date;
    double k;
  };
  constexpr std::size_t kBenchmark = static_cast<std::size_t>(-1);
  std::vector<Job> jobs;
  // Group rows by date, then model (per-capita last), then K.
  const auto pc_dates = per_capita_dates(in);
  std::size_t t = 0;
  for (const auto& [date, locs] : in.locations_by_date) {
    for (; t < in.tasks.size() && in.tasks[t].key.target_date == date; ++t) {
      for (double k : ks) jobs.push_back({t, date, k});
    }
    if (std::find(pc_dates.begin(), pc_dates.end(), date) != pc_dates.end()) {
      for (double k : ks) jobs.push_back({kBenchmark, date, k});
    }
  }

  return parallel_map<LabeledReport>(jobs.size(), cfg.jobs, [&](std::size_t i) {
    const Job& job = jobs[i];
    const auto& locs = in.locations_by_date.at(job.date);
    const Outcome y = observed(in.truth, locs, job.date);
    if (job.task == kBenchmark) {
      const Allocation x = per_capita_allocation(*in.population, locs, job.k);
      return LabeledReport{kPerCapita, job.date,
                           score_fixed_allocation(x, y, job.k, cfg.loss_params(), locs)};
    }
    const Task& task = in.tasks[job.task];
    return LabeledReport{task.key.model, job.date,
                         allocation_score(build_forecast(*task.submission), y, job.k,
                                          cfg.loss_params(), cfg.solver)};
  });
}

int cmd_score(const RunConfig& cfg, std::ostream& out) {
  const Inputs in = load_inputs(cfg, true);
  const auto reports = score_reports(cfg, in, {cfg.k});
  const Format format = parse_format(cfg.format);

  std::vector<LabeledRankTable> ranks;
  for (const auto& [date, locs] : in.locations_by_date) {
    std::vector<std::pair<std::string, double>> as_scores;
    for (const auto& r : reports) {
      if (r.target_date == date) as_scores.emplace_back(r.model, r.report.allocation_score);
    }
    std::vector<std::pair<std::string, double>> wis_scores;
    const Outcome y = observed(in.truth, locs, date);
    for (const auto& task : in.tasks) {
      if (task.key.target_date != date) continue;
      wis_scores.emplace_back(task.key.model, mean_wis(task.submission->quantiles, y));
    }
    ranks.push_back({date, "AS", standardized_ranks(as_scores)});
    ranks.push_back({date, "MWIS", standardized_ranks(wis_scores)});
  }

  emit(cfg, out, [&](std::ostream& os) {
    write_report(os, reports, format);
    if (cfg.ranks.empty()) {
      os << '\n';
      write_rank_tables(os, ranks, format);
    }
  });
  if (!cfg.ranks.empty()) write_rank_tables(ranks, cfg.ranks, format);
  return kExitOk;
}

int cmd_ias(const RunConfig& cfg, std::ostream& out) {
  const Inputs in = load_inputs(cfg, true);
  const WeightSpec weight = parse_weight(cfg);
  const auto grid = weight_grid(weight);
  std::vector<double> ks;
  for (const auto& g : grid) ks.push_back(g.k);
  const auto reports = score_reports(cfg, in, ks);

  Table t;
  t.columns = {"model", "target_date", "weight", "ias"};
  for (std::size_t i = 0; i < reports.size(); i += grid.size()) {
    double ias = 0.0;
    for (std::size_t g = 0; g < grid.size(); ++g) {
      ias += grid[g].weight * reports[i + g].report.allocation_score;
    }
    t.rows.push_back({reports[i].model, reports[i].target_date, cfg.weight, ias});
  }
  emit(cfg, out, [&](std::ostream& os) { write_table(os, t, parse_format(cfg.format)); });
  return kExitOk;
}

int cmd_wis(const RunConfig& cfg, std::ostream& out) {
  const Inputs in = load_inputs(cfg, true);
  Table t;
  t.columns = {"model", "target_date", "mwis", "dispersion", "underprediction", "overprediction"};
  for (const auto& task : in.tasks) {
    const auto& sub = *task.submission;
    const Outcome y = observed(in.truth, sub.locations, task.key.target_date);
    std::vector<Table::Cell> row = {task.key.model, task.key.target_date,
                                    mean_wis(sub.quantiles, y)};
    try {
      WisComponents sum;
      for (std::size_t i = 0; i < sub.quantiles.size(); ++i) {
        const auto c = wis_decomposition(sub.quantiles[i], y.values()[i]);
        sum.dispersion += c.dispersion;
        sum.underprediction += c.underprediction;
        sum.overprediction += c.overprediction;
      }
      const double n = static_cast<double>(sub.quantiles.size());
      row.insert(row.end(), {sum.dispersion / n, sum.underprediction / n, sum.overprediction / n});
    } catch (const AsymmetricLevels&) {
      row.insert(row.end(), 3, std::monostate{});
    }
    t.rows.push_back(std::move(row));
  }
  emit(cfg, out, [&](std::ostream& os) { write_table(os, t, parse_format(cfg.format)); });
  return kExitOk;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
  const Inputs in = load_inputs(cfg, true);
  const auto reports = score_reports(cfg, in, k_grid(cfg));
  emit(cfg, out, [&](std::ostream& os) { write_report(os, reports, parse_format(cfg.format)); });
  return kExitOk;
}

MultiForecast exponential_forecast(const std::vector<double>& scales) {
  std::vector<std::string> locs;
  std::vector<MarginalDistribution> m;
  for (std::size_t i = 0; i < scales.size(); ++i) {
    locs.push_back("loc" + std::to_string(i + 1));
    m.push_back(MarginalDistribution::exponential(scales[i]));
  }
  return MultiForecast(std::move(locs), std::move(m));
}

int cmd_lab_propriety(const RunConfig& cfg, std::ostream& out) {
  const auto f = exponential_forecast(cfg.f_scales);
  const auto g = exponential_forecast(cfg.g_scales);
  const auto r = mc_propriety(f, g, cfg.k, cfg.draws, cfg.seed, cfg.loss_params(), cfg.solver);
  emit(cfg, out, [&](std::ostream& os) { os << to_json(r) << '\n'; });
  return kExitOk;
}

int cmd_lab_posthoc(const RunConfig& cfg, std::ostream& out) {
  if (cfg.meanlog.size() != cfg.sdlog.size()) {
    throw DimensionMismatch("--meanlog and --sdlog differ in length");
  }
  std::vector<std::string> locs;
  std::vector<MarginalDistribution> m;
  for (std::size_t i = 0; i < cfg.meanlog.size(); ++i) {
    locs.push_back("loc" + std::to_string(i + 1));
    m.push_back(MarginalDistribution::lognormal(cfg.meanlog[i], cfg.sdlog[i]));
  }
  const MultiForecast f(std::move(locs), std::move(m));
  double k = cfg.k;
  if (cfg.level) {
    k = 0.0;
    for (const auto& d : f.marginals()) k += d.quantile(*cfg.level);
  }
  const auto r = posthoc_impropriety_demo(f, k, cfg.draws, cfg.seed, hub_quantile_levels(),
                                          cfg.loss_params(), cfg.solver);
  emit(cfg, out, [&](std::ostream& os) { os << to_json(r) << '\n'; });
  return kExitOk;
}

void add_solver_flags(CLI::App* app, RunConfig& cfg) {
  app->add_option("--rel-tol", cfg.solver.rel_tol, "Relative bisection tolerance on the level");
  app->add_option("--abs-tol", cfg.solver.abs_tol, "Absolute bisection tolerance on the level");
  app->add_option("--max-iter", cfg.solver.max_iter, "Bisection iteration limit");
}

void add_input_flags(CLI::App* app, RunConfig& cfg, bool truth) {
  app->add_option("--forecasts", cfg.forecasts, "Forecast CSV")->required();
  if (truth) app->add_option("--truth", cfg.truth, "Truth CSV")->required();
  app->add_option("--models", cfg.models, "Only these models")->delimiter(',');
  app->add_option("--min-weeks", cfg.min_weeks,
                  "Drop incomplete submissions and models with fewer complete target dates");
  app->add_option("--format", cfg.format, "csv or json");
  app->add_option("--output,-o", cfg.output, "Write to this file instead of stdout");
  app->add_option("--jobs,-j", cfg.jobs, "Worker threads");
  add_solver_flags(app, cfg);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Allocation scores for multivariate quantile forecasts", "alloscore"};
  app.require_subcommand(1);

  auto* allocate = app.add_subcommand("allocate", "Forecast-optimal allocations of K units");
  add_input_flags(allocate, cfg, false);
  allocate->add_option("--k", cfg.k, "Resource constraint");

  auto* score = app.add_subcommand("score", "Allocation scores and standardized ranks");
  add_input_flags(score, cfg, true);
  score->add_option("--k", cfg.k, "Resource constraint");
  score->add_option("--loss", cfg.loss, "Loss per unit of unmet need");
  score->add_option("--population", cfg.population, "Population CSV; adds the per-capita benchmark");
  score->add_option("--ranks", cfg.ranks, "Write rank tables to this file");

  auto* ias = app.add_subcommand("ias", "Integrated allocation scores");
  add_input_flags(ias, cfg, true);
  ias->add_option("--loss", cfg.loss, "Loss per unit of unmet need");
  ias->add_option("--population", cfg.population, "Population CSV; adds the per-capita benchmark");
  ias->add_option("--weight", cfg.weight, "uniform | truncnormal:center,sd,lo,hi | point:k");
  ias->add_option("--k-min", cfg.k_min, "Smallest K of a uniform weight");
  ias->add_option("--k-max", cfg.k_max, "Largest K of a uniform weight");
  ias->add_option("--k-step", cfg.k_step, "Grid step");

  auto* wis_cmd = app.add_subcommand("wis", "Mean weighted interval scores");
  add_input_flags(wis_cmd, cfg, true);

  auto* sweep = app.add_subcommand("sweep", "Allocation scores over a grid of K");
  add_input_flags(sweep, cfg, true);
  sweep->add_option("--loss", cfg.loss, "Loss per unit of unmet need");
  sweep->add_option("--population", cfg.population, "Population CSV; adds the per-capita benchmark");
  sweep->add_option("--k-min", cfg.k_min, "Smallest K");
  sweep->add_option("--k-max", cfg.k_max, "Largest K");
  sweep->add_option("--k-step", cfg.k_step, "Grid step");

  auto* lab = app.add_subcommand("lab", "Monte Carlo experiments");
  lab->require_subcommand(1);
  auto* propriety = lab->add_subcommand("propriety", "Paired comparison of two exponential forecasts");
  propriety->add_option("--f-scales", cfg.f_scales, "Scales of the true forecast")->delimiter(',');
  propriety->add_option("--g-scales", cfg.g_scales, "Scales of the competitor")->delimiter(',');
  auto* posthoc = lab->add_subcommand("posthoc", "Lognormal truth vs. quantile reconstruction");
  posthoc->add_option("--meanlog", cfg.meanlog, "Lognormal meanlog per location")->delimiter(',');
  posthoc->add_option("--sdlog", cfg.sdlog, "Lognormal sdlog per location")->delimiter(',');
  posthoc->add_option("--level", cfg.level, "Set K to the sum of quantiles at this level");
  for (auto* sub : {propriety, posthoc}) {
    sub->add_option("--k", cfg.k, "Resource constraint");
    sub->add_option("--loss", cfg.loss, "Loss per unit of unmet need");
    sub->add_option("--n", cfg.draws, "Number of draws");
    sub->add_option("--seed", cfg.seed, "Random seed");
    sub->add_option("--output,-o", cfg.output, "Write to this file instead of stdout");
    add_solver_flags(sub, cfg);
  }

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    cfg.validate();
    if (allocate->parsed()) return cmd_allocate(cfg, out);
    if (score->parsed()) return cmd_score(cfg, out);
    if (ias->parsed()) return cmd_ias(cfg, out);
    if (wis_cmd->parsed()) return cmd_wis(cfg, out);
    if (sweep->parsed()) return cmd_sweep(cfg, out);
    if (propriety->parsed()) return cmd_lab_propriety(cfg, out);
    if (posthoc->parsed()) return cmd_lab_posthoc(cfg, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const ComputeError& e) {
    err << "error: " << e.what() << '\n';
    return kExitCompute;
  }
  return kExitOk;
}

}  // namespace alloscore::cli
