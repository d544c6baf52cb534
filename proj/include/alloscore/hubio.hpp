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

// Reading hub-style forecast, truth and population files, and writing score
// reports and rank tables.
//
// Forecasts:   model,location,target_date,quantile_level,value
// Truth:       location,date,value
// Population:  location,population
//
// Files are UTF-8 CSV with the header line exactly as above. Dates are
// ISO-8601 calendar dates (YYYY-MM-DD). Numbers are written with the
// shortest decimal representation that reads back to the same double.

#pragma once

#include <compare>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "alloscore/alloc.hpp"
#include "alloscore/dist.hpp"
#include "alloscore/score.hpp"

namespace alloscore {

struct ForecastRecord {
  std::string model;
  std::string location;
  std::string target_date;
  double level = 0.0;
  double value = 0.0;
};

struct TruthRecord {
  std::string location;
  std::string date;
  double value = 0.0;
};

struct PopulationRecord {
  std::string location;
  double population = 0.0;
};

struct ForecastKey {
  std::string model;
  std::string target_date;

  friend auto operator<=>(const ForecastKey&, const ForecastKey&) = default;
};

/// One model's quantile forecasts for one target date, sorted by location.
struct ForecastSubmission {
  std::vector<std::string> locations;
  std::vector<QuantileSet> quantiles;

  const QuantileSet* find(const std::string& location) const;
  std::size_t record_count() const;
};

struct ForecastLoadOptions {
  /// Locations every submission must cover. Empty means: the union of
  /// locations forecast by any model for the same target date.
  std::vector<std::string> required_locations;
  /// Drop incomplete submissions (counted as rejected) instead of throwing
  /// MissingLocation.
  bool drop_incomplete = false;
};

struct ForecastTable {
  std::map<ForecastKey, ForecastSubmission> groups;
  std::size_t records_read = 0;
  std::size_t records_rejected = 0;
};

using TruthTable = std::map<std::pair<std::string, std::string>, double>;  // (location, date)
using PopulationTable = std::map<std::string, double>;

ForecastTable load_forecasts(const std::filesystem::path& path,
                             const ForecastLoadOptions& options = {});
TruthTable load_truth(const std::filesystem::path& path);
PopulationTable load_population(const std::filesystem::path& path);

/// K split in proportion to population.
Allocation per_capita_allocation(const PopulationTable& pop,
                                 const std::vector<std::string>& locations, double k);

// --- output ------------------------------------------------------------------

enum class Format { kCsv, kJson };

Format parse_format(const std::string& name);

/// Shortest round-trip decimal form of a double.
std::string format_number(double v);

/// A generic rectangular table; empty cells are written as empty CSV
/// fields and JSON nulls.
struct Table {
  using Cell = std::variant<std::monostate, std::string, double>;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

void write_table(std::ostream& os, const Table& table, Format format);

struct LabeledReport {
  std::string model;
  std::string target_date;
  ScoreReport report;

  friend bool operator==(const LabeledReport&, const LabeledReport&) = default;
};

/// CSV holds one summary row per report (per-location detail is JSON only).
void write_report(std::ostream& os, std::span<const LabeledReport> reports, Format format);
void write_report(std::span<const LabeledReport> reports, const std::filesystem::path& path,
                  Format format);
std::vector<LabeledReport> load_reports(const std::filesystem::path& path, Format format);

struct LabeledRankTable {
  std::string target_date;
  std::string metric;
  RankTable table;

  friend bool operator==(const LabeledRankTable&, const LabeledRankTable&) = default;
};

void write_rank_tables(std::ostream& os, std::span<const LabeledRankTable> tables, Format format);
void write_rank_tables(std::span<const LabeledRankTable> tables, const std::filesystem::path& path,
                       Format format);
std::vector<LabeledRankTable> load_rank_tables(const std::filesystem::path& path, Format format);

}  // namespace alloscore
