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

#include "alloscore/hubio.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "alloscore/errors.hpp"
#include "json.hpp"

namespace alloscore {

namespace {

using Json = nlohmann::ordered_json;

// Splits one CSV line. Double-quoted fields may contain commas; "" inside
// quotes is a literal quote.
std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  out.push_back(std::move(field));
  return out;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string join_header(const std::vector<std::string>& columns) {
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out.push_back(',');
    out += columns[i];
  }
  return out;
}

class CsvReader {
 public:
  CsvReader(const std::filesystem::path& path, const std::vector<std::string>& header)
      : path_(path.string()), in_(path) {
    if (!in_) throw IoError("cannot open " + path_);
    std::string line;
    while (std::getline(in_, line)) {
      ++line_;
      strip(line);
      if (line.empty()) continue;
      if (line_ == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
      if (line != join_header(header)) {
        throw ParseError(path_, line_, "expected header '" + join_header(header) + "'");
      }
      width_ = header.size();
      return;
    }
  }

  bool next(std::vector<std::string>& fields) {
    if (width_ == 0) return false;
    std::string line;
    while (std::getline(in_, line)) {
      ++line_;
      strip(line);
      if (line.empty()) continue;
      fields = split_csv(line);
      if (fields.size() != width_) {
        fail("expected " + std::to_string(width_) + " fields, found " +
             std::to_string(fields.size()));
      }
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(path_, line_, what); }

  double number(const std::string& field, const char* column) const {
    double v = 0.0;
    const char* first = field.data();
    const char* last = first + field.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (field.empty() || ec != std::errc() || ptr != last) {
      fail(std::string("column ") + column + ": not a number: '" + field + "'");
    }
    if (!std::isfinite(v)) fail(std::string("column ") + column + ": non-finite value");
    return v;
  }

  std::string date(const std::string& field, const char* column) const {
    int y = 0;
    unsigned m = 0;
    unsigned d = 0;
    char dash1 = 0;
    char dash2 = 0;
    std::istringstream is(field);
    if (field.size() == 10 && (is >> y >> dash1 >> m >> dash2 >> d) && dash1 == '-' &&
        dash2 == '-' && is.peek() == std::char_traits<char>::eof()) {
      const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                            std::chrono::day{d}};
      if (ymd.ok()) return field;
    }
    fail(std::string("column ") + column + ": not an ISO-8601 date: '" + field + "'");
  }

  std::string nonempty(const std::string& field, const char* column) const {
    if (field.empty()) fail(std::string("column ") + column + ": empty");
    return field;
  }

  const std::string& path() const { return path_; }

 private:
  static void strip(std::string& line) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) {
      line.pop_back();
    }
  }

  std::string path_;
  std::ifstream in_;
  std::size_t line_ = 0;
  std::size_t width_ = 0;
};

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

Json cell_to_json(const Table::Cell& c) {
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  if (const auto* d = std::get_if<double>(&c)) {
    if (!std::isfinite(*d)) return nullptr;
    return *d;
  }
  return nullptr;
}

Table::Cell optional_cell(const std::optional<double>& v) {
  if (v) return *v;
  return std::monostate{};
}

// JSON field access with a readable failure.
template <class T>
T field(const Json& obj, const char* key, const std::string& path) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ParseError(path, 0, std::string("missing field '") + key + "'");
  }
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path, 0, std::string("field '") + key + "': " + e.what());
  }
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string(), 0, e.what());
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Loading.

const QuantileSet* ForecastSubmission::find(const std::string& location) const {
  auto it = std::lower_bound(locations.begin(), locations.end(), location);
  if (it == locations.end() || *it != location) return nullptr;
  return &quantiles[static_cast<std::size_t>(it - locations.begin())];
}

std::size_t ForecastSubmission::record_count() const {
  std::size_t n = 0;
  for (const auto& q : quantiles) n += q.size();
  return n;
}

ForecastTable load_forecasts(const std::filesystem::path& path, const ForecastLoadOptions& options) {
  CsvReader csv(path, {"model", "location", "target_date", "quantile_level", "value"});

  // (model, date) -> location -> level -> value
  std::map<ForecastKey, std::map<std::string, std::map<double, double>>> raw;
  ForecastTable table;
  std::vector<std::string> f;
  while (csv.next(f)) {
    ForecastRecord r{csv.nonempty(f[0], "model"), csv.nonempty(f[1], "location"),
                     csv.date(f[2], "target_date"), csv.number(f[3], "quantile_level"),
                     csv.number(f[4], "value")};
    if (!(r.level > 0.0 && r.level < 1.0)) csv.fail("quantile_level outside (0, 1)");
    auto& by_level = raw[{r.model, r.target_date}][r.location];
    if (!by_level.emplace(r.level, r.value).second) {
      throw DuplicateRecord(csv.path() + ": duplicate forecast for model " + r.model +
                            ", location " + r.location + ", date " + r.target_date + ", level " +
                            format_number(r.level));
    }
    ++table.records_read;
  }

  for (auto& [key, by_location] : raw) {
    ForecastSubmission sub;
    for (auto& [location, by_level] : by_location) {
      std::vector<double> levels;
      std::vector<double> values;
      for (const auto& [level, value] : by_level) {
        if (!values.empty() && value < values.back()) {
          throw CrossedQuantiles(csv.path() + ": crossed quantiles for model " + key.model +
                                 ", location " + location + ", date " + key.target_date +
                                 ": level " + format_number(level) + " has value " +
                                 format_number(value) + " below " + format_number(values.back()));
        }
        levels.push_back(level);
        values.push_back(value);
      }
      sub.locations.push_back(location);
      sub.quantiles.emplace_back(std::move(levels), std::move(values));
    }
    table.groups.emplace(key, std::move(sub));
  }

  // Completeness per target date.
  std::map<std::string, std::set<std::string>> required;
  if (!options.required_locations.empty()) {
    const std::set<std::string> req(options.required_locations.begin(),
                                    options.required_locations.end());
    for (const auto& [key, sub] : table.groups) required[key.target_date] = req;
  } else {
    for (const auto& [key, sub] : table.groups) {
      required[key.target_date].insert(sub.locations.begin(), sub.locations.end());
    }
  }

  for (auto it = table.groups.begin(); it != table.groups.end();) {
    const auto& req = required[it->first.target_date];
    ForecastSubmission& sub = it->second;
    // Locations outside an explicit requirement are not part of the evaluation.
    ForecastSubmission kept;
    for (std::size_t i = 0; i < sub.locations.size(); ++i) {
      if (req.count(sub.locations[i])) {
        kept.locations.push_back(sub.locations[i]);
        kept.quantiles.push_back(sub.quantiles[i]);
      } else {
        table.records_rejected += sub.quantiles[i].size();
      }
    }
    sub = std::move(kept);

    std::string missing;
    for (const auto& loc : req) {
      if (!sub.find(loc)) {
        missing = loc;
        break;
      }
    }
    if (missing.empty()) {
      ++it;
      continue;
    }
    if (!options.drop_incomplete) {
      throw MissingLocation("model " + it->first.model + " has no forecast for location " +
                            missing + " on " + it->first.target_date);
    }
    table.records_rejected += sub.record_count();
    it = table.groups.erase(it);
  }
  return table;
}

TruthTable load_truth(const std::filesystem::path& path) {
  CsvReader csv(path, {"location", "date", "value"});
  TruthTable table;
  std::vector<std::string> f;
  while (csv.next(f)) {
    TruthRecord r{csv.nonempty(f[0], "location"), csv.date(f[1], "date"), csv.number(f[2], "value")};
    if (r.value < 0.0) csv.fail("truth value is negative");
    if (!table.emplace(std::make_pair(r.location, r.date), r.value).second) {
      throw DuplicateRecord(csv.path() + ": duplicate truth for location " + r.location + ", date " +
                            r.date);
    }
  }
  return table;
}

PopulationTable load_population(const std::filesystem::path& path) {
  CsvReader csv(path, {"location", "population"});
  PopulationTable table;
  std::vector<std::string> f;
  while (csv.next(f)) {
    PopulationRecord r{csv.nonempty(f[0], "location"), csv.number(f[1], "population")};
    if (!(r.population > 0.0)) csv.fail("population must be positive");
    if (!table.emplace(r.location, r.population).second) {
      throw DuplicateRecord(csv.path() + ": duplicate population for location " + r.location);
    }
  }
  return table;
}

Allocation per_capita_allocation(const PopulationTable& pop,
                                 const std::vector<std::string>& locations, double k) {
  if (!(k > 0.0) || !std::isfinite(k)) throw InvalidArgument("resource constraint must be positive");
  if (locations.empty()) throw InvalidArgument("per-capita allocation over no locations");
  std::vector<double> weights;
  weights.reserve(locations.size());
  double total = 0.0;
  for (const auto& loc : locations) {
    auto it = pop.find(loc);
    if (it == pop.end()) throw MissingLocation("no population for location " + loc);
    weights.push_back(it->second);
    total += it->second;
  }
  Allocation x;
  x.constraint = k;
  x.amounts.reserve(weights.size());
  for (double w : weights) x.amounts.push_back(k * (w / total));
  return x;
}

// ---------------------------------------------------------------------------
// Writing.

Format parse_format(const std::string& name) {
  if (name == "csv") return Format::kCsv;
  if (name == "json") return Format::kJson;
  throw InvalidArgument("unknown format '" + name + "' (expected csv or json)");
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void write_table(std::ostream& os, const Table& table, Format format) {
  if (format == Format::kCsv) {
    os << join_header(table.columns) << '\n';
    for (const auto& row : table.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) os << ',';
        std::visit(
            [&os](const auto& c) {
              using T = std::decay_t<decltype(c)>;
              if constexpr (std::is_same_v<T, std::string>) {
                os << csv_escape(c);
              } else if constexpr (std::is_same_v<T, double>) {
                os << format_number(c);
              }
            },
            row[i]);
      }
      os << '\n';
    }
    return;
  }
  Json arr = Json::array();
  for (const auto& row : table.rows) {
    Json obj = Json::object();
    for (std::size_t i = 0; i < row.size() && i < table.columns.size(); ++i) {
      obj[table.columns[i]] = cell_to_json(row[i]);
    }
    arr.push_back(std::move(obj));
  }
  os << arr.dump(2) << '\n';
}

namespace {

const std::vector<std::string> kReportColumns = {
    "model", "target_date", "K", "L", "raw_score", "oracle_loss", "allocation_score", "shared_level"};

const std::vector<std::string> kRankColumns = {"target_date", "metric", "model", "score",
                                               "standardized_rank"};

}  // namespace

void write_report(std::ostream& os, std::span<const LabeledReport> reports, Format format) {
  if (format == Format::kCsv) {
    Table t;
    t.columns = kReportColumns;
    for (const auto& r : reports) {
      const auto& s = r.report;
      t.rows.push_back({r.model, r.target_date, s.k, s.loss, s.raw_score, s.oracle_loss,
                        s.allocation_score, optional_cell(s.shared_level)});
    }
    write_table(os, t, format);
    return;
  }
  Json arr = Json::array();
  for (const auto& r : reports) {
    const auto& s = r.report;
    Json obj;
    obj["model"] = r.model;
    obj["target_date"] = r.target_date;
    obj["K"] = s.k;
    obj["L"] = s.loss;
    obj["raw_score"] = s.raw_score;
    obj["oracle_loss"] = s.oracle_loss;
    obj["allocation_score"] = s.allocation_score;
    obj["shared_level"] = s.shared_level ? Json(*s.shared_level) : Json(nullptr);
    Json locs = Json::array();
    for (const auto& l : s.per_location) {
      Json lj;
      lj["location"] = l.location;
      lj["allocated"] = l.allocated;
      lj["observed"] = l.observed;
      lj["unmet"] = l.unmet;
      locs.push_back(std::move(lj));
    }
    obj["per_location"] = std::move(locs);
    arr.push_back(std::move(obj));
  }
  os << arr.dump(2) << '\n';
}

void write_report(std::span<const LabeledReport> reports, const std::filesystem::path& path,
                  Format format) {
  auto out = open_output(path);
  write_report(out, reports, format);
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<LabeledReport> load_reports(const std::filesystem::path& path, Format format) {
  std::vector<LabeledReport> out;
  if (format == Format::kCsv) {
    CsvReader csv(path, kReportColumns);
    std::vector<std::string> f;
    while (csv.next(f)) {
      LabeledReport r;
      r.model = f[0];
      r.target_date = f[1];
      r.report.k = csv.number(f[2], "K");
      r.report.loss = csv.number(f[3], "L");
      r.report.raw_score = csv.number(f[4], "raw_score");
      r.report.oracle_loss = csv.number(f[5], "oracle_loss");
      r.report.allocation_score = csv.number(f[6], "allocation_score");
      if (!f[7].empty()) r.report.shared_level = csv.number(f[7], "shared_level");
      out.push_back(std::move(r));
    }
    return out;
  }
  const Json doc = read_json(path);
  if (!doc.is_array()) throw ParseError(path.string(), 0, "expected a JSON array of reports");
  const std::string p = path.string();
  for (const auto& obj : doc) {
    LabeledReport r;
    r.model = field<std::string>(obj, "model", p);
    r.target_date = field<std::string>(obj, "target_date", p);
    r.report.k = field<double>(obj, "K", p);
    r.report.loss = field<double>(obj, "L", p);
    r.report.raw_score = field<double>(obj, "raw_score", p);
    r.report.oracle_loss = field<double>(obj, "oracle_loss", p);
    r.report.allocation_score = field<double>(obj, "allocation_score", p);
    if (obj.contains("shared_level") && !obj.at("shared_level").is_null()) {
      r.report.shared_level = field<double>(obj, "shared_level", p);
    }
    if (obj.contains("per_location")) {
      for (const auto& l : obj.at("per_location")) {
        r.report.per_location.push_back({field<std::string>(l, "location", p),
                                         field<double>(l, "allocated", p),
                                         field<double>(l, "observed", p),
                                         field<double>(l, "unmet", p)});
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

void write_rank_tables(std::ostream& os, std::span<const LabeledRankTable> tables, Format format) {
  if (format == Format::kCsv) {
    Table t;
    t.columns = kRankColumns;
    for (const auto& lt : tables) {
      for (const auto& e : lt.table.entries) {
        t.rows.push_back({lt.target_date, lt.metric, e.model, e.score, e.standardized_rank});
      }
    }
    write_table(os, t, format);
    return;
  }
  Json arr = Json::array();
  for (const auto& lt : tables) {
    Json obj;
    obj["target_date"] = lt.target_date;
    obj["metric"] = lt.metric;
    Json entries = Json::array();
    for (const auto& e : lt.table.entries) {
      Json ej;
      ej["model"] = e.model;
      ej["score"] = e.score;
      ej["standardized_rank"] = e.standardized_rank;
      entries.push_back(std::move(ej));
    }
    obj["entries"] = std::move(entries);
    arr.push_back(std::move(obj));
  }
  os << arr.dump(2) << '\n';
}

void write_rank_tables(std::span<const LabeledRankTable> tables, const std::filesystem::path& path,
                       Format format) {
  auto out = open_output(path);
  write_rank_tables(out, tables, format);
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<LabeledRankTable> load_rank_tables(const std::filesystem::path& path, Format format) {
  std::vector<LabeledRankTable> out;
  if (format == Format::kCsv) {
    CsvReader csv(path, kRankColumns);
    std::vector<std::string> f;
    while (csv.next(f)) {
      if (out.empty() || out.back().target_date != f[0] || out.back().metric != f[1]) {
        out.push_back({f[0], f[1], {}});
      }
      out.back().table.entries.push_back(
          {f[2], csv.number(f[3], "score"), csv.number(f[4], "standardized_rank")});
    }
    return out;
  }
  const Json doc = read_json(path);
  if (!doc.is_array()) throw ParseError(path.string(), 0, "expected a JSON array of rank tables");
  const std::string p = path.string();
  for (const auto& obj : doc) {
    LabeledRankTable lt{field<std::string>(obj, "target_date", p),
                        field<std::string>(obj, "metric", p), {}};
    if (obj.contains("entries")) {
      for (const auto& e : obj.at("entries")) {
        lt.table.entries.push_back({field<std::string>(e, "model", p),
                                    field<double>(e, "score", p),
                                    field<double>(e, "standardized_rank", p)});
      }
    }
    out.push_back(std::move(lt));
  }
  return out;
}

}  // namespace alloscore
