// Copyright 2026 The odtalloc Authors
//
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

#include "odtalloc/measures.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "odtalloc/error.hpp"

namespace odtalloc {

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kAllZero: return "AllZero";
    case ErrorCode::kNegativeWeight: return "NegativeWeight";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kOutOfRange: return "OutOfRange";
    case ErrorCode::kNotControllable: return "NotControllable";
    case ErrorCode::kSingularGramian: return "SingularGramian";
    case ErrorCode::kMassMismatch: return "MassMismatch";
    case ErrorCode::kIterationLimit: return "IterationLimit";
    case ErrorCode::kTooLarge: return "TooLarge";
    case ErrorCode::kInvalidSpec: return "InvalidSpec";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

std::vector<double> normalize(std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0 || std::isnan(w))
      fail(ErrorCode::kNegativeWeight, "weights must be nonnegative");
    total += w;
  }
  if (!(total > 0.0))
    fail(ErrorCode::kAllZero, "at least one weight must be positive");
  std::vector<double> out(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) out[i] = weights[i] / total;
  return out;
}

namespace {

double total_of(std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  return total;
}

std::vector<std::string> default_ids(std::size_t count, char prefix) {
  std::vector<std::string> ids;
  ids.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    ids.push_back(prefix + std::to_string(i));
  return ids;
}

void check_finite(const Vector& v, const char* what) {
  if (!v.allFinite())
    fail(ErrorCode::kInvalidArgument, std::string(what) + " must be finite");
}

}  // namespace

DiscreteMeasure::DiscreteMeasure(std::vector<Vector> points,
                                 std::span<const double> weights,
                                 std::vector<std::string> ids)
    : points_(std::move(points)), ids_(std::move(ids)) {
  if (points_.empty())
    fail(ErrorCode::kInvalidArgument, "a measure needs at least one point");
  if (weights.size() != points_.size())
    fail(ErrorCode::kDimensionMismatch,
         "weights and points must have the same length");
  dim_ = static_cast<int>(points_.front().size());
  if (dim_ < 1) fail(ErrorCode::kDimensionMismatch, "dimension must be >= 1");
  for (const auto& p : points_) {
    if (p.size() != dim_)
      fail(ErrorCode::kDimensionMismatch, "points have unequal dimension");
    check_finite(p, "points");
  }
  weights_ = normalize(weights);
  raw_total_ = total_of(weights);
  if (ids_.empty()) ids_ = default_ids(points_.size(), 'a');
  if (ids_.size() != points_.size())
    fail(ErrorCode::kDimensionMismatch, "ids and points must have the same length");
}

DiscreteMeasure DiscreteMeasure::from_normalized(std::vector<Vector> points,
                                                 std::vector<double> weights,
                                                 std::vector<std::string> ids) {
  DiscreteMeasure out(std::move(points), weights, std::move(ids));
  if (std::abs(out.raw_total_ - 1.0) > 1e-12)
    fail(ErrorCode::kInvalidArgument, "weights are not normalized");
  out.weights_ = std::move(weights);
  return out;
}

TaskSet::TaskSet(std::vector<Vector> origins, std::vector<Vector> destinations,
                 std::span<const double> weights, std::vector<std::string> ids)
    : origins_(std::move(origins)),
      destinations_(std::move(destinations)),
      ids_(std::move(ids)) {
  if (origins_.empty())
    fail(ErrorCode::kInvalidArgument, "a task set needs at least one task");
  if (destinations_.size() != origins_.size() ||
      weights.size() != origins_.size())
    fail(ErrorCode::kDimensionMismatch,
         "origins, destinations and weights must have equal length");
  dim_ = static_cast<int>(origins_.front().size());
  if (dim_ < 1) fail(ErrorCode::kDimensionMismatch, "dimension must be >= 1");
  for (std::size_t i = 0; i < origins_.size(); ++i) {
    if (origins_[i].size() != dim_ || destinations_[i].size() != dim_)
      fail(ErrorCode::kDimensionMismatch,
           "origin/destination vectors have unequal dimension");
    check_finite(origins_[i], "origins");
    check_finite(destinations_[i], "destinations");
  }
  weights_ = normalize(weights);
  raw_total_ = total_of(weights);
  if (ids_.empty()) ids_ = default_ids(origins_.size(), 't');
  if (ids_.size() != origins_.size())
    fail(ErrorCode::kDimensionMismatch, "ids and tasks must have the same length");
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(trim(std::string_view(line).substr(start)));
      break;
    }
    out.push_back(trim(std::string_view(line).substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

struct Row {
  std::size_t line_no;
  std::vector<std::string> fields;
};

// Returns header + body rows with comments/blank lines removed.
std::vector<Row> read_rows(const std::string& text) {
  std::vector<Row> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    rows.push_back({line_no, split_fields(t)});
  }
  if (rows.empty()) fail(ErrorCode::kParseError, "missing header row");
  return rows;
}

double parse_number(const std::string& field, std::size_t line_no) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (field.empty() || ec != std::errc() || ptr != last || !std::isfinite(value))
    fail(ErrorCode::kParseError, "line " + std::to_string(line_no) +
                                     ": not a finite number: '" + field + "'");
  return value;
}

// Checks that header[first .. first+count) reads prefix1..prefixN.
bool header_run(const std::vector<std::string>& header, std::size_t first,
                std::size_t count, char prefix) {
  for (std::size_t k = 0; k < count; ++k) {
    if (header[first + k] != prefix + std::to_string(k + 1)) return false;
  }
  return true;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIoError, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorCode::kIoError, "write failed for " + path.string());
}

void append_vector(std::string& out, const Vector& v) {
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    out += ',';
    out += format_double(v[k]);
  }
}

}  // namespace

DiscreteMeasure parse_agents_csv(const std::string& text) {
  auto rows = read_rows(text);
  const auto& header = rows.front().fields;
  if (header.size() < 3 || header.front() != "id" || header.back() != "weight")
    fail(ErrorCode::kParseError, "agents header must be id,y1,...,yn,weight");
  const std::size_t n = header.size() - 2;
  if (!header_run(header, 1, n, 'y'))
    fail(ErrorCode::kParseError, "agents header must be id,y1,...,yn,weight");

  std::vector<Vector> points;
  std::vector<double> weights;
  std::vector<std::string> ids;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.fields.size() != header.size())
      fail(ErrorCode::kDimensionMismatch,
           "line " + std::to_string(row.line_no) + ": expected " +
               std::to_string(header.size()) + " columns, got " +
               std::to_string(row.fields.size()));
    Vector p(static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k)
      p[static_cast<Eigen::Index>(k)] = parse_number(row.fields[1 + k], row.line_no);
    ids.push_back(row.fields.front());
    points.push_back(std::move(p));
    weights.push_back(parse_number(row.fields.back(), row.line_no));
  }
  if (points.empty()) fail(ErrorCode::kParseError, "agents file has no rows");
  return DiscreteMeasure(std::move(points), weights, std::move(ids));
}

TaskSet parse_tasks_csv(const std::string& text) {
  auto rows = read_rows(text);
  const auto& header = rows.front().fields;
  if (header.size() < 4 || header.front() != "id" || header.back() != "weight")
    fail(ErrorCode::kParseError, "tasks header must be id,o1..on,d1..dn,weight");
  std::size_t n_o = 0;
  while (1 + n_o < header.size() - 1 && !header[1 + n_o].empty() &&
         header[1 + n_o].front() == 'o')
    ++n_o;
  const std::size_t n_d = header.size() - 2 - n_o;
  if (!header_run(header, 1, n_o, 'o') || !header_run(header, 1 + n_o, n_d, 'd'))
    fail(ErrorCode::kParseError, "tasks header must be id,o1..on,d1..dn,weight");
  if (n_o != n_d || n_o == 0)
    fail(ErrorCode::kDimensionMismatch,
         "origin and destination arity differ in the tasks header");
  const std::size_t n = n_o;

  std::vector<Vector> origins, destinations;
  std::vector<double> weights;
  std::vector<std::string> ids;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.fields.size() != header.size())
      fail(ErrorCode::kDimensionMismatch,
           "line " + std::to_string(row.line_no) + ": expected " +
               std::to_string(header.size()) + " columns, got " +
               std::to_string(row.fields.size()));
    Vector o(static_cast<Eigen::Index>(n)), d(static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k) {
      o[static_cast<Eigen::Index>(k)] = parse_number(row.fields[1 + k], row.line_no);
      d[static_cast<Eigen::Index>(k)] =
          parse_number(row.fields[1 + n + k], row.line_no);
    }
    ids.push_back(row.fields.front());
    origins.push_back(std::move(o));
    destinations.push_back(std::move(d));
    weights.push_back(parse_number(row.fields.back(), row.line_no));
  }
  if (origins.empty()) fail(ErrorCode::kParseError, "tasks file has no rows");
  return TaskSet(std::move(origins), std::move(destinations), weights,
                 std::move(ids));
}

DiscreteMeasure load_agents_csv(const std::filesystem::path& path) {
  return parse_agents_csv(read_file(path));
}

TaskSet load_tasks_csv(const std::filesystem::path& path) {
  return parse_tasks_csv(read_file(path));
}

std::string format_agents_csv(const DiscreteMeasure& agents) {
  std::string out = "id";
  for (int k = 1; k <= agents.dim(); ++k) out += ",y" + std::to_string(k);
  out += ",weight\n";
  for (std::size_t j = 0; j < agents.size(); ++j) {
    out += agents.ids()[j];
    append_vector(out, agents.points()[j]);
    out += ',';
    out += format_double(agents.weights()[j]);
    out += '\n';
  }
  return out;
}

std::string format_tasks_csv(const TaskSet& tasks) {
  std::string out = "id";
  for (int k = 1; k <= tasks.dim(); ++k) out += ",o" + std::to_string(k);
  for (int k = 1; k <= tasks.dim(); ++k) out += ",d" + std::to_string(k);
  out += ",weight\n";
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    out += tasks.ids()[i];
    append_vector(out, tasks.origins()[i]);
    append_vector(out, tasks.destinations()[i]);
    out += ',';
    out += format_double(tasks.weights()[i]);
    out += '\n';
  }
  return out;
}

void save_agents_csv(const DiscreteMeasure& agents,
                     const std::filesystem::path& path) {
  write_file(path, format_agents_csv(agents));
}

void save_tasks_csv(const TaskSet& tasks, const std::filesystem::path& path) {
  write_file(path, format_tasks_csv(tasks));
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) fail(ErrorCode::kInvalidArgument, "unformattable number");
  return std::string(buf, ptr);
}

// ---------------------------------------------------------------------------

DiscreteMeasure index_pushforward(const TaskSet& tasks) {
  std::vector<Vector> index_points;
  index_points.reserve(tasks.size());
  for (std::size_t i = 0; i < tasks.size(); ++i)
    index_points.push_back(tasks.origins()[i] + tasks.destinations()[i]);
  return DiscreteMeasure::from_normalized(std::move(index_points),
                                          tasks.weights(), tasks.ids());
}

std::vector<Vector> project_lonlat(std::span<const LonLat> points, LonLat ref) {
  auto valid = [](LonLat p) {
    return std::isfinite(p.lon) && std::isfinite(p.lat) && p.lat >= -90.0 &&
           p.lat <= 90.0 && p.lon >= -180.0 && p.lon <= 180.0;
  };
  if (!valid(ref)) fail(ErrorCode::kOutOfRange, "reference point out of range");
  constexpr double kDeg = std::numbers::pi / 180.0;
  const double cos_ref = std::cos(ref.lat * kDeg);
  std::vector<Vector> out;
  out.reserve(points.size());
  for (const auto& p : points) {
    if (!valid(p)) fail(ErrorCode::kOutOfRange, "longitude/latitude out of range");
    Vector xy(2);
    xy[0] = kEarthRadiusMeters * (p.lon - ref.lon) * cos_ref * kDeg;
    xy[1] = kEarthRadiusMeters * (p.lat - ref.lat) * kDeg;
    out.push_back(std::move(xy));
  }
  return out;
}

}  // namespace odtalloc
