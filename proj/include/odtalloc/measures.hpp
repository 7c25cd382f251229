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

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace odtalloc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Divides by the total. Throws kNegativeWeight / kAllZero.
std::vector<double> normalize(std::span<const double> weights);

/// Weighted point cloud in R^n (the agent distribution).
///
/// Immutable after construction. Weights are always normalized; the
/// pre-normalization total is kept in raw_total() for reporting.
class DiscreteMeasure {
 public:
  /// Validates arity and weights. Empty `ids` yields "a0", "a1", ...
  DiscreteMeasure(std::vector<Vector> points, std::span<const double> weights,
                  std::vector<std::string> ids = {});

  /// Takes weights that already sum to 1 (within 1e-12) without rescaling
  /// them, so the stored list is bitwise equal to the input.
  static DiscreteMeasure from_normalized(std::vector<Vector> points,
                                         std::vector<double> weights,
                                         std::vector<std::string> ids = {});

  std::size_t size() const noexcept { return points_.size(); }
  int dim() const noexcept { return dim_; }
  const std::vector<Vector>& points() const noexcept { return points_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  const std::vector<std::string>& ids() const noexcept { return ids_; }
  double raw_total() const noexcept { return raw_total_; }

 private:
  std::vector<Vector> points_;
  std::vector<double> weights_;
  std::vector<std::string> ids_;
  int dim_ = 0;
  double raw_total_ = 0.0;
};

/// Weighted origin/destination pairs; each task lives in R^{2n}.
class TaskSet {
 public:
  TaskSet(std::vector<Vector> origins, std::vector<Vector> destinations,
          std::span<const double> weights, std::vector<std::string> ids = {});

  std::size_t size() const noexcept { return origins_.size(); }
  int dim() const noexcept { return dim_; }
  const std::vector<Vector>& origins() const noexcept { return origins_; }
  const std::vector<Vector>& destinations() const noexcept {
    return destinations_;
  }
  const std::vector<double>& weights() const noexcept { return weights_; }
  const std::vector<std::string>& ids() const noexcept { return ids_; }
  double raw_total() const noexcept { return raw_total_; }

 private:
  std::vector<Vector> origins_;
  std::vector<Vector> destinations_;
  std::vector<double> weights_;
  std::vector<std::string> ids_;
  int dim_ = 0;
  double raw_total_ = 0.0;
};

// CSV ingestion. Agents: `id,y1,...,yn,weight`. Tasks: `id,o1..on,d1..dn,weight`.
// Blank lines and lines starting with '#' are skipped. Errors report the
// 1-based line number of the offending row.
DiscreteMeasure load_agents_csv(const std::filesystem::path& path);
TaskSet load_tasks_csv(const std::filesystem::path& path);
DiscreteMeasure parse_agents_csv(const std::string& text);
TaskSet parse_tasks_csv(const std::string& text);

// Numbers are written in shortest round-trip form, so output is byte-stable.
std::string format_agents_csv(const DiscreteMeasure& agents);
std::string format_tasks_csv(const TaskSet& tasks);
void save_agents_csv(const DiscreteMeasure& agents,
                     const std::filesystem::path& path);
void save_tasks_csv(const TaskSet& tasks, const std::filesystem::path& path);

/// Index points s_i = o_i + d_i with the task weights and ids unchanged.
///
/// The index of a task is -(o + d); the sign is folded into the reduced cost
/// -s^T y instead, so s here is twice the OD midpoint.
DiscreteMeasure index_pushforward(const TaskSet& tasks);

inline constexpr double kEarthRadiusMeters = 6371000.0;

struct LonLat {
  double lon = 0.0;
  double lat = 0.0;
};

/// Local equirectangular projection around `ref`, in meters.
std::vector<Vector> project_lonlat(std::span<const LonLat> points, LonLat ref);

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

}  // namespace odtalloc
