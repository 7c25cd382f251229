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

#include "odtalloc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "odtalloc/cost.hpp"
#include "odtalloc/error.hpp"
#include "odtalloc/rng.hpp"

namespace odtalloc {

namespace {

Vector random_vector(Rng& rng, int dim, double scale = 10.0) {
  Vector v(dim);
  for (int k = 0; k < dim; ++k) v[k] = rng.uniform(-scale, scale);
  return v;
}

void require_samples(int dim, std::size_t samples) {
  if (dim < 1) fail(ErrorCode::kInvalidArgument, "dim must be >= 1");
  if (samples < 1) fail(ErrorCode::kInvalidArgument, "samples must be >= 1");
}

std::vector<double> flatten(std::initializer_list<const Vector*> parts) {
  std::vector<double> out;
  for (const Vector* v : parts) out.insert(out.end(), v->data(), v->data() + v->size());
  return out;
}

}  // namespace

ConditionReport verify_twist(int dim, std::size_t samples, std::uint64_t seed) {
  require_samples(dim, samples);
  Rng rng(seed);
  ConditionReport report{"twist", true, samples,
                         std::numeric_limits<double>::infinity(), std::nullopt};
  for (std::size_t s = 0; s < samples; ++s) {
    const Vector o = random_vector(rng, dim), d = random_vector(rng, dim);
    const Vector y = random_vector(rng, dim);
    Vector y2 = random_vector(rng, dim);
    while ((y - y2).norm() < 1e-9) y2 = random_vector(rng, dim);
    const double gap = (grad_x(o, d, y) - grad_x(o, d, y2)).norm();
    const double ratio = gap / (y - y2).norm();
    if (!(gap > 0.0)) report.passed = false;
    if (ratio < report.worst_case) {
      report.worst_case = ratio;
      report.witness = flatten({&o, &d, &y, &y2});
    }
  }
  return report;
}

ConditionReport verify_nondegeneracy(int dim, std::size_t samples,
                                     std::uint64_t seed) {
  require_samples(dim, samples);
  Rng rng(seed);
  ConditionReport report{"nondegeneracy", true, samples,
                         std::numeric_limits<double>::infinity(), std::nullopt};
  for (std::size_t s = 0; s < samples; ++s) {
    const Vector o = random_vector(rng, dim), d = random_vector(rng, dim);
    const Vector y = random_vector(rng, dim);
    Eigen::JacobiSVD<Matrix> svd(mixed_hessian(o, d, y));
    const Vector& sv = svd.singularValues();
    const double cutoff = 1e-8 * sv[0];
    const auto rank = (sv.array() > cutoff).count();
    if (rank != dim) report.passed = false;
    const double nth = sv[dim - 1];
    if (nth < report.worst_case) {
      report.worst_case = nth;
      report.witness = flatten({&o, &d, &y});
    }
  }
  return report;
}

double cross_difference(const CostFunction& cost, const Vector& x,
                        const Vector& x_prime, const Vector& y,
                        const Vector& y_prime) {
  // Grouped so that x == x' or y == y' cancels exactly.
  return (cost(x, y) - cost(x, y_prime)) - (cost(x_prime, y) - cost(x_prime, y_prime));
}

CostFunction reduced_cost_function() {
  return [](const Vector& s, const Vector& y) {
    if (s.size() != y.size())
      fail(ErrorCode::kDimensionMismatch, "index and agent differ in dimension");
    return -s.dot(y);
  };
}

ConditionReport verify_monge_1d(std::size_t samples, std::uint64_t seed) {
  require_samples(1, samples);
  Rng rng(seed);
  const CostFunction cost = reduced_cost_function();
  ConditionReport report{"monge", true, samples,
                         -std::numeric_limits<double>::infinity(), std::nullopt};
  for (std::size_t k = 0; k < samples; ++k) {
    double a = rng.uniform(-10, 10), b = rng.uniform(-10, 10);
    double c = rng.uniform(-10, 10), d = rng.uniform(-10, 10);
    Vector s(1), s2(1), y(1), y2(1);
    s[0] = std::min(a, b);
    s2[0] = std::max(a, b);
    y[0] = std::min(c, d);
    y2[0] = std::max(c, d);
    const double diff = cross_difference(cost, s, s2, y, y2);
    if (diff > report.worst_case) {
      report.worst_case = diff;
      report.witness = flatten({&s, &s2, &y, &y2});
    }
  }
  report.passed = report.worst_case <= 0.0;
  return report;
}

double empirical_quantile(std::span<const double> values,
                          std::span<const double> weights, double p) {
  if (values.empty() || values.size() != weights.size())
    fail(ErrorCode::kDimensionMismatch, "quantile needs matching values and weights");
  if (!(p >= 0.0 && p <= 1.0)) fail(ErrorCode::kOutOfRange, "quantile level outside [0, 1]");
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  const std::size_t n = order.size();
  if (n == 1) return values[order[0]];

  // Node positions: mass strictly before each atom, scaled so the last atom
  // sits at 1.
  std::vector<double> node(n);
  double before = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    node[k] = before;
    before += weights[order[k]];
  }
  const double span = node[n - 1];
  if (!(span > 0.0)) return values[order[n - 1]];
  for (auto& x : node) x /= span;

  // Last node at or below p, then interpolate towards the next larger node.
  std::size_t lo = 0;
  for (std::size_t k = 0; k < n; ++k)
    if (node[k] <= p) lo = k;
  if (lo == n - 1) return values[order[n - 1]];
  std::size_t hi = lo + 1;
  while (hi < n - 1 && node[hi] <= node[lo]) ++hi;
  const double width = node[hi] - node[lo];
  const double t = width > 0.0 ? (p - node[lo]) / width : 0.0;
  return values[order[lo]] + t * (values[order[hi]] - values[order[lo]]);
}

ConditionReport check_nestedness_1d(const TaskSet& tasks,
                                    const DiscreteMeasure& agents,
                                    std::size_t grid) {
  if (tasks.dim() != 1 || agents.dim() != 1)
    fail(ErrorCode::kDimensionMismatch, "nestedness is checked for 1-D instances only");
  if (grid < 2) fail(ErrorCode::kInvalidArgument, "grid must have at least 2 points");

  std::vector<double> index(tasks.size()), ys(agents.size());
  for (std::size_t i = 0; i < tasks.size(); ++i)
    index[i] = tasks.origins()[i][0] + tasks.destinations()[i][0];
  for (std::size_t j = 0; j < agents.size(); ++j) ys[j] = agents.points()[j][0];

  ConditionReport report{"nestedness", true, grid,
                         -std::numeric_limits<double>::infinity(), std::nullopt};
  double previous_threshold = 0.0, previous_y = 0.0;
  for (std::size_t g = 0; g < grid; ++g) {
    const double level = static_cast<double>(g) / static_cast<double>(grid - 1);
    const double y = empirical_quantile(ys, agents.weights(), level);
    double below = 0.0;  // nu((-inf, y))
    for (std::size_t j = 0; j < ys.size(); ++j)
      if (ys[j] < y) below += agents.weights()[j];
    below = std::min(below, 1.0);
    const double threshold = empirical_quantile(index, tasks.weights(), 1.0 - below);
    if (g > 0) {
      const double rise = threshold - previous_threshold;
      if (rise > report.worst_case) {
        report.worst_case = rise;
        report.witness = std::vector<double>{previous_y, y, previous_threshold, threshold};
      }
    }
    previous_threshold = threshold;
    previous_y = y;
  }
  report.passed = report.worst_case <= 0.0;
  return report;
}

TransportPlan monotone_map_1d(const DiscreteMeasure& index_measure,
                              const DiscreteMeasure& agents) {
  if (index_measure.dim() != 1 || agents.dim() != 1)
    fail(ErrorCode::kDimensionMismatch, "monotone map needs 1-D measures");
  auto sorted_order = [](const DiscreteMeasure& m) {
    std::vector<std::size_t> order(m.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return m.points()[a][0] < m.points()[b][0];
    });
    return order;
  };
  const auto rows = sorted_order(index_measure);
  const auto cols = sorted_order(agents);
  std::vector<double> supply(rows.size()), demand(cols.size());
  for (std::size_t k = 0; k < rows.size(); ++k) supply[k] = index_measure.weights()[rows[k]];
  for (std::size_t k = 0; k < cols.size(); ++k) demand[k] = agents.weights()[cols[k]];

  TransportPlan plan;
  plan.n_tasks = index_measure.size();
  plan.n_agents = agents.size();
  std::size_t a = 0, b = 0;
  while (a < rows.size() && b < cols.size()) {
    const double x = std::min(supply[a], demand[b]);
    if (x > 0.0) plan.entries.push_back({rows[a], cols[b], x});
    supply[a] -= x;
    demand[b] -= x;
    if (supply[a] <= 0.0) {
      ++a;
    } else {
      ++b;
    }
  }
  std::sort(plan.entries.begin(), plan.entries.end(),
            [](const PlanEntry& l, const PlanEntry& r) {
              return std::pair(l.task, l.agent) < std::pair(r.task, r.agent);
            });
  double objective = 0.0;
  for (const auto& e : plan.entries)
    objective += e.mass * -(index_measure.points()[e.task][0] * agents.points()[e.agent][0]);
  plan.objective = objective;
  return plan;
}

std::size_t count_crossings_1d(const TransportPlan& plan,
                               const DiscreteMeasure& index_measure,
                               const DiscreteMeasure& agents) {
  if (index_measure.dim() != 1 || agents.dim() != 1)
    fail(ErrorCode::kDimensionMismatch, "crossing check needs 1-D measures");
  std::size_t crossings = 0;
  for (const auto& p : plan.entries)
    for (const auto& q : plan.entries) {
      const double s1 = index_measure.points()[p.task][0];
      const double s2 = index_measure.points()[q.task][0];
      const double y1 = agents.points()[p.agent][0];
      const double y2 = agents.points()[q.agent][0];
      if (s1 < s2 && y1 > y2) ++crossings;
    }
  return crossings;
}

double indifference_set_distance(const Vector& o, const Vector& d,
                                 const Vector& y, const Vector& k) {
  if (k.size() != y.size())
    fail(ErrorCode::kDimensionMismatch, "level k differs in dimension");
  return (grad_y(o, d, y) - k).norm();
}

}  // namespace odtalloc
