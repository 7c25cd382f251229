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

#include <cstddef>
#include <span>
#include <vector>

#include "odtalloc/cost.hpp"
#include "odtalloc/measures.hpp"

namespace odtalloc {

struct PlanEntry {
  std::size_t task = 0;
  std::size_t agent = 0;
  double mass = 0.0;

  friend bool operator==(const PlanEntry&, const PlanEntry&) = default;
};

/// Sparse coupling over task x agent indices. Only positive masses are
/// stored, sorted by (task, agent).
struct TransportPlan {
  std::vector<PlanEntry> entries;
  double objective = 0.0;
  std::size_t n_tasks = 0;
  std::size_t n_agents = 0;

  std::vector<double> row_sums() const;
  std::vector<double> column_sums() const;
};

struct DualPotentials {
  std::vector<double> u;  // per task
  std::vector<double> v;  // per agent
};

struct ExactSolution {
  TransportPlan plan;
  DualPotentials duals;
  std::size_t pivots = 0;
};

/// Transportation simplex.
///
/// North-west-corner start; entering cell by most negative reduced cost,
/// switching to Bland's rule (first negative cell in row-major order) after
/// 3(m + n) consecutive degenerate pivots. Leaving-cell ties go to the
/// smallest row, then the smallest column. Duals are anchored at u[0] = 0.
/// Throws kMassMismatch if the totals differ by more than 1e-9.
ExactSolution solve_exact(const CostMatrix& cost, std::span<const double> mu,
                          std::span<const double> nu);

struct EntropicOptions {
  double epsilon = 1.0;
  double tol = 1e-8;
  int max_iter = 10000;
};

struct EntropicSolution {
  TransportPlan plan;
  DualPotentials potentials;  // log-domain scalings, anchored at u[0] = 0
  int iterations = 0;
  double violation = 0.0;
};

/// Log-domain Sinkhorn with epsilon annealing down to options.epsilon.
/// The plan objective is <c, pi> against `cost` (no entropy term).
/// Throws IterationLimitError if the marginal violation stays >= tol.
EntropicSolution solve_entropic(const CostMatrix& cost, std::span<const double> mu,
                                std::span<const double> nu,
                                const EntropicOptions& options);

/// Exhaustive oracle. Uniform square instances up to 8 x 8 enumerate
/// permutations; otherwise n_tasks + n_agents <= 8 enumerates every basis.
TransportPlan brute_force_small(const CostMatrix& cost, std::span<const double> mu,
                                std::span<const double> nu);

struct StabilityReport {
  double max_violation = 0.0;         // max over all cells of u + v - c
  double max_slack_on_support = 0.0;  // max over support of |u + v - c|
  bool passed = false;
};

StabilityReport check_stability(const TransportPlan& plan,
                                const DualPotentials& duals,
                                const CostMatrix& cost, double tol);

/// Fraction of task mass sent (up to tol) to a single agent.
double purity(const TransportPlan& plan, double tol);

double plan_cost(const TransportPlan& plan, const CostMatrix& cost);

/// max over rows and columns of |plan marginal - target|.
double marginal_violation(const TransportPlan& plan, std::span<const double> mu,
                          std::span<const double> nu);

/// Re-solves with a seeded 1e-10 relative perturbation of the costs and
/// reports whether the support is unchanged.
bool support_is_stable(const CostMatrix& cost, std::span<const double> mu,
                       std::span<const double> nu, const TransportPlan& plan);

struct ReducedSolution {
  TransportPlan plan;          // objective is the full trip cost
  DualPotentials duals;        // lifted to the full cost, anchored u[0] = 0
  double reduced_objective = 0.0;
  double constant = 0.0;       // reduction_constant(tasks, agents)
};

/// Solves the bilinear problem min <-s^T y, pi> on the index measure and
/// maps it back: objective_full = K + 2 * reduced objective.
ReducedSolution solve_via_reduction(const TaskSet& tasks,
                                    const DiscreteMeasure& agents);

}  // namespace odtalloc
