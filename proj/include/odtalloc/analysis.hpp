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

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "odtalloc/measures.hpp"
#include "odtalloc/solver.hpp"

namespace odtalloc {

struct ConditionReport {
  std::string condition;
  bool passed = false;
  std::size_t samples = 0;
  double worst_case = 0.0;
  std::optional<std::vector<double>> witness;
};

/// Samples (o, d, y, y') and checks grad_x(x, y) != grad_x(x, y').
/// worst_case is the smallest |grad_x(x,y) - grad_x(x,y')| / |y - y'|.
ConditionReport verify_twist(int dim, std::size_t samples, std::uint64_t seed);

/// Numeric rank of the mixed Hessian (threshold 1e-8 x largest singular
/// value). worst_case is the smallest observed n-th singular value.
ConditionReport verify_nondegeneracy(int dim, std::size_t samples,
                                     std::uint64_t seed);

using CostFunction = std::function<double(const Vector&, const Vector&)>;

/// c(x, y) + c(x', y') - c(x, y') - c(x', y).
double cross_difference(const CostFunction& cost, const Vector& x,
                        const Vector& x_prime, const Vector& y,
                        const Vector& y_prime);

/// The reduced cost -s^T y as a cost function.
CostFunction reduced_cost_function();

/// Samples ordered 1-D pairs s <= s', y <= y' and records the largest cross
/// difference of the reduced cost; passes iff it never exceeds 0.
ConditionReport verify_monge_1d(std::size_t samples, std::uint64_t seed);

/// Weighted empirical quantile with linear interpolation between order
/// statistics; node k sits at (mass before k) / (mass before the last atom),
/// which is R's type 7 for equal weights.
double empirical_quantile(std::span<const double> values,
                          std::span<const double> weights, double p);

/// Sub-level-set nestedness for 1-D instances. For grid values y (quantiles
/// of the agent measure), the threshold t(y) on the index s = o + d solves
/// mu{s >= t} = nu(-inf, y); the sets are nested iff t never increases.
ConditionReport check_nestedness_1d(const TaskSet& tasks,
                                    const DiscreteMeasure& agents,
                                    std::size_t grid);

/// Sort-and-pair (comonotone) coupling of two 1-D measures.
TransportPlan monotone_map_1d(const DiscreteMeasure& index_measure,
                              const DiscreteMeasure& agents);

/// Number of support pairs (i,k), (j,l) with s_i < s_j and y_k > y_l.
std::size_t count_crossings_1d(const TransportPlan& plan,
                               const DiscreteMeasure& index_measure,
                               const DiscreteMeasure& agents);

/// |4y - 2(o + d) - k|; zero iff (o, d) lies in the indifference set X(y, k).
double indifference_set_distance(const Vector& o, const Vector& d,
                                 const Vector& y, const Vector& k);

inline constexpr double kIndifferenceTolerance = 1e-9;

}  // namespace odtalloc
