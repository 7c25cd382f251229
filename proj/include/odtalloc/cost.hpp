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

#include "odtalloc/measures.hpp"

namespace odtalloc {

/// Dense task x agent cost table. Rows index tasks, columns index agents.
class CostMatrix {
 public:
  explicit CostMatrix(Matrix values);

  std::size_t n_tasks() const noexcept {
    return static_cast<std::size_t>(values_.rows());
  }
  std::size_t n_agents() const noexcept {
    return static_cast<std::size_t>(values_.cols());
  }
  double operator()(std::size_t i, std::size_t j) const {
    return values_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  const Matrix& values() const noexcept { return values_; }

  /// max|c_ij| and max c - min c; used to scale tolerances.
  double max_abs() const noexcept;
  double spread() const noexcept;

 private:
  Matrix values_;
};

/// Pickup + shipping + return: |o - y|^2 + |o - d|^2 + |d - y|^2.
double trip_cost(const Vector& o, const Vector& d, const Vector& y);

/// Gradient of trip_cost in the stacked task coordinates x = (o, d).
Vector grad_x(const Vector& o, const Vector& d, const Vector& y);

/// Gradient of trip_cost in the agent position: 4y - 2(o + d).
Vector grad_y(const Vector& o, const Vector& d, const Vector& y);

/// d^2 c / dx dy, the constant 2n x n matrix [-2I; -2I].
Matrix mixed_hessian(const Vector& o, const Vector& d, const Vector& y);

CostMatrix cost_matrix(const TaskSet& tasks, const DiscreteMeasure& agents);

/// c^_ij = -s_i^T y_j, the bilinear part of the trip cost.
CostMatrix reduced_cost_matrix(const DiscreteMeasure& index_measure,
                               const DiscreteMeasure& agents);

/// The marginal-only part K of the trip cost, so that for every coupling pi
/// with these marginals <c, pi> = K + 2 <c^, pi>.
double reduction_constant(const TaskSet& tasks, const DiscreteMeasure& agents);

// Per-atom pieces of K: c_ij = 2 c^_ij + task_offset(i) + agent_offset(j).
double task_offset(const Vector& o, const Vector& d);
double agent_offset(const Vector& y);

// ---------------------------------------------------------------------------
// Prior linear dynamics  x' = A x + B u  (time-invariant).

struct DynamicsSpec {
  Matrix a;  // n x n drift
  Matrix b;  // n x m input map
  double t0 = 0.0;
  double t1 = 1.0;
  int quadrature_steps = 1000;  // Simpson panels, must be even
};

struct Gramian {
  Matrix phi;  // state transition over [t0, t1]
  Matrix m;    // controllability Gramian, symmetric positive definite
};

/// Scaling-and-squaring with a degree-12 Taylor polynomial.
Matrix matrix_exponential(const Matrix& a);

/// Throws kNotControllable when lambda_min(M) <= 1e-10 lambda_max(M).
Gramian wpd_gramian(const DynamicsSpec& spec);

/// 1/2 (y - Phi x)^T M^{-1} (y - Phi x). Throws kSingularGramian.
double wpd_cost(const Vector& x, const Vector& y, const Matrix& phi,
                const Matrix& m);

struct Whitened {
  Vector x_hat;
  Vector y_hat;
};

/// x^ = M^{-1/2} Phi x, y^ = M^{-1/2} y with the symmetric inverse root.
Whitened whiten(const Vector& x, const Vector& y, const Matrix& phi,
                const Matrix& m);

}  // namespace odtalloc
