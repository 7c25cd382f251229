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

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <tuple>

#include "odtalloc/error.hpp"
#include "odtalloc/solver.hpp"
#include "solver_internal.hpp"

namespace odtalloc {

namespace {

struct BasicCell {
  std::size_t row;
  std::size_t col;
  double mass;
};

// Spanning-tree basis of the transportation LP. Nodes 0..m-1 are tasks,
// m..m+n-1 are agents; every basic cell is a tree edge.
class TransportationSimplex {
 public:
  TransportationSimplex(const CostMatrix& cost, std::span<const double> mu,
                        std::span<const double> nu)
      : m_(cost.n_tasks()),
        n_(cost.n_agents()),
        cost_(m_ * n_),
        adjacency_(m_ + n_),
        u_(m_),
        v_(n_),
        parent_cell_(m_ + n_),
        visited_(m_ + n_),
        order_(m_ + n_) {
    for (std::size_t i = 0; i < m_; ++i)
      for (std::size_t j = 0; j < n_; ++j) cost_[i * n_ + j] = cost(i, j);
    entering_tol_ = 1e-11 * std::max(1.0, cost.max_abs());
    north_west_corner(mu, nu);
  }

  std::size_t run() {
    const std::size_t bland_after = 3 * (m_ + n_);
    const std::size_t max_pivots = 1000 * (m_ + n_) + 100000;
    std::size_t degenerate_run = 0;
    std::size_t pivots = 0;
    while (true) {
      compute_duals();
      const bool bland = degenerate_run >= bland_after;
      auto [row, col] = bland ? bland_entering() : dantzig_entering();
      if (row == kNone) break;
      const double theta = pivot(row, col);
      degenerate_run = theta > 0.0 ? 0 : degenerate_run + 1;
      if (++pivots > max_pivots)
        throw IterationLimitError(0.0, "transportation simplex exceeded " +
                                           std::to_string(max_pivots) + " pivots");
    }
    return pivots;
  }

  ExactSolution solution() const {
    ExactSolution out;
    out.plan.n_tasks = m_;
    out.plan.n_agents = n_;
    for (const auto& cell : cells_) {
      if (cell.mass > 0.0) out.plan.entries.push_back({cell.row, cell.col, cell.mass});
    }
    std::sort(out.plan.entries.begin(), out.plan.entries.end(),
              [](const PlanEntry& a, const PlanEntry& b) {
                return std::tie(a.task, a.agent) < std::tie(b.task, b.agent);
              });
    double objective = 0.0;
    for (const auto& e : out.plan.entries) objective += e.mass * cost_[e.task * n_ + e.agent];
    out.plan.objective = objective;
    out.duals.u = u_;
    out.duals.v = v_;
    return out;
  }

 private:
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  void add_cell(std::size_t row, std::size_t col, double mass) {
    const std::size_t id = cells_.size();
    cells_.push_back({row, col, mass});
    adjacency_[row].push_back(id);
    adjacency_[m_ + col].push_back(id);
  }

  // Produces exactly m + n - 1 basic cells; when a row and a column are
  // exhausted together the walk moves down, leaving a zero-mass basic cell.
  void north_west_corner(std::span<const double> mu, std::span<const double> nu) {
    std::vector<double> supply(mu.begin(), mu.end());
    std::vector<double> demand(nu.begin(), nu.end());
    std::size_t i = 0, j = 0;
    while (true) {
      const double x = std::min(supply[i], demand[j]);
      supply[i] -= x;
      demand[j] -= x;
      add_cell(i, j, x);
      if (i == m_ - 1 && j == n_ - 1) break;
      if (i == m_ - 1) {
        ++j;
      } else if (j == n_ - 1) {
        ++i;
      } else if (supply[i] <= 0.0) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  std::size_t other_end(const BasicCell& cell, std::size_t node) const {
    return node < m_ ? m_ + cell.col : cell.row;
  }

  // Breadth-first walk of the basis tree from `root`, filling parent_cell_ and
  // order_. Returns the number of nodes reached.
  std::size_t walk_tree(std::size_t root) {
    std::fill(visited_.begin(), visited_.end(), 0);
    std::size_t head = 0, tail = 0;
    order_[tail++] = root;
    visited_[root] = 1;
    parent_cell_[root] = kNone;
    while (head < tail) {
      const std::size_t node = order_[head++];
      for (std::size_t id : adjacency_[node]) {
        const std::size_t next = other_end(cells_[id], node);
        if (visited_[next]) continue;
        visited_[next] = 1;
        parent_cell_[next] = id;
        order_[tail++] = next;
      }
    }
    return tail;
  }

  void compute_duals() {
    walk_tree(0);
    u_[0] = 0.0;
    for (std::size_t k = 1; k < m_ + n_; ++k) {
      const std::size_t node = order_[k];
      const auto& cell = cells_[parent_cell_[node]];
      const double c = cost_[cell.row * n_ + cell.col];
      if (node < m_) {
        u_[node] = c - v_[cell.col];
      } else {
        v_[node - m_] = c - u_[cell.row];
      }
    }
  }

  std::pair<std::size_t, std::size_t> dantzig_entering() const {
    double best = -entering_tol_;
    std::pair<std::size_t, std::size_t> choice{kNone, kNone};
    for (std::size_t i = 0; i < m_; ++i) {
      const double* row = &cost_[i * n_];
      const double ui = u_[i];
      for (std::size_t j = 0; j < n_; ++j) {
        const double reduced = row[j] - ui - v_[j];
        if (reduced < best) {
          best = reduced;
          choice = {i, j};
        }
      }
    }
    return choice;
  }

  std::pair<std::size_t, std::size_t> bland_entering() const {
    for (std::size_t i = 0; i < m_; ++i)
      for (std::size_t j = 0; j < n_; ++j)
        if (cost_[i * n_ + j] - u_[i] - v_[j] < -entering_tol_) return {i, j};
    return {kNone, kNone};
  }

  // Moves theta units around the cycle closed by (row, col). Returns theta.
  double pivot(std::size_t row, std::size_t col) {
    walk_tree(row);
    // Tree path from the agent node back to the task node; the first cell
    // (adjacent to the agent) loses mass, then signs alternate.
    path_.clear();
    for (std::size_t node = m_ + col; node != row;) {
      const std::size_t id = parent_cell_[node];
      path_.push_back(id);
      node = other_end(cells_[id], node);
    }
    double theta = std::numeric_limits<double>::infinity();
    std::size_t leaving = kNone;
    for (std::size_t k = 0; k < path_.size(); k += 2) {
      const auto& cell = cells_[path_[k]];
      const bool better =
          leaving == kNone || cell.mass < theta ||
          (cell.mass == theta &&
           std::tie(cell.row, cell.col) <
               std::tie(cells_[leaving].row, cells_[leaving].col));
      if (better) {
        theta = cell.mass;
        leaving = path_[k];
      }
    }
    for (std::size_t k = 0; k < path_.size(); ++k) {
      auto& cell = cells_[path_[k]];
      if (k % 2 == 0) {
        cell.mass = path_[k] == leaving ? 0.0 : cell.mass - theta;
      } else {
        cell.mass += theta;
      }
    }
    replace_cell(leaving, row, col, theta);
    return theta;
  }

  void replace_cell(std::size_t id, std::size_t row, std::size_t col, double mass) {
    auto drop = [id](std::vector<std::size_t>& list) {
      auto it = std::find(list.begin(), list.end(), id);
      *it = list.back();
      list.pop_back();
    };
    drop(adjacency_[cells_[id].row]);
    drop(adjacency_[m_ + cells_[id].col]);
    cells_[id] = {row, col, mass};
    adjacency_[row].push_back(id);
    adjacency_[m_ + col].push_back(id);
  }

  std::size_t m_, n_;
  std::vector<double> cost_;  // row-major copy
  double entering_tol_ = 0.0;
  std::vector<BasicCell> cells_;
  std::vector<std::vector<std::size_t>> adjacency_;
  std::vector<double> u_, v_;
  std::vector<std::size_t> parent_cell_;
  std::vector<char> visited_;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> path_;
};

}  // namespace

void check_problem_shape(const CostMatrix& cost, std::span<const double> mu,
                         std::span<const double> nu) {
  if (mu.size() != cost.n_tasks() || nu.size() != cost.n_agents())
    fail(ErrorCode::kDimensionMismatch, "marginals do not match the cost matrix");
  double total_mu = 0.0, total_nu = 0.0;
  for (double w : mu) {
    if (!(w >= 0.0)) fail(ErrorCode::kNegativeWeight, "task weights must be nonnegative");
    total_mu += w;
  }
  for (double w : nu) {
    if (!(w >= 0.0)) fail(ErrorCode::kNegativeWeight, "agent weights must be nonnegative");
    total_nu += w;
  }
  if (std::abs(total_mu - total_nu) > 1e-9)
    fail(ErrorCode::kMassMismatch, "task and agent masses differ");
}

ExactSolution solve_exact(const CostMatrix& cost, std::span<const double> mu,
                          std::span<const double> nu) {
  check_problem_shape(cost, mu, nu);
  TransportationSimplex simplex(cost, mu, nu);
  const std::size_t pivots = simplex.run();
  ExactSolution out = simplex.solution();
  out.pivots = pivots;
  return out;
}

}  // namespace odtalloc
