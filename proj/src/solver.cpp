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

#include "odtalloc/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <string>
#include <utility>

#include "odtalloc/error.hpp"
#include "odtalloc/rng.hpp"
#include "solver_internal.hpp"

namespace odtalloc {

std::vector<double> TransportPlan::row_sums() const {
  std::vector<double> sums(n_tasks, 0.0);
  for (const auto& e : entries) sums[e.task] += e.mass;
  return sums;
}

std::vector<double> TransportPlan::column_sums() const {
  std::vector<double> sums(n_agents, 0.0);
  for (const auto& e : entries) sums[e.agent] += e.mass;
  return sums;
}

double plan_cost(const TransportPlan& plan, const CostMatrix& cost) {
  double total = 0.0;
  for (const auto& e : plan.entries) total += e.mass * cost(e.task, e.agent);
  return total;
}

double marginal_violation(const TransportPlan& plan, std::span<const double> mu,
                          std::span<const double> nu) {
  if (mu.size() != plan.n_tasks || nu.size() != plan.n_agents)
    fail(ErrorCode::kDimensionMismatch, "marginals do not match the plan");
  double worst = 0.0;
  const auto rows = plan.row_sums();
  const auto cols = plan.column_sums();
  for (std::size_t i = 0; i < rows.size(); ++i)
    worst = std::max(worst, std::abs(rows[i] - mu[i]));
  for (std::size_t j = 0; j < cols.size(); ++j)
    worst = std::max(worst, std::abs(cols[j] - nu[j]));
  return worst;
}

namespace {

void sort_entries(std::vector<PlanEntry>& entries) {
  std::sort(entries.begin(), entries.end(), [](const PlanEntry& a, const PlanEntry& b) {
    return std::pair(a.task, a.agent) < std::pair(b.task, b.agent);
  });
}

// ---------------------------------------------------------------------------
// Log-domain Sinkhorn

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_or_neg_inf(double w) { return w > 0.0 ? std::log(w) : kNegInf; }

class LogSinkhorn {
 public:
  LogSinkhorn(const CostMatrix& cost, std::span<const double> mu,
              std::span<const double> nu)
      : cost_(cost.values()),
        m_(cost.n_tasks()),
        n_(cost.n_agents()),
        log_mu_(m_),
        log_nu_(n_),
        f_(m_, 0.0),
        g_(n_, 0.0),
        buffer_(std::max(m_, n_)) {
    for (std::size_t i = 0; i < m_; ++i) log_mu_[i] = log_or_neg_inf(mu[i]);
    for (std::size_t j = 0; j < n_; ++j) log_nu_[j] = log_or_neg_inf(nu[j]);
    mu_.assign(mu.begin(), mu.end());
    nu_.assign(nu.begin(), nu.end());
  }

  // One f-update followed by one g-update at temperature eps.
  void sweep(double eps) {
    for (std::size_t i = 0; i < m_; ++i) {
      if (log_mu_[i] == kNegInf) {
        f_[i] = kNegInf;
        continue;
      }
      for (std::size_t j = 0; j < n_; ++j) buffer_[j] = (g_[j] - c(i, j)) / eps;
      f_[i] = eps * (log_mu_[i] - log_sum_exp(n_));
    }
    for (std::size_t j = 0; j < n_; ++j) {
      if (log_nu_[j] == kNegInf) {
        g_[j] = kNegInf;
        continue;
      }
      for (std::size_t i = 0; i < m_; ++i) buffer_[i] = (f_[i] - c(i, j)) / eps;
      g_[j] = eps * (log_nu_[j] - log_sum_exp(m_));
    }
  }

  double violation(double eps) const {
    double worst = 0.0;
    std::vector<double> cols(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < n_; ++j) {
        const double p = mass(i, j, eps);
        row += p;
        cols[j] += p;
      }
      worst = std::max(worst, std::abs(row - mu_[i]));
    }
    for (std::size_t j = 0; j < n_; ++j) worst = std::max(worst, std::abs(cols[j] - nu_[j]));
    return worst;
  }

  TransportPlan plan(double eps) const {
    TransportPlan out;
    out.n_tasks = m_;
    out.n_agents = n_;
    for (std::size_t i = 0; i < m_; ++i)
      for (std::size_t j = 0; j < n_; ++j) {
        const double p = mass(i, j, eps);
        if (p > 0.0) out.entries.push_back({i, j, p});
      }
    return out;
  }

  const std::vector<double>& agent_potential() const noexcept { return g_; }
  void set_agent_potential(const std::vector<double>& g) { g_ = g; }

  DualPotentials potentials() const {
    DualPotentials out{f_, g_};
    const double shift = std::isfinite(f_[0]) ? f_[0] : 0.0;
    for (auto& u : out.u) u -= shift;
    for (auto& v : out.v) v += shift;
    return out;
  }

 private:
  double c(std::size_t i, std::size_t j) const {
    return cost_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }

  double mass(std::size_t i, std::size_t j, double eps) const {
    if (f_[i] == kNegInf || g_[j] == kNegInf) return 0.0;
    return std::exp((f_[i] + g_[j] - c(i, j)) / eps);
  }

  double log_sum_exp(std::size_t count) const {
    double top = kNegInf;
    for (std::size_t k = 0; k < count; ++k) top = std::max(top, buffer_[k]);
    if (top == kNegInf) return kNegInf;
    double sum = 0.0;
    for (std::size_t k = 0; k < count; ++k) sum += std::exp(buffer_[k] - top);
    return top + std::log(sum);
  }

  const Matrix& cost_;
  std::size_t m_, n_;
  std::vector<double> log_mu_, log_nu_, mu_, nu_;
  std::vector<double> f_, g_;
  mutable std::vector<double> buffer_;
};

constexpr double kStageTol = 1e-5;
constexpr double kAnnealFactor = 0.25;

// Sweeps at temperature eps until the marginal violation drops below tol or
// the shared iteration budget runs out; returns the last violation.
//
// One sweep is a fixed-point map on the agent potential g. Plain sweeps
// contract very slowly at small eps, so the next g is extrapolated from the
// last kMemory residuals (Anderson mixing, regularized least squares). If the
// best violation has not improved for kStall sweeps the history is dropped
// and a few plain sweeps are taken before mixing resumes.
double converge(LogSinkhorn& sinkhorn, double eps, double tol, int max_iter,
                int& iterations) {
  constexpr Eigen::Index kMemory = 10;
  constexpr int kStall = 30;
  constexpr int kCooldown = 3;
  std::vector<double> g = sinkhorn.agent_potential();
  std::vector<std::size_t> live;
  for (std::size_t j = 0; j < g.size(); ++j)
    if (g[j] != kNegInf) live.push_back(j);
  const auto n = static_cast<Eigen::Index>(live.size());
  Vector x(n);
  for (Eigen::Index k = 0; k < n; ++k) x[k] = g[live[k]];
  Matrix d_f(n, 0), d_g(n, 0);
  Vector prev_f, prev_g;
  double best = std::numeric_limits<double>::infinity();
  double violation = best;
  int since_best = 0, plain = 0;
  while (iterations < max_iter) {
    for (Eigen::Index k = 0; k < n; ++k) g[live[k]] = x[k];
    sinkhorn.set_agent_potential(g);
    sinkhorn.sweep(eps);
    ++iterations;
    violation = sinkhorn.violation(eps);
    if (violation < tol) break;
    const auto& tg = sinkhorn.agent_potential();
    Vector gx(n);
    for (Eigen::Index k = 0; k < n; ++k) gx[k] = tg[live[k]];
    const Vector f = gx - x;
    if (violation < best) {
      best = violation;
      since_best = 0;
    } else {
      ++since_best;
    }
    if (since_best >= kStall || !std::isfinite(violation)) {
      d_f.resize(n, 0);
      d_g.resize(n, 0);
      prev_f.resize(0);
      since_best = 0;
      plain = kCooldown;
    }
    if (prev_f.size() == n) {
      if (d_f.cols() == kMemory) {
        d_f = d_f.rightCols(kMemory - 1).eval();
        d_g = d_g.rightCols(kMemory - 1).eval();
      }
      d_f.conservativeResize(n, d_f.cols() + 1);
      d_g.conservativeResize(n, d_g.cols() + 1);
      d_f.col(d_f.cols() - 1) = f - prev_f;
      d_g.col(d_g.cols() - 1) = gx - prev_g;
    }
    prev_f = f;
    prev_g = gx;
    x = gx;
    if (plain > 0) {
      --plain;
    } else if (d_f.cols() > 0) {
      Matrix normal = d_f.transpose() * d_f;
      normal.diagonal().array() += 1e-10 * normal.trace() + 1e-300;
      const Vector gamma = normal.ldlt().solve(d_f.transpose() * f);
      const Vector candidate = gx - d_g * gamma;
      if (candidate.allFinite()) x = candidate;
    }
  }
  return violation;
}

}  // namespace

EntropicSolution solve_entropic(const CostMatrix& cost, std::span<const double> mu,
                                std::span<const double> nu,
                                const EntropicOptions& options) {
  check_problem_shape(cost, mu, nu);
  if (!(options.epsilon > 0.0) || !std::isfinite(options.epsilon))
    fail(ErrorCode::kInvalidArgument, "epsilon must be positive and finite");
  if (!(options.tol > 0.0)) fail(ErrorCode::kInvalidArgument, "tol must be positive");
  if (options.max_iter < 1) fail(ErrorCode::kInvalidArgument, "max_iter must be positive");

  LogSinkhorn sinkhorn(cost, mu, nu);
  int iterations = 0;

  // Anneal from the cost spread down to the target temperature, fitting each
  // warm stage to kStageTol so the cold stage starts near its fixed point.
  const double target = options.epsilon;
  double eps = std::max(target, cost.spread());
  while (eps > target) {
    converge(sinkhorn, eps, std::max(options.tol, kStageTol), options.max_iter, iterations);
    eps = std::max(target, eps * kAnnealFactor);
  }
  const double violation =
      converge(sinkhorn, target, options.tol, options.max_iter, iterations);
  if (!(violation < options.tol))
    throw IterationLimitError(violation, "Sinkhorn stopped at marginal violation " +
                                             std::to_string(violation) + " after " +
                                             std::to_string(iterations) + " iterations");
  EntropicSolution out;
  out.plan = sinkhorn.plan(target);
  out.plan.objective = plan_cost(out.plan, cost);
  out.potentials = sinkhorn.potentials();
  out.iterations = iterations;
  out.violation = violation;
  return out;
}

// ---------------------------------------------------------------------------
// Exhaustive oracle

namespace {

bool is_uniform(std::span<const double> w) {
  for (double x : w)
    if (std::abs(x - w[0]) > 1e-12) return false;
  return true;
}

TransportPlan best_permutation(const CostMatrix& cost, double mass) {
  const std::size_t n = cost.n_tasks();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::size_t> best = perm;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += cost(i, perm[i]);
    if (total < best_cost) {
      best_cost = total;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  TransportPlan out;
  out.n_tasks = out.n_agents = n;
  for (std::size_t i = 0; i < n; ++i) out.entries.push_back({i, best[i], mass});
  out.objective = plan_cost(out, cost);
  return out;
}

// Every basic feasible solution is the unique solution supported on some
// spanning tree of m + n - 1 cells. Enumerate all cell subsets of that size
// and solve each by peeling leaves (a row or column touching one remaining
// cell fixes that cell's mass).
class BasisEnumerator {
 public:
  BasisEnumerator(const CostMatrix& cost, std::span<const double> mu,
                  std::span<const double> nu)
      : cost_(cost), mu_(mu.begin(), mu.end()), nu_(nu.begin(), nu.end()),
        m_(cost.n_tasks()), n_(cost.n_agents()) {}

  TransportPlan run() {
    chosen_.clear();
    choose(0);
    if (!found_) fail(ErrorCode::kInvalidArgument, "no feasible basis found");
    TransportPlan out;
    out.n_tasks = m_;
    out.n_agents = n_;
    for (const auto& e : best_)
      if (e.mass > 0.0) out.entries.push_back(e);
    sort_entries(out.entries);
    out.objective = plan_cost(out, cost_);
    return out;
  }

 private:
  void choose(std::size_t next_cell) {
    const std::size_t need = m_ + n_ - 1;
    if (chosen_.size() == need) {
      evaluate();
      return;
    }
    const std::size_t total = m_ * n_;
    for (std::size_t cell = next_cell; cell + (need - chosen_.size()) <= total; ++cell) {
      chosen_.push_back(cell);
      choose(cell + 1);
      chosen_.pop_back();
    }
  }

  void evaluate() {
    std::vector<double> supply = mu_, demand = nu_;
    std::vector<int> row_degree(m_, 0), col_degree(n_, 0);
    for (std::size_t cell : chosen_) {
      ++row_degree[cell / n_];
      ++col_degree[cell % n_];
    }
    std::vector<char> done(chosen_.size(), 0);
    std::vector<PlanEntry> entries;
    for (std::size_t round = 0; round < chosen_.size(); ++round) {
      bool peeled = false;
      for (std::size_t k = 0; k < chosen_.size() && !peeled; ++k) {
        if (done[k]) continue;
        const std::size_t i = chosen_[k] / n_, j = chosen_[k] % n_;
        double x;
        if (row_degree[i] == 1) {
          x = supply[i];
        } else if (col_degree[j] == 1) {
          x = demand[j];
        } else {
          continue;
        }
        if (x < -1e-12) return;  // infeasible vertex
        x = std::max(x, 0.0);
        supply[i] -= x;
        demand[j] -= x;
        --row_degree[i];
        --col_degree[j];
        done[k] = 1;
        entries.push_back({i, j, x});
        peeled = true;
      }
      if (!peeled) return;  // a cycle: not a basis
    }
    for (double s : supply)
      if (std::abs(s) > 1e-9) return;
    for (double d : demand)
      if (std::abs(d) > 1e-9) return;
    double total = 0.0;
    for (const auto& e : entries) total += e.mass * cost_(e.task, e.agent);
    if (!found_ || total < best_cost_) {
      found_ = true;
      best_cost_ = total;
      best_ = std::move(entries);
    }
  }

  const CostMatrix& cost_;
  std::vector<double> mu_, nu_;
  std::size_t m_, n_;
  std::vector<std::size_t> chosen_;
  std::vector<PlanEntry> best_;
  double best_cost_ = 0.0;
  bool found_ = false;
};

}  // namespace

TransportPlan brute_force_small(const CostMatrix& cost, std::span<const double> mu,
                                std::span<const double> nu) {
  check_problem_shape(cost, mu, nu);
  const std::size_t m = cost.n_tasks(), n = cost.n_agents();
  const bool uniform_square = m == n && is_uniform(mu) && is_uniform(nu) &&
                              std::abs(mu[0] - nu[0]) <= 1e-12;
  if (uniform_square && m <= 8) return best_permutation(cost, mu[0]);
  if (m + n <= 8) return BasisEnumerator(cost, mu, nu).run();
  fail(ErrorCode::kTooLarge, "brute force supports uniform N x N with N <= 8 or "
                             "n_tasks + n_agents <= 8");
}

// ---------------------------------------------------------------------------
// Diagnostics

StabilityReport check_stability(const TransportPlan& plan,
                                const DualPotentials& duals,
                                const CostMatrix& cost, double tol) {
  if (duals.u.size() != cost.n_tasks() || duals.v.size() != cost.n_agents() ||
      plan.n_tasks != cost.n_tasks() || plan.n_agents != cost.n_agents())
    fail(ErrorCode::kDimensionMismatch, "plan, duals and cost disagree in shape");
  StabilityReport report;
  report.max_violation = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cost.n_tasks(); ++i)
    for (std::size_t j = 0; j < cost.n_agents(); ++j)
      report.max_violation =
          std::max(report.max_violation, duals.u[i] + duals.v[j] - cost(i, j));
  for (const auto& e : plan.entries)
    report.max_slack_on_support =
        std::max(report.max_slack_on_support,
                 std::abs(duals.u[e.task] + duals.v[e.agent] - cost(e.task, e.agent)));
  report.passed = report.max_violation <= tol && report.max_slack_on_support <= tol;
  return report;
}

double purity(const TransportPlan& plan, double tol) {
  std::vector<double> row_mass(plan.n_tasks, 0.0), row_max(plan.n_tasks, 0.0);
  for (const auto& e : plan.entries) {
    row_mass[e.task] += e.mass;
    row_max[e.task] = std::max(row_max[e.task], e.mass);
  }
  double pure = 0.0, total = 0.0;
  for (std::size_t i = 0; i < plan.n_tasks; ++i) {
    total += row_mass[i];
    if (row_mass[i] > 0.0 && row_max[i] >= (1.0 - tol) * row_mass[i]) pure += row_mass[i];
  }
  return total > 0.0 ? pure / total : 0.0;
}

bool support_is_stable(const CostMatrix& cost, std::span<const double> mu,
                       std::span<const double> nu, const TransportPlan& plan) {
  constexpr std::uint64_t kPerturbationSeed = 0x5EED0D7A110CULL;
  Rng rng(kPerturbationSeed);
  const double scale = 1e-10 * std::max(1.0, cost.max_abs());
  Matrix perturbed = cost.values();
  for (Eigen::Index i = 0; i < perturbed.rows(); ++i)
    for (Eigen::Index j = 0; j < perturbed.cols(); ++j)
      perturbed(i, j) += scale * rng.uniform();
  const auto resolved = solve_exact(CostMatrix(std::move(perturbed)), mu, nu);
  auto support = [](const TransportPlan& p) {
    std::set<std::pair<std::size_t, std::size_t>> s;
    for (const auto& e : p.entries) s.emplace(e.task, e.agent);
    return s;
  };
  return support(resolved.plan) == support(plan);
}

ReducedSolution solve_via_reduction(const TaskSet& tasks,
                                    const DiscreteMeasure& agents) {
  if (tasks.dim() != agents.dim())
    fail(ErrorCode::kDimensionMismatch, "tasks and agents differ in dimension");
  const DiscreteMeasure index = index_pushforward(tasks);
  const CostMatrix reduced = reduced_cost_matrix(index, agents);
  ExactSolution exact = solve_exact(reduced, index.weights(), agents.weights());

  ReducedSolution out;
  out.reduced_objective = exact.plan.objective;
  out.constant = reduction_constant(tasks, agents);
  out.plan = std::move(exact.plan);
  out.plan.objective = out.constant + 2.0 * out.reduced_objective;

  // c_ij = 2 c^_ij + a_i + b_j, so (2u^ + a, 2v^ + b) certifies the full
  // problem; shift to keep u[0] = 0.
  out.duals.u.resize(tasks.size());
  out.duals.v.resize(agents.size());
  for (std::size_t i = 0; i < tasks.size(); ++i)
    out.duals.u[i] = 2.0 * exact.duals.u[i] +
                     task_offset(tasks.origins()[i], tasks.destinations()[i]);
  for (std::size_t j = 0; j < agents.size(); ++j)
    out.duals.v[j] = 2.0 * exact.duals.v[j] + agent_offset(agents.points()[j]);
  const double shift = out.duals.u[0];
  for (auto& u : out.duals.u) u -= shift;
  for (auto& v : out.duals.v) v += shift;
  return out;
}

}  // namespace odtalloc
