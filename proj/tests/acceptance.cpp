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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "odtalloc/analysis.hpp"
#include "odtalloc/cost.hpp"
#include "odtalloc/scenarios.hpp"
#include "odtalloc/solver.hpp"
#include "oracles.hpp"

using namespace odtalloc;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool passed = true;
  std::string detail;
};

// Fails the outcome and keeps the first message.
void expect(Outcome& out, bool condition, const std::string& message) {
  if (condition) return;
  if (out.passed) out.detail = message;
  out.passed = false;
}

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buffer[256];
  std::snprintf(buffer, sizeof buffer, format, a, b, c);
  return buffer;
}

Scenario mixture(std::uint64_t seed, int dim, std::size_t tasks, std::size_t agents) {
  ScenarioSpec spec;
  spec.kind = ScenarioKind::kGaussianMixture;
  spec.dim = dim;
  spec.n_tasks = tasks;
  spec.n_agents = agents;
  spec.seed = seed;
  return generate(spec);
}

bool same_support(const TransportPlan& a, const TransportPlan& b) {
  if (a.entries.size() != b.entries.size()) return false;
  for (std::size_t k = 0; k < a.entries.size(); ++k)
    if (a.entries[k].task != b.entries[k].task || a.entries[k].agent != b.entries[k].agent)
      return false;
  return true;
}

// -- criteria ---------------------------------------------------------------

Outcome oracle_equivalence() {
  Outcome out;
  const auto start = Clock::now();
  double worst = 0.0;
  for (std::uint64_t k = 0; k < 50; ++k) {
    const std::size_t n = 2 + k % 6;
    const auto sc = mixture(1000 + k, 1 + static_cast<int>(k % 3), n, n);
    const auto cost = cost_matrix(sc.tasks, sc.agents);
    const auto exact = solve_exact(cost, sc.tasks.weights(), sc.agents.weights());
    const auto brute = brute_force_small(cost, sc.tasks.weights(), sc.agents.weights());
    worst = std::max(worst, std::abs(exact.plan.objective - brute.objective));
  }
  const double elapsed = seconds_since(start);
  expect(out, worst <= 1e-9, fmt("objective gap %.3g > 1e-9", worst));
  expect(out, elapsed < 5.0, fmt("took %.2f s", elapsed));
  if (out.passed) out.detail = fmt("50 instances, max gap %.2g, %.2f s", worst, elapsed);
  return out;
}

Outcome reduction_equivalence() {
  Outcome out;
  Rng rng(2002);
  const auto start = Clock::now();
  double worst = 0.0;
  int unique = 0;
  for (int k = 0; k < 100; ++k) {
    const int dim = 1 + k % 3;
    const std::size_t m = 1 + rng.below(50), n = 1 + rng.below(50);
    TaskSet tasks = oracle::random_tasks(rng, m, dim, k % 2 == 0);
    DiscreteMeasure agents = oracle::random_agents(rng, n, dim, k % 2 == 0);
    if (k % 4 == 1) {
      auto sc = mixture(3000 + k, dim, m, n);
      tasks = sc.tasks;
      agents = sc.agents;
    }
    const auto cost = cost_matrix(tasks, agents);
    const auto exact = solve_exact(cost, tasks.weights(), agents.weights());
    const auto reduced = solve_via_reduction(tasks, agents);
    worst = std::max(worst, std::abs(reduced.plan.objective - exact.plan.objective));
    if (support_is_stable(cost, tasks.weights(), agents.weights(), exact.plan)) {
      ++unique;
      expect(out, same_support(reduced.plan, exact.plan),
             "supports differ on instance " + std::to_string(k) + " reported unique");
    }
  }
  const double elapsed = seconds_since(start);
  expect(out, worst <= 1e-8, fmt("objective gap %.3g > 1e-8", worst));
  expect(out, elapsed < 30.0, fmt("took %.2f s", elapsed));
  if (out.passed)
    out.detail = fmt("100 instances, max gap %.2g, %.0f unique with equal supports, %.2f s", worst,
                     unique, elapsed);
  return out;
}

Outcome pointwise_identity() {
  Outcome out;
  Rng rng(3003);
  double worst = 0.0;
  int couplings = 0;
  for (int k = 0; k < 25; ++k) {
    const int dim = 1 + k % 3;
    const std::size_t m = 1 + rng.below(30), n = 1 + rng.below(30);
    const auto tasks = oracle::random_tasks(rng, m, dim, k % 2 == 0);
    const auto agents = oracle::random_agents(rng, n, dim, k % 3 == 0);
    const Matrix full = cost_matrix(tasks, agents).values();
    const Matrix reduced = reduced_cost_matrix(index_pushforward(tasks), agents).values();
    const double constant = reduction_constant(tasks, agents);
    for (int r = 0; r < 20; ++r, ++couplings) {
      const Matrix p = oracle::proportional_fitting(tasks.weights(), agents.weights(), rng);
      const double lhs = (full.array() * p.array()).sum();
      const double rhs = constant + 2.0 * (reduced.array() * p.array()).sum();
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  }
  expect(out, worst <= 1e-9, fmt("identity gap %.3g > 1e-9", worst));
  if (out.passed) out.detail = fmt("%.0f couplings, max gap %.2g", couplings, worst);
  return out;
}

Outcome comonotone_structure() {
  Outcome out;
  Rng rng(4004);
  double worst = 0.0;
  std::size_t crossings = 0;
  for (std::uint64_t k = 0; k < 50; ++k) {
    const std::size_t m = 1 + rng.below(40), n = 1 + rng.below(40);
    const auto sc = mixture(4000 + k, 1, m, n);
    const auto index = index_pushforward(sc.tasks);
    const auto full = solve_exact(cost_matrix(sc.tasks, sc.agents), sc.tasks.weights(),
                                  sc.agents.weights());
    const auto reduced = solve_exact(reduced_cost_matrix(index, sc.agents), index.weights(),
                                     sc.agents.weights());
    const auto mono = monotone_map_1d(index, sc.agents);
    crossings += count_crossings_1d(full.plan, index, sc.agents);
    crossings += count_crossings_1d(reduced.plan, index, sc.agents);
    crossings += count_crossings_1d(mono, index, sc.agents);
    worst = std::max(worst, std::abs(mono.objective - reduced.plan.objective));
  }
  expect(out, crossings == 0, fmt("%.0f crossing pairs in optimal supports", crossings));
  expect(out, worst <= 1e-9, fmt("monotone map objective gap %.3g > 1e-9", worst));
  if (out.passed) out.detail = fmt("50 instances, no crossings, max gap %.2g", worst);
  return out;
}

Outcome condition_suite() {
  Outcome out;
  const double target = 2.0 * std::sqrt(2.0);
  for (int n = 1; n <= 3; ++n) {
    const auto twist = verify_twist(n, 1000, 50 + n);
    expect(out, twist.passed && std::abs(twist.worst_case - target) <= 1e-9,
           fmt("twist n=%.0f ratio %.12g", n, twist.worst_case));
    const auto nondeg = verify_nondegeneracy(n, 1000, 60 + n);
    expect(out, nondeg.passed && std::abs(nondeg.worst_case - target) <= 1e-9,
           fmt("nondegeneracy n=%.0f singular value %.12g", n, nondeg.worst_case));
  }
  const auto monge = verify_monge_1d(1000, 70);
  expect(out, monge.passed && monge.worst_case <= 0.0,
         fmt("reduced cross difference reached %.3g", monge.worst_case));
  Rng rng(5005);
  for (std::uint64_t k = 0; k < 20; ++k) {
    ScenarioSpec spec;
    spec.kind = k % 2 ? ScenarioKind::kGaussianMixture : ScenarioKind::kGrid;
    spec.dim = 1;
    spec.n_tasks = 2 + rng.below(40);
    spec.n_agents = 2 + rng.below(40);
    spec.seed = 5000 + k;
    spec.shift = 0.25 * static_cast<double>(k % 4);
    const auto sc = generate(spec);
    const auto nested = check_nestedness_1d(sc.tasks, sc.agents, 64);
    expect(out, nested.passed, fmt("nestedness failed on instance %.0f", k));
  }
  if (out.passed)
    out.detail = "twist and nondegeneracy at 2*sqrt(2) for n=1..3, monge <= 0, 20 nested instances";
  return out;
}

Outcome duality_stability() {
  Outcome out;
  Rng rng(6006);
  int corruptions = 0;
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const int dim = 1 + k % 3;
    const std::size_t m = 1 + rng.below(60), n = 1 + rng.below(60);
    auto sc = mixture(6000 + k, dim, m, n);
    TaskSet tasks = sc.tasks;
    DiscreteMeasure agents = sc.agents;
    if (k % 2) {
      tasks = oracle::random_tasks(rng, m, dim, false);
      agents = oracle::random_agents(rng, n, dim, false);
    }
    const auto cost = cost_matrix(tasks, agents);
    const auto sol = solve_exact(cost, tasks.weights(), agents.weights());
    const auto report = check_stability(sol.plan, sol.duals, cost, 1e-8);
    worst = std::max({worst, report.max_violation, report.max_slack_on_support});
    expect(out, report.passed, "exact solution failed the stability check");
    for (int side = 0; side < 2; ++side) {
      const std::size_t count = side == 0 ? m : n;
      for (std::size_t idx = 0; idx < count; ++idx)
        for (double delta : {1e-3, -1e-3}) {
          DualPotentials bad = sol.duals;
          (side == 0 ? bad.u : bad.v)[idx] += delta;
          ++corruptions;
          expect(out, !check_stability(sol.plan, bad, cost, 1e-8).passed,
                 "a corrupted dual still passed");
        }
    }
  }
  if (out.passed)
    out.detail = fmt("20 solves pass (max residual %.2g), %.0f corrupted duals all FAIL", worst,
                     corruptions);
  return out;
}

Outcome entropic_consistency() {
  Outcome out;
  Rng rng(7007);
  double worst_gap = 0.0, worst_violation = 0.0;
  int worst_iterations = 0;
  for (std::uint64_t k = 0; k < 20; ++k) {
    const std::size_t m = 5 + rng.below(56), n = 5 + rng.below(56);
    const auto sc = mixture(7000 + k, 1 + static_cast<int>(k % 3), m, n);
    const auto cost = cost_matrix(sc.tasks, sc.agents);
    const auto exact = solve_exact(cost, sc.tasks.weights(), sc.agents.weights());
    try {
      const auto ent = solve_entropic(cost, sc.tasks.weights(), sc.agents.weights(),
                                      {1e-3 * cost.spread(), 1e-8, 10000});
      const double violation =
          marginal_violation(ent.plan, sc.tasks.weights(), sc.agents.weights());
      const double gap = std::abs(ent.plan.objective - exact.plan.objective) /
                         std::abs(exact.plan.objective);
      worst_gap = std::max(worst_gap, gap);
      worst_violation = std::max(worst_violation, violation);
      worst_iterations = std::max(worst_iterations, ent.iterations);
    } catch (const std::exception& e) {
      expect(out, false, std::string("instance ") + std::to_string(k) + ": " + e.what());
    }
  }
  expect(out, worst_gap <= 0.01, fmt("objective off by %.3g%%", 100.0 * worst_gap));
  expect(out, worst_violation < 1e-8, fmt("marginal violation %.3g", worst_violation));
  if (out.passed)
    out.detail = fmt("20 instances, max gap %.3g%%, max violation %.2g, max %.0f iterations",
                     100.0 * worst_gap, worst_violation, worst_iterations);
  return out;
}

Outcome gramian_numerics() {
  Outcome out;
  Matrix a(2, 2), b(2, 1), expected(2, 2);
  a << 0, 1, 0, 0;
  b << 0, 1;
  expected << 1.0 / 3.0, 0.5, 0.5, 1.0;
  const auto g = wpd_gramian({a, b, 0.0, 1.0, 1000});
  const double gram_err = (g.m - expected).cwiseAbs().maxCoeff();
  expect(out, gram_err <= 1e-6, fmt("Gramian entry error %.3g", gram_err));
  Rng rng(8008);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Vector x = oracle::random_vector(rng, 2, -5, 5);
    const Vector y = oracle::random_vector(rng, 2, -5, 5);
    const auto w = whiten(x, y, g.phi, g.m);
    const double direct = wpd_cost(x, y, g.phi, g.m);
    worst = std::max(worst, std::abs(direct - 0.5 * (w.y_hat - w.x_hat).squaredNorm()));
  }
  expect(out, worst <= 1e-9, fmt("whitened cost gap %.3g", worst));
  if (out.passed)
    out.detail = fmt("M error %.2g, whitened cost max gap %.2g over 100 pairs", gram_err, worst);
  return out;
}

Outcome desk_performance() {
  Outcome out;
  ScenarioSpec city;
  city.kind = ScenarioKind::kCityBox;
  city.dim = 2;
  city.n_tasks = city.n_agents = 30;
  city.seed = 2026;
  city.degrees = true;
  city.box = {17.95, 59.28, 18.15, 59.38};
  const auto small = generate(city);
  auto start = Clock::now();
  const auto small_sol =
      solve_exact(cost_matrix(small.tasks, small.agents), small.tasks.weights(),
                  small.agents.weights());
  const double t30 = seconds_since(start);

  const auto big = mixture(9009, 2, 500, 500);
  start = Clock::now();
  const auto big_cost = cost_matrix(big.tasks, big.agents);
  const auto big_sol = solve_exact(big_cost, big.tasks.weights(), big.agents.weights());
  const double t500 = seconds_since(start);
  expect(out, t30 < 1.0, fmt("30x30 took %.3f s", t30));
  expect(out, t500 < 30.0, fmt("500x500 took %.2f s", t500));
  expect(out,
         check_stability(big_sol.plan, big_sol.duals, big_cost,
                         1e-8 * std::max(1.0, big_cost.max_abs()))
             .passed,
         "500x500 solution is not certified optimal");
  (void)small_sol;
  if (out.passed) out.detail = fmt("30x30 city box %.4f s, 500x500 %.2f s", t30, t500);
  return out;
}

int run_cli(const std::string& args) {
  const std::string command = std::string(ODTALLOC_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

Outcome cli_determinism() {
  Outcome out;
  const fs::path root = fs::temp_directory_path() / "odtalloc_acceptance";
  fs::remove_all(root);
  fs::create_directories(root);
  const std::string inst = (root / "instance").string();
  expect(out,
         run_cli("gen --kind city_box --dim 2 --tasks 30 --agents 30 --seed 30 --degrees "
                 "--box 17.95,59.28,18.15,59.38 --out '" + inst + "'") == 0,
         "gen failed");
  int compared = 0;
  for (const char* method : {"exact", "reduced", "entropic"}) {
    const std::string base = "solve --tasks '" + inst + "/tasks.csv' --agents '" + inst +
                             "/agents.csv' --method " + method + " --out '";
    const fs::path a = root / (std::string("a_") + method), b = root / (std::string("b_") + method);
    expect(out, run_cli(base + a.string() + "'") == 0, std::string("solve failed: ") + method);
    expect(out, run_cli(base + b.string() + "'") == 0, std::string("solve failed: ") + method);
    for (const char* file : {"plan.json", "plot.csv"}) {
      const std::string first = slurp(a / file), second = slurp(b / file);
      expect(out, !first.empty() && first == second,
             std::string(file) + " differs between runs (" + method + ")");
      ++compared;
    }
  }
  if (out.passed) out.detail = fmt("%.0f file pairs byte-identical", compared);
  return out;
}

}  // namespace

int main() {
  struct Criterion {
    int number;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "oracle equivalence", oracle_equivalence},
      {2, "reduction equivalence", reduction_equivalence},
      {3, "pointwise reduction identity", pointwise_identity},
      {4, "comonotone structure", comonotone_structure},
      {5, "condition suite", condition_suite},
      {6, "duality and stability", duality_stability},
      {7, "entropic consistency", entropic_consistency},
      {8, "Gramian numerics", gramian_numerics},
      {9, "desk-scale performance", desk_performance},
      {10, "CLI determinism", cli_determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome result;
    try {
      result = c.run();
    } catch (const std::exception& e) {
      result = {false, std::string("threw: ") + e.what()};
    }
    if (!result.passed) ++failed;
    std::printf("%s criterion %d (%s): %s\n", result.passed ? "PASS" : "FAIL", c.number, c.name,
                result.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
