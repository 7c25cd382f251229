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

#include <doctest.h>

#include <cmath>

#include "odtalloc/cost.hpp"
#include "odtalloc/error.hpp"
#include "oracles.hpp"

using namespace odtalloc;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index k = 0;
  for (double x : xs) v[k++] = x;
  return v;
}

Matrix mat(Eigen::Index rows, Eigen::Index cols, std::initializer_list<double> xs) {
  Matrix m(rows, cols);
  auto it = xs.begin();
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = *it++;
  return m;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an odtalloc::Error");
  return ErrorCode::kInvalidArgument;
}

TaskSet canonical_tasks() {
  return TaskSet({vec({0}), vec({1})}, {vec({0}), vec({1})}, std::vector{1.0, 1.0});
}

DiscreteMeasure canonical_agents() {
  return DiscreteMeasure({vec({0}), vec({1})}, std::vector{1.0, 1.0});
}

}  // namespace

TEST_CASE("trip_cost") {
  CHECK(trip_cost(vec({0}), vec({0}), vec({0})) == 0.0);
  CHECK(trip_cost(vec({1}), vec({0}), vec({0})) == 2.0);
  CHECK(trip_cost(vec({0, 0}), vec({1, 0}), vec({0.5, 0})) == doctest::Approx(1.5));
  CHECK(code_of([] { trip_cost(vec({0, 0}), vec({0}), vec({0, 0})); }) ==
        ErrorCode::kDimensionMismatch);
}

TEST_CASE("gradients match finite differences") {
  CHECK(grad_x(vec({0}), vec({0}), vec({0})) == vec({0, 0}));
  CHECK(grad_x(vec({1}), vec({0}), vec({1})) == vec({2, -4}));
  CHECK(grad_y(vec({0}), vec({0}), vec({0})) == vec({0}));
  CHECK(grad_y(vec({1}), vec({0}), vec({1})) == vec({2}));

  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(3));
    const Vector o = oracle::random_vector(rng, n, -3, 3);
    const Vector d = oracle::random_vector(rng, n, -3, 3);
    const Vector y = oracle::random_vector(rng, n, -3, 3);
    Vector x(2 * n);
    x << o, d;
    auto fx = [&](const Vector& z) { return trip_cost(z.head(n), z.tail(n), y); };
    auto fy = [&](const Vector& z) { return trip_cost(o, d, z); };
    CHECK((grad_x(o, d, y) - oracle::finite_difference_gradient(fx, x)).norm() < 1e-6);
    CHECK((grad_y(o, d, y) - oracle::finite_difference_gradient(fy, y)).norm() < 1e-6);

    // Mixed Hessian column by column from differences of grad_x in y.
    const Matrix h = mixed_hessian(o, d, y);
    for (int k = 0; k < n; ++k) {
      Vector hi = y, lo = y;
      hi[k] += 1e-4;
      lo[k] -= 1e-4;
      const Vector col = (grad_x(o, d, hi) - grad_x(o, d, lo)) / 2e-4;
      CHECK((h.col(k) - col).norm() < 1e-6);
    }
  }
}

TEST_CASE("mixed_hessian") {
  CHECK(mixed_hessian(vec({3}), vec({4}), vec({5})) == mat(2, 1, {-2, -2}));
  CHECK(mixed_hessian(vec({0, 0}), vec({0, 0}), vec({0, 0})) ==
        mat(4, 2, {-2, 0, 0, -2, -2, 0, 0, -2}));
}

TEST_CASE("cost_matrix") {
  TaskSet one({vec({1})}, {vec({0})}, std::vector{1.0});
  DiscreteMeasure two({vec({0}), vec({1})}, std::vector{1.0, 1.0});
  CHECK(cost_matrix(one, two).values() == mat(1, 2, {2, 2}));

  TaskSet same({vec({3, 1})}, {vec({3, 1})}, std::vector{1.0});
  DiscreteMeasure at({vec({3, 1})}, std::vector{1.0});
  CHECK(cost_matrix(same, at)(0, 0) == 0.0);

  CHECK(cost_matrix(canonical_tasks(), canonical_agents()).values() == mat(2, 2, {0, 2, 2, 0}));
}

TEST_CASE("reduced_cost_matrix") {
  auto c = [](Vector s, Vector y) {
    DiscreteMeasure sm({s}, std::vector{1.0});
    DiscreteMeasure ym({y}, std::vector{1.0});
    return reduced_cost_matrix(sm, ym)(0, 0);
  };
  CHECK(c(vec({0}), vec({5})) == 0.0);
  CHECK(c(vec({2}), vec({1})) == -2.0);
  CHECK(c(vec({1, 1}), vec({1, -1})) == 0.0);
}

TEST_CASE("reduction constant and decomposition") {
  TaskSet one({vec({1})}, {vec({0})}, std::vector{1.0});
  DiscreteMeasure origin({vec({0})}, std::vector{1.0});
  CHECK(reduction_constant(one, origin) == doctest::Approx(2.0));

  TaskSet zero({Vector::Zero(2)}, {Vector::Zero(2)}, std::vector{1.0});
  DiscreteMeasure zero_agent({Vector::Zero(2)}, std::vector{1.0});
  CHECK(reduction_constant(zero, zero_agent) == 0.0);

  // Canonical 2x2: K = 1 (agents) + 1 (tasks).
  CHECK(reduction_constant(canonical_tasks(), canonical_agents()) == doctest::Approx(2.0));

  // Entry-wise decomposition c = 2 c^ + task_offset + agent_offset.
  Rng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(3));
    auto tasks = oracle::random_tasks(rng, 1 + rng.below(6), n);
    auto agents = oracle::random_agents(rng, 1 + rng.below(6), n);
    const auto full = cost_matrix(tasks, agents);
    const auto reduced = reduced_cost_matrix(index_pushforward(tasks), agents);
    for (std::size_t i = 0; i < tasks.size(); ++i)
      for (std::size_t j = 0; j < agents.size(); ++j) {
        const double rebuilt = 2.0 * reduced(i, j) +
                               task_offset(tasks.origins()[i], tasks.destinations()[i]) +
                               agent_offset(agents.points()[j]);
        CHECK(std::abs(rebuilt - full(i, j)) < 1e-12);
      }
  }
}

TEST_CASE("spread and max_abs") {
  CostMatrix c(mat(2, 2, {-3, 1, 2, 0}));
  CHECK(c.max_abs() == 3.0);
  CHECK(c.spread() == 5.0);
}

TEST_CASE("matrix_exponential") {
  CHECK(matrix_exponential(Matrix::Zero(3, 3)).isIdentity(0.0));
  const Matrix nil = mat(2, 2, {0, 1, 0, 0});
  CHECK(matrix_exponential(nil).isApprox(mat(2, 2, {1, 1, 0, 1}), 1e-14));
  const Matrix rot = mat(2, 2, {0, -1, 1, 0});
  const Matrix e = matrix_exponential(rot * 3.0);
  CHECK(e(0, 0) == doctest::Approx(std::cos(3.0)).epsilon(1e-13));
  CHECK(e(1, 0) == doctest::Approx(std::sin(3.0)).epsilon(1e-13));
  const Matrix diag = mat(2, 2, {-20, 0, 0, 5});
  const Matrix ed = matrix_exponential(diag);
  CHECK(ed(0, 0) == doctest::Approx(std::exp(-20.0)).epsilon(1e-12));
  CHECK(ed(1, 1) == doctest::Approx(std::exp(5.0)).epsilon(1e-12));
}

TEST_CASE("wpd_gramian") {
  SUBCASE("unit integrator") {
    auto g = wpd_gramian({mat(1, 1, {0}), mat(1, 1, {1}), 0.0, 1.0, 1000});
    CHECK(g.phi(0, 0) == doctest::Approx(1.0));
    CHECK(g.m(0, 0) == doctest::Approx(1.0));
  }
  SUBCASE("double integrator closed form") {
    auto g = wpd_gramian({mat(2, 2, {0, 1, 0, 0}), mat(2, 1, {0, 1}), 0.0, 1.0, 1000});
    const Matrix expected = mat(2, 2, {1.0 / 3.0, 0.5, 0.5, 1.0});
    CHECK((g.m - expected).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(g.phi.isApprox(mat(2, 2, {1, 1, 0, 1}), 1e-14));
  }
  SUBCASE("identity input") {
    auto g = wpd_gramian({Matrix::Zero(2, 2), Matrix::Identity(2, 2), 0.0, 1.0, 1000});
    CHECK(g.m.isApprox(Matrix::Identity(2, 2), 1e-12));
  }
  SUBCASE("stable scalar system against its integral") {
    // M = (1 - e^{-2T}) / 2 for A = -1, B = 1.
    auto g = wpd_gramian({mat(1, 1, {-1}), mat(1, 1, {1}), 0.0, 2.0, 1000});
    CHECK(g.m(0, 0) == doctest::Approx((1.0 - std::exp(-4.0)) / 2.0).epsilon(1e-10));
  }
  SUBCASE("uncontrollable") {
    CHECK(code_of([] {
            wpd_gramian({Matrix::Zero(2, 2), mat(2, 1, {0, 1}), 0.0, 1.0, 1000});
          }) == ErrorCode::kNotControllable);
  }
}

TEST_CASE("wpd_cost and whiten") {
  CHECK(wpd_cost(vec({0}), vec({2}), mat(1, 1, {1}), mat(1, 1, {1})) == doctest::Approx(2.0));
  const Matrix phi = mat(2, 2, {1, 1, 0, 1});
  const Matrix m = mat(2, 2, {1.0 / 3.0, 0.5, 0.5, 1.0});
  const Vector x = vec({0.3, -1.2});
  CHECK(wpd_cost(x, phi * x, phi, m) == doctest::Approx(0.0));

  auto w = whiten(vec({2}), vec({4}), mat(1, 1, {1}), mat(1, 1, {4}));
  CHECK(w.x_hat[0] == doctest::Approx(1.0));
  CHECK(w.y_hat[0] == doctest::Approx(2.0));
  auto id = whiten(x, vec({5, 6}), Matrix::Identity(2, 2), Matrix::Identity(2, 2));
  CHECK(id.x_hat == x);
  CHECK(id.y_hat == vec({5, 6}));

  CHECK(code_of([] {
          wpd_cost(vec({0, 0}), vec({1, 1}), Matrix::Identity(2, 2), mat(2, 2, {1, 1, 1, 1}));
        }) == ErrorCode::kSingularGramian);
}
