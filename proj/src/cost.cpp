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

#include "odtalloc/cost.hpp"

#include <algorithm>
#include <cmath>

#include "odtalloc/error.hpp"

namespace odtalloc {

CostMatrix::CostMatrix(Matrix values) : values_(std::move(values)) {
  if (values_.rows() < 1 || values_.cols() < 1)
    fail(ErrorCode::kInvalidArgument, "cost matrix must be non-empty");
  if (!values_.allFinite())
    fail(ErrorCode::kInvalidArgument, "cost matrix entries must be finite");
}

double CostMatrix::max_abs() const noexcept { return values_.cwiseAbs().maxCoeff(); }

double CostMatrix::spread() const noexcept {
  return values_.maxCoeff() - values_.minCoeff();
}

namespace {

void require_same_dim(const Vector& a, const Vector& b, const Vector& c) {
  if (a.size() != b.size() || a.size() != c.size() || a.size() == 0)
    fail(ErrorCode::kDimensionMismatch, "trip cost arguments differ in dimension");
}

}  // namespace

double trip_cost(const Vector& o, const Vector& d, const Vector& y) {
  require_same_dim(o, d, y);
  return (o - y).squaredNorm() + (o - d).squaredNorm() + (d - y).squaredNorm();
}

Vector grad_x(const Vector& o, const Vector& d, const Vector& y) {
  require_same_dim(o, d, y);
  const auto n = o.size();
  Vector g(2 * n);
  g.head(n) = 2.0 * (o - y) + 2.0 * (o - d);
  g.tail(n) = 2.0 * (d - y) + 2.0 * (d - o);
  return g;
}

Vector grad_y(const Vector& o, const Vector& d, const Vector& y) {
  require_same_dim(o, d, y);
  return 4.0 * y - 2.0 * (o + d);
}

Matrix mixed_hessian(const Vector& o, const Vector& d, const Vector& y) {
  require_same_dim(o, d, y);
  const auto n = o.size();
  Matrix h(2 * n, n);
  h.topRows(n) = -2.0 * Matrix::Identity(n, n);
  h.bottomRows(n) = -2.0 * Matrix::Identity(n, n);
  return h;
}

CostMatrix cost_matrix(const TaskSet& tasks, const DiscreteMeasure& agents) {
  if (tasks.dim() != agents.dim())
    fail(ErrorCode::kDimensionMismatch, "tasks and agents differ in dimension");
  Matrix c(tasks.size(), agents.size());
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const auto& o = tasks.origins()[i];
    const auto& d = tasks.destinations()[i];
    for (std::size_t j = 0; j < agents.size(); ++j)
      c(i, j) = trip_cost(o, d, agents.points()[j]);
  }
  return CostMatrix(std::move(c));
}

CostMatrix reduced_cost_matrix(const DiscreteMeasure& index_measure,
                               const DiscreteMeasure& agents) {
  if (index_measure.dim() != agents.dim())
    fail(ErrorCode::kDimensionMismatch, "index and agents differ in dimension");
  Matrix c(index_measure.size(), agents.size());
  for (std::size_t i = 0; i < index_measure.size(); ++i)
    for (std::size_t j = 0; j < agents.size(); ++j)
      c(i, j) = -index_measure.points()[i].dot(agents.points()[j]);
  return CostMatrix(std::move(c));
}

double task_offset(const Vector& o, const Vector& d) {
  return 2.0 * o.squaredNorm() + 2.0 * d.squaredNorm() - 2.0 * o.dot(d);
}

double agent_offset(const Vector& y) { return 2.0 * y.squaredNorm(); }

double reduction_constant(const TaskSet& tasks, const DiscreteMeasure& agents) {
  if (tasks.dim() != agents.dim())
    fail(ErrorCode::kDimensionMismatch, "tasks and agents differ in dimension");
  double k = 0.0;
  for (std::size_t j = 0; j < agents.size(); ++j)
    k += agents.weights()[j] * agent_offset(agents.points()[j]);
  for (std::size_t i = 0; i < tasks.size(); ++i)
    k += tasks.weights()[i] *
         task_offset(tasks.origins()[i], tasks.destinations()[i]);
  return k;
}

// ---------------------------------------------------------------------------

Matrix matrix_exponential(const Matrix& a) {
  if (a.rows() != a.cols())
    fail(ErrorCode::kDimensionMismatch, "matrix exponential needs a square matrix");
  const auto n = a.rows();
  if (n == 0) return a;
  // Scale so that ||A / 2^s||_1 <= 1/2, where the order-12 Taylor tail is
  // below double precision, then square s times.
  const double norm = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Matrix scaled = a / std::ldexp(1.0, squarings);

  Matrix result = Matrix::Identity(n, n);
  Matrix term = Matrix::Identity(n, n);
  for (int k = 1; k <= 12; ++k) {
    term = term * scaled / static_cast<double>(k);
    result += term;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

Gramian wpd_gramian(const DynamicsSpec& spec) {
  const auto n = spec.a.rows();
  if (n < 1 || spec.a.cols() != n || spec.b.rows() != n || spec.b.cols() < 1)
    fail(ErrorCode::kDimensionMismatch, "A must be n x n and B must be n x m");
  if (!(spec.t1 > spec.t0))
    fail(ErrorCode::kInvalidArgument, "time interval must satisfy t1 > t0");
  if (spec.quadrature_steps < 2 || spec.quadrature_steps % 2 != 0)
    fail(ErrorCode::kInvalidArgument, "quadrature_steps must be a positive even integer");

  const double h = (spec.t1 - spec.t0) / spec.quadrature_steps;
  const Matrix bbt = spec.b * spec.b.transpose();
  Matrix m = Matrix::Zero(n, n);
  for (int k = 0; k <= spec.quadrature_steps; ++k) {
    const double tau = spec.t0 + k * h;
    const Matrix phi = matrix_exponential(spec.a * (spec.t1 - tau));
    const double w = (k == 0 || k == spec.quadrature_steps) ? 1.0
                     : (k % 2 == 1)                         ? 4.0
                                                            : 2.0;
    m += w * (phi * bbt * phi.transpose());
  }
  m *= h / 3.0;
  m = 0.5 * (m + m.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Matrix> eig(m, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(hi > 0.0) || lo <= 1e-10 * hi)
    fail(ErrorCode::kNotControllable,
         "controllability Gramian is not positive definite");
  return {matrix_exponential(spec.a * (spec.t1 - spec.t0)), std::move(m)};
}

namespace {

void check_gramian_shapes(const Vector& x, const Vector& y, const Matrix& phi,
                          const Matrix& m) {
  const auto n = x.size();
  if (y.size() != n || phi.rows() != n || phi.cols() != n || m.rows() != n ||
      m.cols() != n)
    fail(ErrorCode::kDimensionMismatch, "state dimensions disagree");
}

}  // namespace

double wpd_cost(const Vector& x, const Vector& y, const Matrix& phi,
                const Matrix& m) {
  check_gramian_shapes(x, y, phi, m);
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success)
    fail(ErrorCode::kSingularGramian, "Gramian is not positive definite");
  const Vector r = y - phi * x;
  return 0.5 * r.dot(llt.solve(r));
}

Whitened whiten(const Vector& x, const Vector& y, const Matrix& phi,
                const Matrix& m) {
  check_gramian_shapes(x, y, phi, m);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
  if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() <= 1e-12)
    fail(ErrorCode::kSingularGramian, "Gramian eigenvalue below 1e-12");
  const Vector inv_sqrt = eig.eigenvalues().cwiseSqrt().cwiseInverse();
  const Matrix root = eig.eigenvectors() * inv_sqrt.asDiagonal() *
                      eig.eigenvectors().transpose();
  return {root * (phi * x), root * y};
}

}  // namespace odtalloc
