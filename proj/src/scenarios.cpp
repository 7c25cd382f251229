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

#include "odtalloc/scenarios.hpp"

#include <cmath>

#include "odtalloc/error.hpp"
#include "odtalloc/rng.hpp"

namespace odtalloc {

ScenarioKind parse_scenario_kind(const std::string& name) {
  if (name == "gaussian_mixture") return ScenarioKind::kGaussianMixture;
  if (name == "grid") return ScenarioKind::kGrid;
  if (name == "city_box") return ScenarioKind::kCityBox;
  fail(ErrorCode::kInvalidSpec, "kind: unknown scenario kind '" + name + "'");
}

std::string scenario_kind_name(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::kGaussianMixture: return "gaussian_mixture";
    case ScenarioKind::kGrid: return "grid";
    case ScenarioKind::kCityBox: return "city_box";
  }
  return "unknown";
}

void validate(const ScenarioSpec& spec) {
  auto invalid = [](const std::string& field, const std::string& why) {
    fail(ErrorCode::kInvalidSpec, field + ": " + why);
  };
  if (spec.dim < 1) invalid("dim", "must be >= 1");
  if (spec.n_tasks < 1) invalid("tasks", "must be >= 1");
  if (spec.n_agents < 1) invalid("agents", "must be >= 1");
  switch (spec.kind) {
    case ScenarioKind::kGrid:
      if (!std::isfinite(spec.shift)) invalid("shift", "must be finite");
      break;
    case ScenarioKind::kGaussianMixture:
      if (!(spec.spread > 0.0) || !std::isfinite(spec.spread))
        invalid("spread", "must be positive");
      if (!std::isfinite(spec.separation)) invalid("separation", "must be finite");
      if (spec.centers.empty() && spec.components < 1)
        invalid("components", "must be >= 1");
      for (const auto& c : spec.centers)
        if (c.size() != static_cast<std::size_t>(spec.dim))
          invalid("centers", "every center must have dim coordinates");
      break;
    case ScenarioKind::kCityBox:
      if (spec.dim != 2) invalid("dim", "city_box requires dim = 2");
      if (spec.box.size() != 4) invalid("box", "needs xmin,ymin,xmax,ymax");
      for (double v : spec.box)
        if (!std::isfinite(v)) invalid("box", "corners must be finite");
      if (!(spec.box[0] < spec.box[2]) || !(spec.box[1] < spec.box[3]))
        invalid("box", "corners must be ordered (min < max)");
      if (spec.degrees &&
          (spec.box[0] < -180.0 || spec.box[2] > 180.0 || spec.box[1] < -90.0 ||
           spec.box[3] > 90.0))
        invalid("box", "degree corners out of range");
      break;
  }
}

namespace {

Vector lattice_point(std::size_t index, int dim, std::size_t side) {
  Vector p(dim);
  for (int k = 0; k < dim; ++k) {
    p[k] = static_cast<double>(index % side);
    index /= side;
  }
  return p;
}

std::size_t lattice_side(std::size_t count, int dim) {
  std::size_t side = 1;
  auto capacity = [dim](std::size_t s) {
    double c = 1.0;
    for (int k = 0; k < dim; ++k) c *= static_cast<double>(s);
    return c;
  };
  while (capacity(side) < static_cast<double>(count)) ++side;
  return side;
}

std::vector<Vector> mixture_centers(const ScenarioSpec& spec) {
  std::vector<Vector> centers;
  if (!spec.centers.empty()) {
    for (const auto& c : spec.centers)
      centers.push_back(Eigen::Map<const Vector>(c.data(), spec.dim));
    return centers;
  }
  for (std::size_t k = 0; k < spec.components; ++k)
    centers.push_back(Vector::Constant(spec.dim, static_cast<double>(k) * spec.separation));
  return centers;
}

Vector mixture_draw(Rng& rng, const std::vector<Vector>& centers, double spread) {
  const Vector& center = centers[rng.below(centers.size())];
  Vector p(center.size());
  for (Eigen::Index k = 0; k < p.size(); ++k) p[k] = center[k] + spread * rng.normal();
  return p;
}

Vector box_draw(Rng& rng, const ScenarioSpec& spec) {
  Vector p(2);
  p[0] = rng.uniform(spec.box[0], spec.box[2]);
  p[1] = rng.uniform(spec.box[1], spec.box[3]);
  return p;
}

Vector to_meters(const Vector& p, const ScenarioSpec& spec) {
  if (!spec.degrees) return p;
  const LonLat ll{p[0], p[1]};
  return project_lonlat(std::span(&ll, 1), LonLat{spec.box[0], spec.box[1]}).front();
}

}  // namespace

Scenario generate(const ScenarioSpec& spec) {
  validate(spec);
  const Rng root(spec.seed);
  Rng task_rng = root.split(1);
  Rng agent_rng = root.split(2);

  std::vector<Vector> origins, destinations, agents;
  origins.reserve(spec.n_tasks);
  destinations.reserve(spec.n_tasks);
  agents.reserve(spec.n_agents);

  switch (spec.kind) {
    case ScenarioKind::kGrid: {
      const std::size_t task_side = lattice_side(spec.n_tasks, spec.dim);
      const std::size_t agent_side = lattice_side(spec.n_agents, spec.dim);
      for (std::size_t i = 0; i < spec.n_tasks; ++i) {
        Vector o = lattice_point(i, spec.dim, task_side);
        destinations.push_back(o.array() + spec.shift);
        origins.push_back(std::move(o));
      }
      for (std::size_t j = 0; j < spec.n_agents; ++j)
        agents.push_back(lattice_point(j, spec.dim, agent_side));
      break;
    }
    case ScenarioKind::kGaussianMixture: {
      const auto centers = mixture_centers(spec);
      for (std::size_t i = 0; i < spec.n_tasks; ++i) {
        origins.push_back(mixture_draw(task_rng, centers, spec.spread));
        destinations.push_back(mixture_draw(task_rng, centers, spec.spread));
      }
      for (std::size_t j = 0; j < spec.n_agents; ++j)
        agents.push_back(mixture_draw(agent_rng, centers, spec.spread));
      break;
    }
    case ScenarioKind::kCityBox: {
      for (std::size_t i = 0; i < spec.n_tasks; ++i) {
        origins.push_back(to_meters(box_draw(task_rng, spec), spec));
        destinations.push_back(to_meters(box_draw(task_rng, spec), spec));
      }
      for (std::size_t j = 0; j < spec.n_agents; ++j)
        agents.push_back(to_meters(box_draw(agent_rng, spec), spec));
      break;
    }
  }

  const std::vector<double> task_w(spec.n_tasks, 1.0);
  const std::vector<double> agent_w(spec.n_agents, 1.0);
  return Scenario{TaskSet(std::move(origins), std::move(destinations), task_w),
                  DiscreteMeasure(std::move(agents), agent_w)};
}

std::vector<double> city_box_extent_meters(const ScenarioSpec& spec) {
  validate(spec);
  if (spec.kind != ScenarioKind::kCityBox)
    fail(ErrorCode::kInvalidSpec, "kind: extent is defined for city_box only");
  Vector lo(2), hi(2);
  lo << spec.box[0], spec.box[1];
  hi << spec.box[2], spec.box[3];
  lo = to_meters(lo, spec);
  hi = to_meters(hi, spec);
  return {lo[0], lo[1], hi[0], hi[1]};
}

}  // namespace odtalloc
