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
#include <string>
#include <vector>

#include "odtalloc/measures.hpp"

namespace odtalloc {

enum class ScenarioKind { kGaussianMixture, kGrid, kCityBox };

/// Instance recipe. Only the parameters of the selected kind are read.
///
///  grid             task i: o = d = lattice point i (+ `shift` on every
///                   destination coordinate); agent j: lattice point j. The
///                   lattice has unit spacing and side ceil(N^(1/n)), points
///                   enumerated with the first coordinate fastest.
///  gaussian_mixture origins, destinations and agents each pick a component
///                   uniformly, then add N(0, spread^2) noise per coordinate.
///                   Default centers: k * separation on every axis.
///  city_box         uniform points in `box` = {xmin, ymin, xmax, ymax}; when
///                   `degrees` is set the box is lon/lat and points are
///                   projected around (xmin, ymin). Requires dim = 2.
struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::kGrid;
  int dim = 1;
  std::size_t n_tasks = 1;
  std::size_t n_agents = 1;
  std::uint64_t seed = 0;

  double shift = 0.0;  // grid

  std::size_t components = 3;               // gaussian_mixture
  double spread = 1.0;
  double separation = 4.0;
  std::vector<std::vector<double>> centers;  // optional override

  std::vector<double> box = {0.0, 0.0, 10000.0, 10000.0};  // city_box
  bool degrees = false;
};

struct Scenario {
  TaskSet tasks;
  DiscreteMeasure agents;
};

ScenarioKind parse_scenario_kind(const std::string& name);
std::string scenario_kind_name(ScenarioKind kind);

/// Throws kInvalidSpec naming the offending field.
void validate(const ScenarioSpec& spec);

/// Pure function of the spec; uniform weights.
Scenario generate(const ScenarioSpec& spec);

/// Projected bounding rectangle {xmin, ymin, xmax, ymax} of a city box, in
/// meters.
std::vector<double> city_box_extent_meters(const ScenarioSpec& spec);

}  // namespace odtalloc
