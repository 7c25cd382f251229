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

#include <string>

#include <json.hpp>

#include "odtalloc/analysis.hpp"
#include "odtalloc/cost.hpp"
#include "odtalloc/scenarios.hpp"
#include "odtalloc/solver.hpp"

namespace odtalloc {

/// Plan file: {"objective", "entries": [{"task", "agent", "mass"}],
/// "duals": {"u", "v"}, "method", "unique"}. Tasks and agents are named by
/// their CSV ids.
struct PlanDocument {
  TransportPlan plan;
  DualPotentials duals;
  std::string method = "exact";
  bool unique = false;
};

nlohmann::ordered_json plan_to_json(const PlanDocument& doc, const TaskSet& tasks,
                                    const DiscreteMeasure& agents);

/// Resolves ids against the given instance. Throws kParseError on unknown
/// ids or malformed documents and kDimensionMismatch on dual length errors.
PlanDocument plan_from_json(const std::string& text, const TaskSet& tasks,
                            const DiscreteMeasure& agents);

/// One row per support entry: task_id,agent_id,mass,o1..on,d1..dn,y1..yn.
std::string plot_csv(const TransportPlan& plan, const TaskSet& tasks,
                     const DiscreteMeasure& agents);

nlohmann::ordered_json report_to_json(const ConditionReport& report);

nlohmann::ordered_json spec_to_json(const ScenarioSpec& spec);
/// Missing fields keep their defaults. Throws kInvalidSpec.
ScenarioSpec spec_from_json(const nlohmann::json& j);

/// Row-major nested arrays.
nlohmann::ordered_json cost_matrix_to_json(const CostMatrix& cost);

/// dump(2) plus a trailing newline.
std::string to_text(const nlohmann::ordered_json& j);

}  // namespace odtalloc
