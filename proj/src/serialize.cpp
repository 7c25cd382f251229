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

#include "odtalloc/serialize.hpp"

#include <unordered_map>

#include "odtalloc/error.hpp"

namespace odtalloc {

using ojson = nlohmann::ordered_json;

nlohmann::ordered_json plan_to_json(const PlanDocument& doc, const TaskSet& tasks,
                                    const DiscreteMeasure& agents) {
  if (doc.plan.n_tasks != tasks.size() || doc.plan.n_agents != agents.size())
    fail(ErrorCode::kDimensionMismatch, "plan does not match the instance");
  ojson out;
  out["objective"] = doc.plan.objective;
  ojson entries = ojson::array();
  for (const auto& e : doc.plan.entries)
    entries.push_back(ojson{{"task", tasks.ids()[e.task]},
                            {"agent", agents.ids()[e.agent]},
                            {"mass", e.mass}});
  out["entries"] = std::move(entries);
  out["duals"] = ojson{{"u", doc.duals.u}, {"v", doc.duals.v}};
  out["method"] = doc.method;
  out["unique"] = doc.unique;
  return out;
}

namespace {

std::unordered_map<std::string, std::size_t> id_lookup(
    const std::vector<std::string>& ids) {
  std::unordered_map<std::string, std::size_t> lookup;
  for (std::size_t k = 0; k < ids.size(); ++k) lookup.emplace(ids[k], k);
  return lookup;
}

}  // namespace

PlanDocument plan_from_json(const std::string& text, const TaskSet& tasks,
                            const DiscreteMeasure& agents) {
  PlanDocument doc;
  try {
    const auto j = nlohmann::json::parse(text);
    const auto task_ids = id_lookup(tasks.ids());
    const auto agent_ids = id_lookup(agents.ids());
    doc.plan.n_tasks = tasks.size();
    doc.plan.n_agents = agents.size();
    doc.plan.objective = j.at("objective").get<double>();
    for (const auto& e : j.at("entries")) {
      const auto t = task_ids.find(e.at("task").get<std::string>());
      const auto a = agent_ids.find(e.at("agent").get<std::string>());
      if (t == task_ids.end() || a == agent_ids.end())
        fail(ErrorCode::kParseError, "plan refers to an unknown task or agent id");
      doc.plan.entries.push_back({t->second, a->second, e.at("mass").get<double>()});
    }
    doc.duals.u = j.at("duals").at("u").get<std::vector<double>>();
    doc.duals.v = j.at("duals").at("v").get<std::vector<double>>();
    doc.method = j.value("method", std::string("exact"));
    doc.unique = j.value("unique", false);
  } catch (const nlohmann::json::exception& ex) {
    fail(ErrorCode::kParseError, std::string("malformed plan JSON: ") + ex.what());
  }
  if (doc.duals.u.size() != tasks.size() || doc.duals.v.size() != agents.size())
    fail(ErrorCode::kDimensionMismatch, "plan duals do not match the instance");
  return doc;
}

std::string plot_csv(const TransportPlan& plan, const TaskSet& tasks,
                     const DiscreteMeasure& agents) {
  const int n = tasks.dim();
  std::string out = "task_id,agent_id,mass";
  for (int k = 1; k <= n; ++k) out += ",o" + std::to_string(k);
  for (int k = 1; k <= n; ++k) out += ",d" + std::to_string(k);
  for (int k = 1; k <= n; ++k) out += ",y" + std::to_string(k);
  out += '\n';
  auto put = [&out](const Vector& v) {
    for (Eigen::Index k = 0; k < v.size(); ++k) {
      out += ',';
      out += format_double(v[k]);
    }
  };
  for (const auto& e : plan.entries) {
    out += tasks.ids()[e.task];
    out += ',';
    out += agents.ids()[e.agent];
    out += ',';
    out += format_double(e.mass);
    put(tasks.origins()[e.task]);
    put(tasks.destinations()[e.task]);
    put(agents.points()[e.agent]);
    out += '\n';
  }
  return out;
}

nlohmann::ordered_json report_to_json(const ConditionReport& report) {
  ojson out;
  out["condition"] = report.condition;
  out["passed"] = report.passed;
  out["samples"] = report.samples;
  out["worst_case"] = report.worst_case;
  out["witness"] = report.witness ? ojson(*report.witness) : ojson(nullptr);
  return out;
}

nlohmann::ordered_json spec_to_json(const ScenarioSpec& spec) {
  ojson out;
  out["kind"] = scenario_kind_name(spec.kind);
  out["dim"] = spec.dim;
  out["tasks"] = spec.n_tasks;
  out["agents"] = spec.n_agents;
  out["seed"] = spec.seed;
  ojson params;
  switch (spec.kind) {
    case ScenarioKind::kGrid:
      params["shift"] = spec.shift;
      break;
    case ScenarioKind::kGaussianMixture:
      params["components"] = spec.components;
      params["spread"] = spec.spread;
      params["separation"] = spec.separation;
      if (!spec.centers.empty()) params["centers"] = spec.centers;
      break;
    case ScenarioKind::kCityBox:
      params["box"] = spec.box;
      params["degrees"] = spec.degrees;
      break;
  }
  out["params"] = std::move(params);
  return out;
}

ScenarioSpec spec_from_json(const nlohmann::json& j) {
  ScenarioSpec spec;
  auto field = [&](const char* name, auto& target) {
    if (!j.contains(name)) return;
    try {
      j.at(name).get_to(target);
    } catch (const nlohmann::json::exception&) {
      fail(ErrorCode::kInvalidSpec, std::string(name) + ": wrong type");
    }
  };
  if (!j.is_object()) fail(ErrorCode::kInvalidSpec, "spec: must be a JSON object");
  if (!j.contains("kind")) fail(ErrorCode::kInvalidSpec, "kind: missing");
  std::string kind;
  field("kind", kind);
  spec.kind = parse_scenario_kind(kind);
  long long dim = spec.dim;
  field("dim", dim);
  spec.dim = static_cast<int>(dim);
  long long n_tasks = static_cast<long long>(spec.n_tasks);
  long long n_agents = static_cast<long long>(spec.n_agents);
  field("tasks", n_tasks);
  field("agents", n_agents);
  if (n_tasks < 1) fail(ErrorCode::kInvalidSpec, "tasks: must be >= 1");
  if (n_agents < 1) fail(ErrorCode::kInvalidSpec, "agents: must be >= 1");
  spec.n_tasks = static_cast<std::size_t>(n_tasks);
  spec.n_agents = static_cast<std::size_t>(n_agents);
  field("seed", spec.seed);
  if (j.contains("params")) {
    const auto& p = j.at("params");
    auto param = [&](const char* name, auto& target) {
      if (!p.contains(name)) return;
      try {
        p.at(name).get_to(target);
      } catch (const nlohmann::json::exception&) {
        fail(ErrorCode::kInvalidSpec, std::string(name) + ": wrong type");
      }
    };
    param("shift", spec.shift);
    param("components", spec.components);
    param("spread", spec.spread);
    param("separation", spec.separation);
    param("centers", spec.centers);
    param("box", spec.box);
    param("degrees", spec.degrees);
  }
  validate(spec);
  return spec;
}

nlohmann::ordered_json cost_matrix_to_json(const CostMatrix& cost) {
  ojson rows = ojson::array();
  for (std::size_t i = 0; i < cost.n_tasks(); ++i) {
    ojson row = ojson::array();
    for (std::size_t j = 0; j < cost.n_agents(); ++j) row.push_back(cost(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string to_text(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace odtalloc
