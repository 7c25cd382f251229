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

#include "odtalloc/odtalloc.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <optional>
#include <string>

#include <openssl/evp.h>

#include "odtalloc/analysis.hpp"
#include "odtalloc/error.hpp"
#include "odtalloc/serialize.hpp"
#include "odtalloc/solver.hpp"

#ifndef ODTALLOC_VERSION
#define ODTALLOC_VERSION "0.0.0"
#endif

struct odt_tasks {
  odtalloc::TaskSet value;
};

struct odt_agents {
  odtalloc::DiscreteMeasure value;
};

struct odt_plan {
  odtalloc::PlanDocument doc;
};

namespace {

using odtalloc::ErrorCode;

thread_local std::string g_last_error;

odt_status to_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kAllZero: return ODT_E_ALL_ZERO;
    case ErrorCode::kNegativeWeight: return ODT_E_NEGATIVE_WEIGHT;
    case ErrorCode::kParseError: return ODT_E_PARSE;
    case ErrorCode::kDimensionMismatch: return ODT_E_DIMENSION_MISMATCH;
    case ErrorCode::kOutOfRange: return ODT_E_OUT_OF_RANGE;
    case ErrorCode::kNotControllable: return ODT_E_NOT_CONTROLLABLE;
    case ErrorCode::kSingularGramian: return ODT_E_SINGULAR_GRAMIAN;
    case ErrorCode::kMassMismatch: return ODT_E_MASS_MISMATCH;
    case ErrorCode::kIterationLimit: return ODT_E_ITERATION_LIMIT;
    case ErrorCode::kTooLarge: return ODT_E_TOO_LARGE;
    case ErrorCode::kInvalidSpec: return ODT_E_INVALID_SPEC;
    case ErrorCode::kIoError: return ODT_E_IO;
    case ErrorCode::kInvalidArgument: return ODT_E_INVALID_ARGUMENT;
  }
  return ODT_E_INTERNAL;
}

odt_status set_error(odt_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Runs `body`, translating exceptions into status codes.
template <class F>
odt_status guarded(F&& body) {
  try {
    body();
    return ODT_OK;
  } catch (const odtalloc::Error& e) {
    return set_error(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(ODT_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(ODT_E_INTERNAL, e.what());
  }
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

void require(bool condition, const char* what) {
  if (!condition) odtalloc::fail(ErrorCode::kInvalidArgument, what);
}

std::vector<odtalloc::Vector> rows_of(const double* data, std::size_t count,
                                      std::size_t dim) {
  std::vector<odtalloc::Vector> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k)
    out.push_back(Eigen::Map<const odtalloc::Vector>(
        data + k * dim, static_cast<Eigen::Index>(dim)));
  return out;
}

odtalloc::PlanDocument solve_document(const odtalloc::TaskSet& tasks,
                                      const odtalloc::DiscreteMeasure& agents,
                                      const odt_solve_options& options) {
  using namespace odtalloc;
  PlanDocument doc;
  switch (options.method) {
    case ODT_METHOD_EXACT: {
      const CostMatrix cost = cost_matrix(tasks, agents);
      auto solution = solve_exact(cost, tasks.weights(), agents.weights());
      doc.method = "exact";
      if (options.check_unique)
        doc.unique = support_is_stable(cost, tasks.weights(), agents.weights(),
                                       solution.plan);
      doc.plan = std::move(solution.plan);
      doc.duals = std::move(solution.duals);
      break;
    }
    case ODT_METHOD_REDUCED: {
      auto solution = solve_via_reduction(tasks, agents);
      doc.method = "reduced";
      if (options.check_unique) {
        const auto reduced =
            reduced_cost_matrix(index_pushforward(tasks), agents);
        doc.unique = support_is_stable(reduced, tasks.weights(), agents.weights(),
                                       solution.plan);
      }
      doc.plan = std::move(solution.plan);
      doc.duals = std::move(solution.duals);
      break;
    }
    case ODT_METHOD_ENTROPIC: {
      const CostMatrix cost = cost_matrix(tasks, agents);
      EntropicOptions eo;
      eo.epsilon = options.epsilon > 0.0 ? options.epsilon
                                         : 1e-3 * std::max(cost.spread(), 1e-300);
      eo.tol = options.tol;
      eo.max_iter = options.max_iter;
      auto solution = solve_entropic(cost, tasks.weights(), agents.weights(), eo);
      doc.method = "entropic";
      doc.plan = std::move(solution.plan);
      doc.duals = std::move(solution.potentials);
      break;
    }
    default:
      fail(ErrorCode::kInvalidArgument, "unknown solve method");
  }
  return doc;
}

odtalloc::ConditionReport stability_report(const odt_verify_request& r) {
  using namespace odtalloc;
  require(r.tasks && r.agents && r.plan, "stability needs tasks, agents and a plan");
  const auto& tasks = r.tasks->value;
  const auto& agents = r.agents->value;
  const auto& doc = r.plan->doc;
  const CostMatrix cost = cost_matrix(tasks, agents);
  const double tol = r.tol > 0.0 ? r.tol : 1e-8 * std::max(1.0, cost.max_abs());
  const auto stability = check_stability(doc.plan, doc.duals, cost, tol);
  const double marginal = marginal_violation(doc.plan, tasks.weights(), agents.weights());
  bool nonnegative = true;
  for (const auto& e : doc.plan.entries) nonnegative = nonnegative && e.mass >= 0.0;
  ConditionReport report;
  report.condition = "stability";
  report.samples = cost.n_tasks() * cost.n_agents();
  report.worst_case = std::max(stability.max_violation, stability.max_slack_on_support);
  report.witness = std::vector<double>{stability.max_violation,
                                       stability.max_slack_on_support, marginal};
  report.passed = stability.passed && marginal <= 1e-9 && nonnegative;
  return report;
}

odtalloc::ConditionReport monge_report(const odt_verify_request& r) {
  using namespace odtalloc;
  if (!(r.tasks && r.agents)) return verify_monge_1d(r.samples, r.seed);
  const auto& tasks = r.tasks->value;
  const auto& agents = r.agents->value;
  const auto index = index_pushforward(tasks);
  const auto solution =
      solve_exact(reduced_cost_matrix(index, agents), index.weights(), agents.weights());
  ConditionReport report;
  report.condition = "monge";
  report.samples = solution.plan.entries.size();
  report.worst_case =
      static_cast<double>(count_crossings_1d(solution.plan, index, agents));
  report.passed = report.worst_case == 0.0;
  return report;
}

}  // namespace

extern "C" {

const char* odt_version(void) { return ODTALLOC_VERSION; }

const char* odt_status_name(odt_status status) {
  switch (status) {
    case ODT_OK: return "OK";
    case ODT_E_INVALID_ARGUMENT: return "InvalidArgument";
    case ODT_E_ALL_ZERO: return "AllZero";
    case ODT_E_NEGATIVE_WEIGHT: return "NegativeWeight";
    case ODT_E_PARSE: return "ParseError";
    case ODT_E_DIMENSION_MISMATCH: return "DimensionMismatch";
    case ODT_E_OUT_OF_RANGE: return "OutOfRange";
    case ODT_E_NOT_CONTROLLABLE: return "NotControllable";
    case ODT_E_SINGULAR_GRAMIAN: return "SingularGramian";
    case ODT_E_MASS_MISMATCH: return "MassMismatch";
    case ODT_E_ITERATION_LIMIT: return "IterationLimit";
    case ODT_E_TOO_LARGE: return "TooLarge";
    case ODT_E_INVALID_SPEC: return "InvalidSpec";
    case ODT_E_IO: return "IoError";
    case ODT_E_INTERNAL: return "Internal";
  }
  return "Unknown";
}

const char* odt_last_error(void) { return g_last_error.c_str(); }

void odt_string_free(char* s) { std::free(s); }

odt_status odt_tasks_load_csv(const char* path, odt_tasks** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new odt_tasks{odtalloc::load_tasks_csv(path)};
  });
}

odt_status odt_tasks_save_csv(const odt_tasks* tasks, const char* path) {
  return guarded([&] {
    require(tasks && path, "null argument");
    odtalloc::save_tasks_csv(tasks->value, path);
  });
}

odt_status odt_tasks_create(size_t count, size_t dim, const double* origins,
                            const double* destinations, const double* weights,
                            odt_tasks** out) {
  return guarded([&] {
    require(origins && destinations && weights && out, "null argument");
    require(count > 0 && dim > 0, "count and dim must be positive");
    *out = new odt_tasks{odtalloc::TaskSet(rows_of(origins, count, dim),
                                           rows_of(destinations, count, dim),
                                           std::span(weights, count))};
  });
}

size_t odt_tasks_count(const odt_tasks* tasks) { return tasks ? tasks->value.size() : 0; }

size_t odt_tasks_dim(const odt_tasks* tasks) {
  return tasks ? static_cast<size_t>(tasks->value.dim()) : 0;
}

void odt_tasks_free(odt_tasks* tasks) { delete tasks; }

odt_status odt_agents_load_csv(const char* path, odt_agents** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new odt_agents{odtalloc::load_agents_csv(path)};
  });
}

odt_status odt_agents_save_csv(const odt_agents* agents, const char* path) {
  return guarded([&] {
    require(agents && path, "null argument");
    odtalloc::save_agents_csv(agents->value, path);
  });
}

odt_status odt_agents_create(size_t count, size_t dim, const double* points,
                             const double* weights, odt_agents** out) {
  return guarded([&] {
    require(points && weights && out, "null argument");
    require(count > 0 && dim > 0, "count and dim must be positive");
    *out = new odt_agents{odtalloc::DiscreteMeasure(rows_of(points, count, dim),
                                                    std::span(weights, count))};
  });
}

size_t odt_agents_count(const odt_agents* agents) {
  return agents ? agents->value.size() : 0;
}

size_t odt_agents_dim(const odt_agents* agents) {
  return agents ? static_cast<size_t>(agents->value.dim()) : 0;
}

void odt_agents_free(odt_agents* agents) { delete agents; }

odt_status odt_generate(const char* spec_json, odt_tasks** tasks_out,
                        odt_agents** agents_out, char** spec_out) {
  return guarded([&] {
    require(spec_json && tasks_out && agents_out, "null argument");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(spec_json);
    } catch (const nlohmann::json::exception& e) {
      odtalloc::fail(ErrorCode::kParseError, std::string("spec: ") + e.what());
    }
    const auto spec = odtalloc::spec_from_json(j);
    auto scenario = odtalloc::generate(spec);
    auto* tasks = new odt_tasks{std::move(scenario.tasks)};
    auto* agents = new odt_agents{std::move(scenario.agents)};
    if (spec_out) {
      try {
        *spec_out = copy_string(odtalloc::to_text(odtalloc::spec_to_json(spec)));
      } catch (...) {
        delete tasks;
        delete agents;
        throw;
      }
    }
    *tasks_out = tasks;
    *agents_out = agents;
  });
}

odt_solve_options odt_solve_options_default(void) {
  return odt_solve_options{ODT_METHOD_EXACT, 0.0, 1e-8, 10000, 1};
}

odt_status odt_solve(const odt_tasks* tasks, const odt_agents* agents,
                     const odt_solve_options* options, odt_plan** out) {
  return guarded([&] {
    require(tasks && agents && out, "null argument");
    const odt_solve_options opts = options ? *options : odt_solve_options_default();
    *out = new odt_plan{solve_document(tasks->value, agents->value, opts)};
  });
}

double odt_plan_objective(const odt_plan* plan) {
  return plan ? plan->doc.plan.objective : 0.0;
}

size_t odt_plan_entry_count(const odt_plan* plan) {
  return plan ? plan->doc.plan.entries.size() : 0;
}

odt_status odt_plan_entry(const odt_plan* plan, size_t k, size_t* task,
                          size_t* agent, double* mass) {
  return guarded([&] {
    require(plan, "null plan");
    if (k >= plan->doc.plan.entries.size())
      odtalloc::fail(ErrorCode::kOutOfRange, "entry index out of range");
    const auto& e = plan->doc.plan.entries[k];
    if (task) *task = e.task;
    if (agent) *agent = e.agent;
    if (mass) *mass = e.mass;
  });
}

int odt_plan_unique(const odt_plan* plan) { return plan && plan->doc.unique ? 1 : 0; }

void odt_plan_free(odt_plan* plan) { delete plan; }

odt_status odt_plan_to_json(const odt_plan* plan, const odt_tasks* tasks,
                            const odt_agents* agents, char** out) {
  return guarded([&] {
    require(plan && tasks && agents && out, "null argument");
    *out = copy_string(odtalloc::to_text(
        odtalloc::plan_to_json(plan->doc, tasks->value, agents->value)));
  });
}

odt_status odt_plan_plot_csv(const odt_plan* plan, const odt_tasks* tasks,
                             const odt_agents* agents, char** out) {
  return guarded([&] {
    require(plan && tasks && agents && out, "null argument");
    *out = copy_string(
        odtalloc::plot_csv(plan->doc.plan, tasks->value, agents->value));
  });
}

odt_status odt_plan_from_json(const char* json, const odt_tasks* tasks,
                              const odt_agents* agents, odt_plan** out) {
  return guarded([&] {
    require(json && tasks && agents && out, "null argument");
    *out = new odt_plan{odtalloc::plan_from_json(json, tasks->value, agents->value)};
  });
}

odt_verify_request odt_verify_request_default(void) {
  odt_verify_request r;
  r.check = "twist";
  r.dim = 2;
  r.samples = 1000;
  r.seed = 0;
  r.grid = 32;
  r.tol = 0.0;
  r.tasks = nullptr;
  r.agents = nullptr;
  r.plan = nullptr;
  return r;
}

odt_status odt_verify(const odt_verify_request* request, char** report_json,
                      int* passed) {
  return guarded([&] {
    require(request && request->check && report_json && passed, "null argument");
    const std::string check = request->check;
    odtalloc::ConditionReport report;
    if (check == "twist") {
      report = odtalloc::verify_twist(request->dim, request->samples, request->seed);
    } else if (check == "nondegeneracy") {
      report = odtalloc::verify_nondegeneracy(request->dim, request->samples,
                                              request->seed);
    } else if (check == "monge") {
      report = monge_report(*request);
    } else if (check == "nestedness") {
      require(request->tasks && request->agents, "nestedness needs tasks and agents");
      report = odtalloc::check_nestedness_1d(request->tasks->value,
                                             request->agents->value, request->grid);
    } else if (check == "stability") {
      report = stability_report(*request);
    } else {
      odtalloc::fail(ErrorCode::kInvalidArgument, "unknown check '" + check + "'");
    }
    *report_json = copy_string(odtalloc::to_text(odtalloc::report_to_json(report)));
    *passed = report.passed ? 1 : 0;
  });
}

odt_status odt_trip_cost(size_t dim, const double* origin, const double* destination,
                         const double* agent, double* out) {
  return guarded([&] {
    require(origin && destination && agent && out && dim > 0, "invalid argument");
    const auto n = static_cast<Eigen::Index>(dim);
    *out = odtalloc::trip_cost(Eigen::Map<const odtalloc::Vector>(origin, n),
                               Eigen::Map<const odtalloc::Vector>(destination, n),
                               Eigen::Map<const odtalloc::Vector>(agent, n));
  });
}

odt_status odt_file_sha256(const char* path, char** hex_out) {
  return guarded([&] {
    require(path && hex_out, "null argument");
    std::ifstream in(path, std::ios::binary);
    if (!in) odtalloc::fail(ErrorCode::kIoError, std::string("cannot open ") + path);
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx) throw std::bad_alloc();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    char buffer[1 << 14];
    while (in.read(buffer, sizeof(buffer)) || in.gcount() > 0)
      EVP_DigestUpdate(ctx, buffer, static_cast<size_t>(in.gcount()));
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    EVP_DigestFinal_ex(ctx, digest, &length);
    EVP_MD_CTX_free(ctx);
    static const char* kHex = "0123456789abcdef";
    std::string hex;
    for (unsigned int k = 0; k < length; ++k) {
      hex += kHex[digest[k] >> 4];
      hex += kHex[digest[k] & 0xF];
    }
    *hex_out = copy_string(hex);
  });
}

}  // extern "C"
