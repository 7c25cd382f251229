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

/*
 * C interface to the odtalloc task-allocation solver.
 *
 * Every function returns an odt_status. On failure, odt_last_error() returns
 * a message for the calling thread that stays valid until the next failing
 * call on that thread. Handles are opaque and owned by the caller; release
 * them with the matching *_free function. Strings returned through `char**`
 * out-parameters are released with odt_string_free.
 */
#ifndef ODTALLOC_ODTALLOC_H
#define ODTALLOC_ODTALLOC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  ifdef ODTALLOC_BUILDING
#    define ODT_API __declspec(dllexport)
#  else
#    define ODT_API __declspec(dllimport)
#  endif
#else
#  define ODT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum odt_status {
  ODT_OK = 0,
  ODT_E_INVALID_ARGUMENT = 1,
  ODT_E_ALL_ZERO = 2,
  ODT_E_NEGATIVE_WEIGHT = 3,
  ODT_E_PARSE = 4,
  ODT_E_DIMENSION_MISMATCH = 5,
  ODT_E_OUT_OF_RANGE = 6,
  ODT_E_NOT_CONTROLLABLE = 7,
  ODT_E_SINGULAR_GRAMIAN = 8,
  ODT_E_MASS_MISMATCH = 9,
  ODT_E_ITERATION_LIMIT = 10,
  ODT_E_TOO_LARGE = 11,
  ODT_E_INVALID_SPEC = 12,
  ODT_E_IO = 13,
  ODT_E_INTERNAL = 14
} odt_status;

typedef enum odt_method {
  ODT_METHOD_EXACT = 0,
  ODT_METHOD_ENTROPIC = 1,
  ODT_METHOD_REDUCED = 2
} odt_method;

typedef struct odt_tasks odt_tasks;
typedef struct odt_agents odt_agents;
typedef struct odt_plan odt_plan;

ODT_API const char* odt_version(void);
/* "DimensionMismatch", "IterationLimit", ... ; "OK" for ODT_OK. */
ODT_API const char* odt_status_name(odt_status status);
ODT_API const char* odt_last_error(void);
ODT_API void odt_string_free(char* s);

/* ---- instances ---------------------------------------------------------- */

ODT_API odt_status odt_tasks_load_csv(const char* path, odt_tasks** out);
ODT_API odt_status odt_tasks_save_csv(const odt_tasks* tasks, const char* path);
/* origins/destinations are count x dim row-major; ids may be NULL. */
ODT_API odt_status odt_tasks_create(size_t count, size_t dim, const double* origins,
                                    const double* destinations, const double* weights,
                                    odt_tasks** out);
ODT_API size_t odt_tasks_count(const odt_tasks* tasks);
ODT_API size_t odt_tasks_dim(const odt_tasks* tasks);
ODT_API void odt_tasks_free(odt_tasks* tasks);

ODT_API odt_status odt_agents_load_csv(const char* path, odt_agents** out);
ODT_API odt_status odt_agents_save_csv(const odt_agents* agents, const char* path);
ODT_API odt_status odt_agents_create(size_t count, size_t dim, const double* points,
                                     const double* weights, odt_agents** out);
ODT_API size_t odt_agents_count(const odt_agents* agents);
ODT_API size_t odt_agents_dim(const odt_agents* agents);
ODT_API void odt_agents_free(odt_agents* agents);

/* Scenario recipe as JSON: {"kind", "dim", "tasks", "agents", "seed",
 * "params": {...}}. Writes the normalized recipe to *spec_out when non-NULL. */
ODT_API odt_status odt_generate(const char* spec_json, odt_tasks** tasks_out,
                                odt_agents** agents_out, char** spec_out);

/* ---- solving ------------------------------------------------------------ */

typedef struct odt_solve_options {
  odt_method method;
  double epsilon;  /* entropic; <= 0 selects 1e-3 x cost spread */
  double tol;      /* entropic marginal tolerance */
  int max_iter;    /* entropic iteration cap */
  int check_unique;
} odt_solve_options;

ODT_API odt_solve_options odt_solve_options_default(void);

ODT_API odt_status odt_solve(const odt_tasks* tasks, const odt_agents* agents,
                             const odt_solve_options* options, odt_plan** out);

ODT_API double odt_plan_objective(const odt_plan* plan);
ODT_API size_t odt_plan_entry_count(const odt_plan* plan);
ODT_API odt_status odt_plan_entry(const odt_plan* plan, size_t k, size_t* task,
                                  size_t* agent, double* mass);
ODT_API int odt_plan_unique(const odt_plan* plan);
ODT_API void odt_plan_free(odt_plan* plan);

/* Plan file and plot rows, labelled with the instance ids. */
ODT_API odt_status odt_plan_to_json(const odt_plan* plan, const odt_tasks* tasks,
                                    const odt_agents* agents, char** out);
ODT_API odt_status odt_plan_plot_csv(const odt_plan* plan, const odt_tasks* tasks,
                                     const odt_agents* agents, char** out);
ODT_API odt_status odt_plan_from_json(const char* json, const odt_tasks* tasks,
                                      const odt_agents* agents, odt_plan** out);

/* ---- verification ------------------------------------------------------- */

/* check: "twist" | "nondegeneracy" | "monge" | "nestedness" | "stability".
 * nestedness needs tasks + agents; stability needs tasks, agents and plan.
 * tol <= 0 selects 1e-8 x max(1, max|c|) for stability. */
typedef struct odt_verify_request {
  const char* check;
  int dim;
  size_t samples;
  uint64_t seed;
  size_t grid;
  double tol;
  const odt_tasks* tasks;
  const odt_agents* agents;
  const odt_plan* plan;
} odt_verify_request;

ODT_API odt_verify_request odt_verify_request_default(void);

/* Writes the report JSON to *report_json and 1/0 to *passed. */
ODT_API odt_status odt_verify(const odt_verify_request* request, char** report_json,
                              int* passed);

/* ---- misc --------------------------------------------------------------- */

ODT_API odt_status odt_trip_cost(size_t dim, const double* origin,
                                 const double* destination, const double* agent,
                                 double* out);

/* Lower-case hex SHA-256 of a file's bytes. */
ODT_API odt_status odt_file_sha256(const char* path, char** hex_out);

#ifdef __cplusplus
}
#endif

#endif /* ODTALLOC_ODTALLOC_H */
