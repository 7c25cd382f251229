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

// odtalloc command-line front end: gen / solve / verify.
//
// Exit codes: 0 success or check passed, 1 solver failure or check failed,
// 2 usage, file or input-format error.

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "odtalloc/odtalloc.h"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StringDeleter {
  void operator()(char* s) const { odt_string_free(s); }
};
using CString = std::unique_ptr<char, StringDeleter>;

struct TasksDeleter {
  void operator()(odt_tasks* p) const { odt_tasks_free(p); }
};
struct AgentsDeleter {
  void operator()(odt_agents* p) const { odt_agents_free(p); }
};
struct PlanDeleter {
  void operator()(odt_plan* p) const { odt_plan_free(p); }
};
using Tasks = std::unique_ptr<odt_tasks, TasksDeleter>;
using Agents = std::unique_ptr<odt_agents, AgentsDeleter>;
using Plan = std::unique_ptr<odt_plan, PlanDeleter>;

std::string describe(odt_status status) {
  return std::string(odt_status_name(status)) + ": " + odt_last_error();
}

// Input problems are usage errors; everything else is a domain failure.
[[noreturn]] void raise(odt_status status) {
  switch (status) {
    case ODT_E_IO:
    case ODT_E_PARSE:
    case ODT_E_INVALID_ARGUMENT:
    case ODT_E_INVALID_SPEC:
    case ODT_E_ALL_ZERO:
    case ODT_E_NEGATIVE_WEIGHT:
      throw UsageError(describe(status));
    default:
      throw DomainError(describe(status));
  }
}

void check(odt_status status) {
  if (status != ODT_OK) raise(status);
}

void check_input(odt_status status) {
  if (status != ODT_OK) throw UsageError(describe(status));
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw UsageError("cannot write " + path.string());
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("ODTALLOC_SEED")) {
    try {
      std::size_t used = 0;
      const auto value = std::stoull(env, &used, 0);
      if (used != std::string(env).size()) throw std::invalid_argument(env);
      return value;
    } catch (const std::exception&) {
      throw UsageError(std::string("ODTALLOC_SEED is not an unsigned integer: ") + env);
    }
  }
  return 0;
}

Tasks load_tasks(const std::string& path) {
  odt_tasks* raw = nullptr;
  check_input(odt_tasks_load_csv(path.c_str(), &raw));
  return Tasks(raw);
}

Agents load_agents(const std::string& path) {
  odt_agents* raw = nullptr;
  check_input(odt_agents_load_csv(path.c_str(), &raw));
  return Agents(raw);
}

std::string digest(const std::string& path) {
  char* raw = nullptr;
  check_input(odt_file_sha256(path.c_str(), &raw));
  return CString(raw).get();
}

class Stopwatch {
 public:
  double lap_ms() {
    const auto now = std::chrono::steady_clock::now();
    const double ms = std::chrono::duration<double, std::milli>(now - last_).count();
    last_ = now;
    return ms;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

json make_manifest(const std::string& command_line, const std::vector<std::string>& inputs,
                   std::optional<std::uint64_t> seed, const std::string& method,
                   const json& timings) {
  json manifest;
  manifest["tool"] = "odtalloc";
  manifest["version"] = odt_version();
  manifest["command_line"] = command_line;
  json files = json::array();
  for (const auto& path : inputs) files.push_back({{"path", path}, {"sha256", digest(path)}});
  manifest["inputs"] = std::move(files);
  manifest["seed"] = seed ? json(*seed) : json(nullptr);
  manifest["method"] = method;
  manifest["timings_ms"] = timings;
  return manifest;
}

fs::path prepare_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw UsageError("cannot create output directory " + dir);
  return fs::path(dir);
}

// ---------------------------------------------------------------------------

struct GenArgs {
  std::string kind;
  int dim = 1;
  std::size_t tasks = 10;
  std::size_t agents = 10;
  std::optional<std::uint64_t> seed;
  std::optional<double> shift;
  std::optional<std::size_t> components;
  std::optional<double> spread;
  std::optional<double> separation;
  std::vector<double> box;
  bool degrees = false;
  std::string out = ".";
};

int run_gen(const GenArgs& args) {
  json spec;
  spec["kind"] = args.kind;
  spec["dim"] = args.dim;
  spec["tasks"] = args.tasks;
  spec["agents"] = args.agents;
  spec["seed"] = resolve_seed(args.seed);
  json params = json::object();
  if (args.shift) params["shift"] = *args.shift;
  if (args.components) params["components"] = *args.components;
  if (args.spread) params["spread"] = *args.spread;
  if (args.separation) params["separation"] = *args.separation;
  if (!args.box.empty()) params["box"] = args.box;
  if (args.degrees) params["degrees"] = true;
  spec["params"] = std::move(params);

  odt_tasks* tasks_raw = nullptr;
  odt_agents* agents_raw = nullptr;
  char* spec_raw = nullptr;
  check_input(odt_generate(spec.dump().c_str(), &tasks_raw, &agents_raw, &spec_raw));
  Tasks tasks(tasks_raw);
  Agents agents(agents_raw);
  CString normalized(spec_raw);

  const fs::path out = prepare_out_dir(args.out);
  check_input(odt_tasks_save_csv(tasks.get(), (out / "tasks.csv").c_str()));
  check_input(odt_agents_save_csv(agents.get(), (out / "agents.csv").c_str()));
  write_text(out / "spec.json", normalized.get());
  std::cout << "generated " << odt_tasks_count(tasks.get()) << " tasks and "
            << odt_agents_count(agents.get()) << " agents (" << args.kind
            << ", dim " << args.dim << ") in " << out.string() << "\n";
  return kExitOk;
}

struct SolveArgs {
  std::string tasks;
  std::string agents;
  std::string method = "exact";
  std::optional<double> epsilon;
  double tol = 1e-8;
  int max_iter = 10000;
  std::string out = ".";
};

int run_solve(const SolveArgs& args, const std::string& command_line) {
  Stopwatch clock;
  json timings;
  Tasks tasks = load_tasks(args.tasks);
  Agents agents = load_agents(args.agents);
  timings["load"] = clock.lap_ms();

  odt_solve_options options = odt_solve_options_default();
  if (args.method == "exact") {
    options.method = ODT_METHOD_EXACT;
  } else if (args.method == "reduced") {
    options.method = ODT_METHOD_REDUCED;
  } else {
    options.method = ODT_METHOD_ENTROPIC;
  }
  if (args.epsilon) {
    if (!(*args.epsilon > 0.0)) throw UsageError("--epsilon must be positive");
    options.epsilon = *args.epsilon;
  }
  if (!(args.tol > 0.0)) throw UsageError("--tol must be positive");
  options.tol = args.tol;
  options.max_iter = args.max_iter;

  odt_plan* plan_raw = nullptr;
  check(odt_solve(tasks.get(), agents.get(), &options, &plan_raw));
  Plan plan(plan_raw);
  timings["solve"] = clock.lap_ms();

  char* plan_json = nullptr;
  char* plot = nullptr;
  check(odt_plan_to_json(plan.get(), tasks.get(), agents.get(), &plan_json));
  CString plan_text(plan_json);
  check(odt_plan_plot_csv(plan.get(), tasks.get(), agents.get(), &plot));
  CString plot_text(plot);

  const fs::path out = prepare_out_dir(args.out);
  write_text(out / "plan.json", plan_text.get());
  write_text(out / "plot.csv", plot_text.get());
  timings["write"] = clock.lap_ms();
  write_text(out / "manifest.json",
             make_manifest(command_line, {args.tasks, args.agents}, std::nullopt,
                           args.method, timings)
                     .dump(2) +
                 "\n");
  std::cout << "method=" << args.method << " objective=" << odt_plan_objective(plan.get())
            << " entries=" << odt_plan_entry_count(plan.get())
            << " unique=" << (odt_plan_unique(plan.get()) ? "true" : "false") << "\n";
  return kExitOk;
}

struct VerifyArgs {
  std::string check;
  int dim = 2;
  std::size_t samples = 1000;
  std::optional<std::uint64_t> seed;
  std::size_t grid = 32;
  double tol = 0.0;
  std::string tasks;
  std::string agents;
  std::string plan;
  std::string out = ".";
};

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_verify(const VerifyArgs& args, const std::string& command_line) {
  Stopwatch clock;
  json timings;
  const bool needs_instance = args.check == "nestedness" || args.check == "stability";
  if (needs_instance && (args.tasks.empty() || args.agents.empty()))
    throw UsageError("--check " + args.check + " needs --tasks and --agents");
  if (args.check == "stability" && args.plan.empty())
    throw UsageError("--check stability needs --plan");
  if ((args.tasks.empty()) != (args.agents.empty()))
    throw UsageError("--tasks and --agents must be given together");

  Tasks tasks;
  Agents agents;
  Plan plan;
  std::vector<std::string> inputs;
  if (!args.tasks.empty()) {
    tasks = load_tasks(args.tasks);
    agents = load_agents(args.agents);
    inputs = {args.tasks, args.agents};
  }
  if (!args.plan.empty()) {
    odt_plan* raw = nullptr;
    check_input(odt_plan_from_json(read_text(args.plan).c_str(), tasks.get(),
                                   agents.get(), &raw));
    plan.reset(raw);
    inputs.push_back(args.plan);
  }
  timings["load"] = clock.lap_ms();

  odt_verify_request request = odt_verify_request_default();
  request.check = args.check.c_str();
  request.dim = args.dim;
  request.samples = args.samples;
  request.seed = resolve_seed(args.seed);
  request.grid = args.grid;
  request.tol = args.tol;
  request.tasks = tasks.get();
  request.agents = agents.get();
  request.plan = plan.get();

  char* report_raw = nullptr;
  int passed = 0;
  check(odt_verify(&request, &report_raw, &passed));
  CString report(report_raw);
  timings["verify"] = clock.lap_ms();

  const fs::path out = prepare_out_dir(args.out);
  write_text(out / "report.json", report.get());
  write_text(out / "manifest.json",
             make_manifest(command_line, inputs, request.seed, "verify:" + args.check,
                           timings)
                     .dump(2) +
                 "\n");
  std::cout << args.check << ": " << (passed ? "PASS" : "FAIL") << "\n";
  return passed ? kExitOk : kExitDomain;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Task allocation by unequal-dimensional optimal transport"};
  app.set_version_flag("--version", std::string(odt_version()));
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a seeded scenario");
  gen_cmd->add_option("--kind", gen.kind, "gaussian_mixture | grid | city_box")
      ->required()
      ->check(CLI::IsMember({"gaussian_mixture", "grid", "city_box"}));
  gen_cmd->add_option("--dim", gen.dim, "Spatial dimension n")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--tasks", gen.tasks, "Number of tasks")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--agents", gen.agents, "Number of agents")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", gen.seed, "Seed (falls back to ODTALLOC_SEED)");
  gen_cmd->add_option("--shift", gen.shift, "grid: destination offset");
  gen_cmd->add_option("--components", gen.components, "gaussian_mixture: component count");
  gen_cmd->add_option("--spread", gen.spread, "gaussian_mixture: standard deviation");
  gen_cmd->add_option("--separation", gen.separation, "gaussian_mixture: center spacing");
  gen_cmd->add_option("--box", gen.box, "city_box: xmin ymin xmax ymax")
      ->expected(4)
      ->delimiter(',');
  gen_cmd->add_flag("--degrees", gen.degrees, "city_box: box is lon/lat degrees");
  gen_cmd->add_option("--out", gen.out, "Output directory");

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Solve an allocation instance");
  solve_cmd->add_option("--tasks", solve.tasks, "Tasks CSV")->required();
  solve_cmd->add_option("--agents", solve.agents, "Agents CSV")->required();
  solve_cmd->add_option("--method", solve.method, "exact | entropic | reduced")
      ->check(CLI::IsMember({"exact", "entropic", "reduced"}));
  solve_cmd->add_option("--epsilon", solve.epsilon,
                        "Entropic temperature (default 1e-3 x cost spread)");
  solve_cmd->add_option("--tol", solve.tol, "Entropic marginal tolerance");
  solve_cmd->add_option("--max-iter", solve.max_iter, "Entropic iteration cap")
      ->check(CLI::PositiveNumber);
  solve_cmd->add_option("--out", solve.out, "Output directory");

  VerifyArgs verify;
  auto* verify_cmd = app.add_subcommand("verify", "Check a structural condition");
  verify_cmd->add_option("--check", verify.check)
      ->required()
      ->check(CLI::IsMember({"twist", "nondegeneracy", "monge", "nestedness", "stability"}));
  verify_cmd->add_option("--dim", verify.dim)->check(CLI::PositiveNumber);
  verify_cmd->add_option("--samples", verify.samples)->check(CLI::PositiveNumber);
  verify_cmd->add_option("--seed", verify.seed, "Seed (falls back to ODTALLOC_SEED)");
  verify_cmd->add_option("--grid", verify.grid, "nestedness: grid size")
      ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 20));
  verify_cmd->add_option("--tol", verify.tol, "stability: tolerance (default 1e-8 x max|c|)");
  verify_cmd->add_option("--tasks", verify.tasks, "Tasks CSV");
  verify_cmd->add_option("--agents", verify.agents, "Agents CSV");
  verify_cmd->add_option("--plan", verify.plan, "plan.json to re-validate");
  verify_cmd->add_option("--out", verify.out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  std::string command_line;
  for (int k = 0; k < argc; ++k) {
    if (k) command_line += ' ';
    command_line += argv[k];
  }

  try {
    if (*gen_cmd) return run_gen(gen);
    if (*solve_cmd) return run_solve(solve, command_line);
    if (*verify_cmd) return run_verify(verify, command_line);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  }
  return kExitUsage;
}
