/* Copyright 2026 The semgap Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// semgap command-line front end. Talks to the simulator only through the C
// interface in semgap/semgap.h.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "semgap/semgap.h"

namespace {

constexpr int kExitError = 1;
constexpr int kExitIncomplete = 2;

struct CallFailed {
  int code;
};

void check(sg_status st, const std::string& what) {
  if (st != SG_OK) {
    std::cerr << "semgap: " << what << ": " << sg_last_error() << "\n";
    throw CallFailed{kExitError};
  }
}

struct StringDeleter {
  void operator()(char* s) const { sg_string_free(s); }
};
using OwnedString = std::unique_ptr<char, StringDeleter>;

struct ContextDeleter {
  void operator()(sg_context* c) const { sg_context_free(c); }
};
struct ScenarioDeleter {
  void operator()(sg_scenario* s) const { sg_scenario_free(s); }
};
struct MatrixDeleter {
  void operator()(sg_matrix_result* m) const { sg_matrix_result_free(m); }
};

std::unique_ptr<sg_context, ContextDeleter> make_context(const std::string& profile_dir) {
  sg_context* ctx = nullptr;
  check(sg_context_new(&ctx), "context");
  std::unique_ptr<sg_context, ContextDeleter> owned(ctx);
  if (!profile_dir.empty()) check(sg_context_load_profiles(ctx, profile_dir.c_str()), profile_dir);
  return owned;
}

std::string default_out_dir() {
  const char* env = std::getenv("SEMGAP_OUT");
  return env != nullptr && *env != '\0' ? env : "semgap-out";
}

std::string fmt(double v, const char* unit = "") {
  if (std::isnan(v)) return "-";
  if (std::isinf(v)) return "inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f%s", v, unit);
  return buf;
}

std::string pct(double v) {
  if (std::isnan(v)) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f%%", v * 100.0);
  return buf;
}

// Calls `fn(&out)` and takes ownership of the returned string.
template <class F>
std::string take(F&& fn, const std::string& what) {
  char* raw = nullptr;
  const sg_status st = fn(&raw);
  OwnedString owned(raw);
  check(st, what);
  return owned.get();
}

struct RunArgs {
  std::string file;
  std::optional<std::uint64_t> seed;
  std::optional<int> runs;
  std::string out;
  int jobs = 1;
};

int cmd_run(const RunArgs& a, const std::string& profile_dir) {
  auto ctx = make_context(profile_dir);
  sg_scenario* raw = nullptr;
  check(sg_scenario_load(a.file.c_str(), &raw), a.file);
  std::unique_ptr<sg_scenario, ScenarioDeleter> sc(raw);
  if (a.seed) check(sg_scenario_set_seed(sc.get(), *a.seed), "--seed");
  if (a.runs) check(sg_scenario_set_runs(sc.get(), *a.runs), "--runs");
  const std::string out = a.out.empty() ? default_out_dir() : a.out;

  sg_matrix_result* mraw = nullptr;
  check(sg_run_scenario(ctx.get(), sc.get(), a.jobs, out.c_str(), &mraw), "run");
  std::unique_ptr<sg_matrix_result, MatrixDeleter> m(mraw);

  int runs = 0;
  check(sg_scenario_runs(sc.get(), &runs), "runs");
  std::cout << "run  stopped violated violation  f_max(50)  complete\n";
  for (int k = 0; k < runs; ++k) {
    sg_run_summary s{};
    check(sg_matrix_result_run(m.get(), 0, k, &s), "run " + std::to_string(k));
    std::printf("%3d  %7s %8s %9s  %9s  %8s\n", k, s.stopped ? "yes" : "no",
                s.violated ? "yes" : "no", s.violated ? fmt(s.violation_distance, " m").c_str() : "-",
                pct(s.f_max_50).c_str(), s.complete ? "yes" : "no");
  }
  sg_aggregate agg{};
  const sg_status st = sg_matrix_result_row(m.get(), 0, &agg);
  if (st == SG_OK) {
    std::cout << "stop rate " << pct(agg.stop_rate) << ", violation rate " << pct(agg.violation_rate)
              << ", violation distance " << fmt(agg.violation_distance, " m") << "\n";
  } else if (st != SG_ERR_INCOMPLETE) {
    check(st, "aggregate");
  }
  std::cout << "wrote " << out << "\n";
  int incomplete = 0;
  check(sg_matrix_result_incomplete(m.get(), &incomplete), "incomplete");
  if (incomplete > 0) {
    std::cerr << "semgap: " << incomplete << " run(s) hit the time limit\n";
    return kExitIncomplete;
  }
  return 0;
}

int cmd_matrix(const std::string& file, int jobs, const std::string& out_arg,
               const std::string& profile_dir) {
  auto ctx = make_context(profile_dir);
  const std::string out = out_arg.empty() ? default_out_dir() : out_arg;
  sg_matrix_result* mraw = nullptr;
  check(sg_run_matrix_file(ctx.get(), file.c_str(), jobs, out.c_str(), &mraw), file);
  std::unique_ptr<sg_matrix_result, MatrixDeleter> m(mraw);
  std::cout << take([&](char** o) { return sg_matrix_result_markdown(m.get(), o); }, "table");
  std::cout << "wrote " << out << "\n";
  int incomplete = 0;
  check(sg_matrix_result_incomplete(m.get(), &incomplete), "incomplete");
  if (incomplete > 0) {
    std::cerr << "semgap: " << incomplete << " run(s) hit the time limit\n";
    return kExitIncomplete;
  }
  return 0;
}

int cmd_fidelity(const std::string& sim, const std::vector<std::string>& phys, double hz) {
  std::vector<const char*> paths;
  for (const auto& p : phys) paths.push_back(p.c_str());
  std::cout << take(
      [&](char** o) { return sg_fidelity(sim.c_str(), paths.data(), paths.size(), hz, o); },
      "fidelity");
  return 0;
}

int cmd_profiles_export(const std::string& dir, const std::string& profile_dir) {
  auto ctx = make_context(profile_dir);
  size_t n = 0;
  check(sg_profiles_export(ctx.get(), dir.c_str(), &n), dir);
  std::cout << "exported " << n << " profiles to " << dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"semgap: closed-loop evaluation of attacks on a modular driving stack"};
  app.set_version_flag("--version", std::string(sg_version()));
  app.require_subcommand(1);
  std::string profile_dir;
  app.add_option("--profiles", profile_dir, "Directory of extra *.profile files");

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run one scenario");
  run->add_option("file", run_args.file, "Scenario file")->required();
  run->add_option("--seed", run_args.seed, "Override the scenario seed");
  run->add_option("--runs", run_args.runs, "Override the number of runs")->check(CLI::PositiveNumber);
  run->add_option("--out", run_args.out, "Output directory (default $SEMGAP_OUT or ./semgap-out)");
  run->add_option("--jobs", run_args.jobs, "Worker threads")->check(CLI::PositiveNumber);

  std::string matrix_file;
  std::string matrix_out;
  int matrix_jobs = 1;
  auto* matrix = app.add_subcommand("matrix", "Expand and run a scenario matrix");
  matrix->add_option("file", matrix_file, "Matrix file")->required();
  matrix->add_option("--jobs", matrix_jobs, "Worker threads")->check(CLI::PositiveNumber);
  matrix->add_option("--out", matrix_out, "Output directory (default $SEMGAP_OUT or ./semgap-out)");

  std::string sim_trace;
  std::vector<std::string> phys_traces;
  double hz = 20.0;
  auto* fid = app.add_subcommand("fidelity", "Correlate a simulation trace with physical traces");
  fid->add_option("sim", sim_trace, "Simulation trace (t,confidence or a run CSV)")->required();
  fid->add_option("phys", phys_traces, "Physical traces")->required();
  fid->add_option("--hz", hz, "Resampling rate")->check(CLI::PositiveNumber);

  std::string export_dir;
  auto* profiles = app.add_subcommand("profiles", "Attack profile utilities");
  profiles->require_subcommand(1);
  auto* exp = profiles->add_subcommand("export", "Write every profile as <name>.profile");
  exp->add_option("dir", export_dir, "Target directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitError;
  }

  try {
    if (*run) return cmd_run(run_args, profile_dir);
    if (*matrix) return cmd_matrix(matrix_file, matrix_jobs, matrix_out, profile_dir);
    if (*fid) return cmd_fidelity(sim_trace, phys_traces, hz);
    if (*exp) return cmd_profiles_export(export_dir, profile_dir);
  } catch (const CallFailed& f) {
    return f.code;
  }
  return kExitError;
}
