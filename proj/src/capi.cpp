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

#include "semgap/semgap.h"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <new>
#include <string>

#include "semgap/error.hpp"
#include "semgap/report.hpp"
#include "semgap/sensing.hpp"
#include "semgap/sim.hpp"

struct sg_context {
  semgap::ProfileRegistry profiles;
};

struct sg_scenario {
  semgap::Scenario scenario;
};

struct sg_report {
  semgap::RunReport report;
  std::string id;
};

struct sg_matrix_result {
  semgap::MatrixResult result;
};

namespace {

thread_local std::string g_last_error;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

sg_status to_status(semgap::ErrorCode c) {
  switch (c) {
    case semgap::ErrorCode::kParse: return SG_ERR_PARSE;
    case semgap::ErrorCode::kInvalidArgument: return SG_ERR_INVALID_ARGUMENT;
    case semgap::ErrorCode::kNotFound: return SG_ERR_NOT_FOUND;
    case semgap::ErrorCode::kIo: return SG_ERR_IO;
    case semgap::ErrorCode::kNumeric: return SG_ERR_NUMERIC;
    case semgap::ErrorCode::kIncomplete: return SG_ERR_INCOMPLETE;
  }
  return SG_ERR_INTERNAL;
}

template <class F>
sg_status guarded(F&& f) {
  try {
    f();
    return SG_OK;
  } catch (const semgap::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return SG_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SG_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return SG_ERR_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) semgap::fail(semgap::ErrorCode::kInvalidArgument, std::string(what) + " is NULL");
}

char* dup(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

double value_or_nan(const std::optional<double>& v) { return v ? *v : kNaN; }

double f_succ(const std::map<double, double>& m, double c) {
  auto it = m.find(c);
  return it == m.end() ? kNaN : it->second;
}

}  // namespace

extern "C" {

const char* sg_version(void) {
  static const std::string v(semgap::kVersion);
  return v.c_str();
}

const char* sg_last_error(void) { return g_last_error.c_str(); }

void sg_string_free(char* s) { delete[] s; }

sg_status sg_context_new(sg_context** out) {
  return guarded([&] {
    require(out, "out");
    *out = new sg_context();
  });
}

void sg_context_free(sg_context* ctx) { delete ctx; }

sg_status sg_context_load_profiles(sg_context* ctx, const char* dir) {
  return guarded([&] {
    require(ctx, "ctx");
    require(dir, "dir");
    ctx->profiles.load_directory(dir);
  });
}

sg_status sg_context_profile_names(const sg_context* ctx, char** out) {
  return guarded([&] {
    require(ctx, "ctx");
    require(out, "out");
    std::string s;
    for (const auto& n : ctx->profiles.names()) s += n + "\n";
    *out = dup(s);
  });
}

sg_status sg_profiles_export(const sg_context* ctx, const char* dir, size_t* count) {
  return guarded([&] {
    require(ctx, "ctx");
    require(dir, "dir");
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) semgap::fail(semgap::ErrorCode::kIo, std::string("cannot create '") + dir + "'");
    size_t n = 0;
    for (const auto& name : ctx->profiles.names()) {
      const auto path = std::filesystem::path(dir) / (name + ".profile");
      std::ofstream f(path, std::ios::binary);
      f << semgap::render_profile(ctx->profiles.get(name));
      if (!f) semgap::fail(semgap::ErrorCode::kIo, "cannot write '" + path.string() + "'");
      ++n;
    }
    if (count != nullptr) *count = n;
  });
}

sg_status sg_scenario_parse(const char* text, sg_scenario** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = new sg_scenario{semgap::parse_scenario(text)};
  });
}

sg_status sg_scenario_load(const char* path, sg_scenario** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new sg_scenario{semgap::load_scenario(path)};
  });
}

void sg_scenario_free(sg_scenario* s) { delete s; }

sg_status sg_scenario_set_seed(sg_scenario* s, uint64_t seed) {
  return guarded([&] {
    require(s, "scenario");
    s->scenario.seed = seed;
  });
}

sg_status sg_scenario_set_runs(sg_scenario* s, int runs) {
  return guarded([&] {
    require(s, "scenario");
    if (runs < 1) semgap::fail(semgap::ErrorCode::kInvalidArgument, "runs must be >= 1");
    s->scenario.runs = runs;
  });
}

sg_status sg_scenario_runs(const sg_scenario* s, int* out) {
  return guarded([&] {
    require(s, "scenario");
    require(out, "out");
    *out = s->scenario.runs;
  });
}

sg_status sg_scenario_render(const sg_scenario* s, char** out) {
  return guarded([&] {
    require(s, "scenario");
    require(out, "out");
    *out = dup(semgap::render_scenario(s->scenario));
  });
}

sg_status sg_run(const sg_context* ctx, const sg_scenario* s, int run_index, sg_report** out) {
  return guarded([&] {
    require(ctx, "ctx");
    require(s, "scenario");
    require(out, "out");
    if (run_index < 0) semgap::fail(semgap::ErrorCode::kInvalidArgument, "run_index must be >= 0");
    auto* r = new sg_report();
    try {
      r->report = semgap::run_closed_loop(s->scenario, run_index, ctx->profiles);
      r->id = semgap::run_id(s->scenario, run_index);
    } catch (...) {
      delete r;
      throw;
    }
    *out = r;
  });
}

void sg_report_free(sg_report* r) { delete r; }

sg_status sg_report_summary(const sg_report* r, sg_run_summary* out) {
  return guarded([&] {
    require(r, "report");
    require(out, "out");
    const auto& rep = r->report;
    sg_run_summary s{};
    s.run_index = rep.run_index;
    s.seed = rep.seed;
    s.complete = rep.complete;
    s.stopped = rep.system.stopped;
    s.violated = rep.system.violated;
    s.violation_distance = value_or_nan(rep.system.violation_distance);
    s.stop_position = value_or_nan(rep.system.stop_position);
    s.trip_time = value_or_nan(rep.system.trip_time);
    s.f_succ_10 = f_succ(rep.component.f_succ, 10.0);
    s.f_succ_20 = f_succ(rep.component.f_succ, 20.0);
    s.f_succ_30 = f_succ(rep.component.f_succ, 30.0);
    s.f_max_50 = value_or_nan(rep.component.f_max);
    s.alarms = rep.alarms;
    s.frames = static_cast<int>(rep.frames.size());
    *out = s;
  });
}

sg_status sg_report_id(const sg_report* r, char** out) {
  return guarded([&] {
    require(r, "report");
    require(out, "out");
    *out = dup(r->id);
  });
}

sg_status sg_report_frame_csv(const sg_report* r, char** out) {
  return guarded([&] {
    require(r, "report");
    require(out, "out");
    *out = dup(semgap::frame_csv(r->report));
  });
}

sg_status sg_report_json(const sg_report* r, char** out) {
  return guarded([&] {
    require(r, "report");
    require(out, "out");
    *out = dup(semgap::run_json(r->report));
  });
}

sg_status sg_report_write(const sg_report* r, const char* out_dir) {
  return guarded([&] {
    require(r, "report");
    require(out_dir, "out_dir");
    semgap::write_run_files(out_dir, r->report, r->id);
  });
}

namespace {

sg_status run_many(const sg_context* ctx, const std::vector<semgap::Scenario>& scenarios, int jobs,
                   const char* out_dir, sg_matrix_result** out) {
  require(ctx, "ctx");
  require(out, "out");
  semgap::RunSink sink;
  std::string dir = out_dir != nullptr ? out_dir : "";
  if (!dir.empty()) {
    sink = [dir](const semgap::RunReport& rep, const std::string& id) {
      semgap::write_run_files(dir, rep, id);
    };
  }
  auto* m = new sg_matrix_result();
  try {
    m->result = semgap::run_scenarios(scenarios, jobs, ctx->profiles, sink);
    if (!dir.empty()) semgap::write_matrix_outputs(dir, m->result);
  } catch (...) {
    delete m;
    throw;
  }
  *out = m;
  return SG_OK;
}

const semgap::MatrixRow& row_at(const sg_matrix_result* m, size_t row) {
  require(m, "matrix result");
  if (row >= m->result.rows.size()) {
    semgap::fail(semgap::ErrorCode::kInvalidArgument, "row index out of range");
  }
  return m->result.rows[row];
}

}  // namespace

sg_status sg_run_scenario(const sg_context* ctx, const sg_scenario* s, int jobs,
                          const char* out_dir, sg_matrix_result** out) {
  return guarded([&] {
    require(s, "scenario");
    run_many(ctx, {s->scenario}, jobs, out_dir, out);
  });
}

sg_status sg_run_matrix_file(const sg_context* ctx, const char* path, int jobs,
                             const char* out_dir, sg_matrix_result** out) {
  return guarded([&] {
    require(path, "path");
    auto scenarios = semgap::expand_matrix(semgap::load_matrix(path));
    run_many(ctx, scenarios, jobs, out_dir, out);
  });
}

void sg_matrix_result_free(sg_matrix_result* m) { delete m; }

sg_status sg_matrix_result_rows(const sg_matrix_result* m, size_t* out) {
  return guarded([&] {
    require(m, "matrix result");
    require(out, "out");
    *out = m->result.rows.size();
  });
}

sg_status sg_matrix_result_incomplete(const sg_matrix_result* m, int* out) {
  return guarded([&] {
    require(m, "matrix result");
    require(out, "out");
    *out = m->result.incomplete_runs;
  });
}

sg_status sg_matrix_result_row(const sg_matrix_result* m, size_t row, sg_aggregate* out) {
  return guarded([&] {
    require(out, "out");
    const auto& r = row_at(m, row);
    if (!r.aggregate) semgap::fail(semgap::ErrorCode::kIncomplete, "no run of this row completed");
    const auto& a = *r.aggregate;
    sg_aggregate g{};
    g.runs = a.runs;
    g.complete_runs = a.complete_runs;
    g.stop_rate = a.stop_rate;
    g.violation_rate = a.violation_rate;
    g.violation_distance = value_or_nan(a.violation_distance);
    g.infinite_violations = a.infinite_violations;
    g.f_succ_10 = f_succ(a.f_succ, 10.0);
    g.f_succ_20 = f_succ(a.f_succ, 20.0);
    g.f_succ_30 = f_succ(a.f_succ, 30.0);
    g.f_max_50 = value_or_nan(a.f_max);
    g.trip_time = value_or_nan(a.trip_time);
    g.trip_delay = value_or_nan(r.trip_delay);
    g.mean_alarms = a.mean_alarms;
    *out = g;
  });
}

sg_status sg_matrix_result_run(const sg_matrix_result* m, size_t row, int run,
                               sg_run_summary* out) {
  return guarded([&] {
    require(out, "out");
    const auto& r = row_at(m, row);
    if (run < 0 || run >= static_cast<int>(r.outcomes.size())) {
      semgap::fail(semgap::ErrorCode::kInvalidArgument, "run index out of range");
    }
    const auto& o = r.outcomes[run];
    sg_run_summary s{};
    s.run_index = run;
    s.seed = semgap::scenario_run_seed(r.scenario, run);
    s.complete = o.system.complete;
    s.stopped = o.system.stopped;
    s.violated = o.system.violated;
    s.violation_distance = value_or_nan(o.system.violation_distance);
    s.stop_position = value_or_nan(o.system.stop_position);
    s.trip_time = value_or_nan(o.system.trip_time);
    s.f_succ_10 = f_succ(o.component.f_succ, 10.0);
    s.f_succ_20 = f_succ(o.component.f_succ, 20.0);
    s.f_succ_30 = f_succ(o.component.f_succ, 30.0);
    s.f_max_50 = value_or_nan(o.component.f_max);
    s.alarms = o.alarms;
    s.frames = o.component.frames;
    *out = s;
  });
}

sg_status sg_matrix_result_row_label(const sg_matrix_result* m, size_t row, char** out) {
  return guarded([&] {
    require(out, "out");
    const auto& s = row_at(m, row).scenario;
    char speed[32];
    std::snprintf(speed, sizeof speed, "%g", semgap::mps_to_mph(s.desired_speed));
    *out = dup(semgap::render_attack(s.attack) + " " + std::string(semgap::to_string(s.pipeline)) +
               " " + speed + "mph " + s.condition);
  });
}

sg_status sg_matrix_result_csv(const sg_matrix_result* m, char** out) {
  return guarded([&] {
    require(m, "matrix result");
    require(out, "out");
    *out = dup(semgap::matrix_csv(m->result));
  });
}

sg_status sg_matrix_result_markdown(const sg_matrix_result* m, char** out) {
  return guarded([&] {
    require(m, "matrix result");
    require(out, "out");
    *out = dup(semgap::matrix_markdown(m->result));
  });
}

sg_status sg_fidelity(const char* sim_path, const char* const* phys_paths, size_t count,
                      double target_hz, char** json_out) {
  return guarded([&] {
    require(sim_path, "sim_path");
    require(json_out, "json_out");
    if (count > 0) require(phys_paths, "phys_paths");
    std::vector<std::string> phys;
    for (size_t i = 0; i < count; ++i) {
      require(phys_paths[i], "physical trace path");
      phys.emplace_back(phys_paths[i]);
    }
    *json_out = dup(semgap::fidelity_json(semgap::fidelity(sim_path, phys, target_hz)));
  });
}

}  // extern "C"
