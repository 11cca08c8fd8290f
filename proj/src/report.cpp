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

#include "semgap/report.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "semgap/config_text.hpp"
#include "semgap/error.hpp"

namespace semgap {
namespace {

using Json = nlohmann::ordered_json;

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

void write_header_comments(std::ostream& out, const std::string& config) {
  out << "# semgap " << kVersion << "\n";
  std::istringstream lines(config);
  for (std::string line; std::getline(lines, line);) {
    if (line.empty()) continue;
    out << "# " << line << "\n";
  }
}

Json optional_json(const std::optional<double>& v) {
  if (!v) return nullptr;
  if (std::isinf(*v)) return "inf";
  return *v;
}

Json f_succ_json(const std::map<double, double>& m) {
  Json j = Json::object();
  for (const auto& [c, v] : m) j[num(c)] = v;
  return j;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  f << text;
  if (!f) fail(ErrorCode::kIo, "write failed for '" + path.string() + "'");
}

}  // namespace

std::string run_id(const Scenario& scenario, int run_index) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  };
  feed(render_scenario(scenario));
  feed("#run=" + std::to_string(run_index));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

const std::vector<std::string> kFrameCsvColumns = {
    "frame",        "t",           "s",           "lateral",       "heading",
    "speed",        "accel_cmd",   "steering_cmd", "distance_true", "line_distance",
    "in_range",     "detected",    "confidence",  "distance_est",  "tracked",
    "track_status", "stop_commitment", "stop_fulfilled", "alarm"};

std::string frame_csv(const RunReport& r) {
  std::ostringstream out;
  write_header_comments(out, render_scenario(r.scenario));
  out << "# run_index = " << r.run_index << "\n";
  out << "# run_seed = " << r.seed << "\n";
  out << "# detection_threshold = " << num(r.detection_threshold) << "\n";
  for (size_t i = 0; i < kFrameCsvColumns.size(); ++i) {
    out << (i ? "," : "") << kFrameCsvColumns[i];
  }
  out << "\n";
  for (const auto& f : r.frames) {
    out << f.frame << ',' << num(f.t) << ',' << num(f.state.s) << ',' << num(f.state.lateral)
        << ',' << num(f.state.heading) << ',' << num(f.state.speed) << ','
        << num(f.command.accel) << ',' << num(f.command.steering) << ','
        << num(f.sign_distance) << ',' << num(f.line_distance) << ',' << f.in_range << ','
        << f.detected << ',' << num(f.confidence) << ',' << opt_num(f.distance_estimate) << ','
        << f.tracked << ',' << (f.track_status ? to_string(*f.track_status) : "") << ','
        << f.stop_commitment << ',' << f.stop_fulfilled << ',' << f.alarm << "\n";
  }
  return out.str();
}

std::string run_json(const RunReport& r) {
  Json j;
  j["version"] = std::string(kVersion);
  j["run_id"] = run_id(r.scenario, r.run_index);
  j["run_index"] = r.run_index;
  j["seed"] = r.seed;
  j["scenario"] = render_scenario(r.scenario);
  j["detection_threshold"] = r.detection_threshold;
  j["complete"] = r.complete;
  j["frames"] = r.frames.size();
  j["control_ticks"] = r.trajectory.size();

  Json c;
  c["f_succ"] = f_succ_json(r.component.f_succ);
  c["f_max"] = optional_json(r.component.f_max);
  c["n"] = r.component.n;
  c["in_range_frames"] = r.component.frames;
  c["miss_rate"] = r.component.miss_rate;
  j["component"] = c;

  Json s;
  s["stopped"] = r.system.stopped;
  s["violated"] = r.system.violated;
  s["violation_distance"] = optional_json(r.system.violation_distance);
  s["stop_position"] = optional_json(r.system.stop_position);
  s["trip_time"] = optional_json(r.system.trip_time);
  j["system"] = s;

  j["alarms"] = r.alarms;
  j["first_alarm_frame"] = r.first_alarm_frame ? Json(*r.first_alarm_frame) : Json(nullptr);
  j["warnings"] = r.warnings;
  j["wall_time_ms"] = r.wall_time_ms;
  return j.dump(2) + "\n";
}

MatrixResult run_scenarios(const std::vector<Scenario>& scenarios, int jobs,
                           const ProfileRegistry& profiles, const RunSink& sink) {
  if (jobs < 1) fail(ErrorCode::kInvalidArgument, "jobs must be >= 1");
  struct Job {
    size_t row;
    int run;
  };
  std::vector<Job> queue;
  MatrixResult result;
  result.rows.resize(scenarios.size());
  for (size_t i = 0; i < scenarios.size(); ++i) {
    validate_scenario(scenarios[i]);
    result.rows[i].scenario = scenarios[i];
    result.rows[i].outcomes.resize(scenarios[i].runs);
    for (int k = 0; k < scenarios[i].runs; ++k) {
      result.rows[i].run_ids.push_back(run_id(scenarios[i], k));
      queue.push_back({i, k});
    }
  }

  std::vector<char> complete(queue.size(), 0);
  std::atomic<size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  auto worker = [&] {
    for (size_t q; (q = next.fetch_add(1)) < queue.size();) {
      const Job& job = queue[q];
      try {
        RunReport rep = run_closed_loop(scenarios[job.row], job.run, profiles);
        result.rows[job.row].outcomes[job.run] = rep.outcome();
        complete[q] = rep.complete;
        if (sink) sink(rep, result.rows[job.row].run_ids[job.run]);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        next = queue.size();
      }
    }
  };
  const int n = std::min<int>(jobs, std::max<size_t>(queue.size(), 1));
  std::vector<std::thread> threads;
  for (int i = 1; i < n; ++i) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);

  for (char c : complete) result.incomplete_runs += c ? 0 : 1;
  for (auto& row : result.rows) {
    const bool any = std::any_of(row.outcomes.begin(), row.outcomes.end(),
                                 [](const RunOutcome& o) { return o.system.complete; });
    if (any) row.aggregate = aggregate(row.outcomes);
  }

  // Trip delay against the benign row sharing pipeline, speed and condition.
  using Key = std::tuple<PipelineVariant, double, std::string>;
  std::map<Key, double> benign;
  for (const auto& row : result.rows) {
    const auto& s = row.scenario;
    if (s.attack.kind == AttackSpec::Kind::kNone && row.aggregate && row.aggregate->trip_time) {
      benign.emplace(Key{s.pipeline, s.desired_speed, s.condition}, *row.aggregate->trip_time);
    }
  }
  for (auto& row : result.rows) {
    const auto& s = row.scenario;
    auto it = benign.find(Key{s.pipeline, s.desired_speed, s.condition});
    if (it != benign.end() && row.aggregate && row.aggregate->trip_time) {
      row.trip_delay = *row.aggregate->trip_time - it->second;
    }
  }
  return result;
}

namespace {

std::string speed_label(const Scenario& s) { return num(std::round(mps_to_mph(s.desired_speed) * 1e6) / 1e6); }

// Settings shared by every row: the rendered scenario minus the per-row axes
// (speed, attack, pipeline, condition) and the per-row seed.
std::vector<std::string> shared_config_lines(const MatrixResult& result) {
  std::vector<std::string> out;
  if (result.rows.empty()) return out;
  static constexpr const char* kPerRow[] = {"speed_mph", "speed_mps", "attack", "pipeline",
                                            "condition", "seed"};
  std::istringstream lines(render_scenario(result.rows.front().scenario));
  bool in_scenario = false;
  for (std::string line; std::getline(lines, line);) {
    if (line.empty()) continue;
    if (line[0] == '[') in_scenario = line == "[scenario]";
    if (in_scenario && line[0] != '[') {
      const std::string key = line.substr(0, line.find(' '));
      if (std::any_of(std::begin(kPerRow), std::end(kPerRow), [&](const char* k) { return key == k; })) {
        continue;
      }
    }
    out.push_back(line);
  }
  return out;
}

}  // namespace

std::string matrix_csv(const MatrixResult& result) {
  std::ostringstream out;
  out << "# semgap " << kVersion << "\n";
  for (const auto& line : shared_config_lines(result)) out << "# " << line << "\n";
  out << "attack,pipeline,speed_mph,condition,seed,runs,complete_runs,f_succ_10,f_succ_20,f_succ_30,"
         "f_max_50,stop_rate,violation_rate,violation_distance,infinite_violations,trip_time,"
         "trip_delay,mean_alarms\n";
  for (const auto& row : result.rows) {
    const auto& s = row.scenario;
    out << render_attack(s.attack) << ',' << to_string(s.pipeline) << ',' << speed_label(s) << ','
        << s.condition << ',' << s.seed << ',' << s.runs << ',';
    if (!row.aggregate) {
      out << "0,,,,,,,,,,,\n";
      continue;
    }
    const auto& a = *row.aggregate;
    auto f = [&](double c) {
      auto it = a.f_succ.find(c);
      return it == a.f_succ.end() ? std::string() : num(it->second);
    };
    out << a.complete_runs << ',' << f(10) << ',' << f(20) << ',' << f(30) << ','
        << opt_num(a.f_max) << ',' << num(a.stop_rate) << ',' << num(a.violation_rate) << ','
        << opt_num(a.violation_distance) << ',' << a.infinite_violations << ','
        << opt_num(a.trip_time) << ',' << opt_num(row.trip_delay) << ',' << num(a.mean_alarms)
        << "\n";
  }
  return out.str();
}

std::string matrix_markdown(const MatrixResult& result) {
  auto pct = [](std::optional<double> v) {
    if (!v) return std::string("-");
    std::ostringstream o;
    o << std::fixed << std::setprecision(1) << *v * 100.0 << "%";
    return o.str();
  };
  std::ostringstream out;
  out << "| Attack | Variant | Speed (mph) | Condition | f_succ <10 m | f_succ <20 m | "
         "f_succ <30 m | f_max(50) | Stop | Violation | Violation distance |\n";
  out << "|---|---|---|---|---|---|---|---|---|---|---|\n";
  for (const auto& row : result.rows) {
    const auto& s = row.scenario;
    out << "| " << render_attack(s.attack) << " | " << to_string(s.pipeline) << " | "
        << speed_label(s) << " | " << s.condition << " | ";
    if (!row.aggregate) {
      out << "- | - | - | - | - | - | incomplete |\n";
      continue;
    }
    const auto& a = *row.aggregate;
    auto f = [&](double c) -> std::optional<double> {
      auto it = a.f_succ.find(c);
      if (it == a.f_succ.end()) return std::nullopt;
      return it->second;
    };
    std::string dist = "-";
    if (a.violation_distance) {
      if (std::isinf(*a.violation_distance)) {
        dist = "∞";
      } else {
        std::ostringstream o;
        o << std::fixed << std::setprecision(2) << *a.violation_distance << " m";
        dist = o.str();
      }
    } else if (a.violation_rate == 0.0) {
      dist = "0 m";
    }
    out << pct(f(10)) << " | " << pct(f(20)) << " | " << pct(f(30)) << " | " << pct(a.f_max)
        << " | " << pct(a.stop_rate) << " | " << pct(a.violation_rate) << " | " << dist << " |\n";
  }
  out << "\nsemgap " << kVersion << "; shared configuration:\n\n```\n";
  for (const auto& line : shared_config_lines(result)) out << line << "\n";
  out << "```\n";
  return out.str();
}

void write_matrix_outputs(const std::string& out_dir, const MatrixResult& result) {
  std::filesystem::create_directories(out_dir);
  write_text(std::filesystem::path(out_dir) / "matrix.csv", matrix_csv(result));
  write_text(std::filesystem::path(out_dir) / "matrix.md", matrix_markdown(result));
}

void write_run_files(const std::string& out_dir, const RunReport& report, const std::string& id) {
  const auto dir = std::filesystem::path(out_dir) / "runs";
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::kIo, "cannot create '" + dir.string() + "': " + ec.message());
  write_text(dir / (id + ".csv"), frame_csv(report));
  write_text(dir / (id + ".json"), run_json(report));
}

std::vector<TimedSample> parse_trace(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::vector<TimedSample> out;
  int t_col = 0;
  int c_col = 1;
  bool first = true;
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
    if (first) {
      first = false;
      auto t_it = std::find(cells.begin(), cells.end(), "t");
      auto c_it = std::find(cells.begin(), cells.end(), "confidence");
      if (t_it != cells.end() || c_it != cells.end()) {
        if (t_it == cells.end() || c_it == cells.end()) {
          fail(ErrorCode::kParse, "trace header needs both 't' and 'confidence' columns");
        }
        t_col = static_cast<int>(t_it - cells.begin());
        c_col = static_cast<int>(c_it - cells.begin());
        continue;
      }
    }
    const int need = std::max(t_col, c_col) + 1;
    if (static_cast<int>(cells.size()) < need) {
      fail(ErrorCode::kParse, "line " + std::to_string(line_no) + ": expected at least " +
                                  std::to_string(need) + " columns");
    }
    const std::string where = "line " + std::to_string(line_no);
    out.push_back({config::to_real(cells[t_col], where), config::to_real(cells[c_col], where)});
  }
  return out;
}

std::vector<TimedSample> load_trace(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::kIo, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  try {
    return parse_trace(ss.str());
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

FidelitySummary fidelity(const std::string& sim_path, const std::vector<std::string>& phys_paths,
                         double target_hz) {
  if (phys_paths.empty()) fail(ErrorCode::kInvalidArgument, "need at least one physical trace");
  const auto sim = load_trace(sim_path);
  FidelitySummary out;
  double sum = 0.0;
  int n = 0;
  for (const auto& path : phys_paths) {
    TraceCorrelation tc;
    tc.path = path;
    try {
      const auto phys = load_trace(path);
      const auto pair = align_pair(sim, phys, target_hz);
      tc.report = pearson(pair.a, pair.b);
      sum += tc.report->r;
      ++n;
      out.min_r = std::min(out.min_r.value_or(tc.report->r), tc.report->r);
      out.max_r = std::max(out.max_r.value_or(tc.report->r), tc.report->r);
    } catch (const Error& e) {
      tc.error = e.what();
    }
    out.traces.push_back(std::move(tc));
  }
  if (n > 0) out.mean_r = sum / n;
  return out;
}

std::string fidelity_json(const FidelitySummary& s) {
  Json j;
  j["version"] = std::string(kVersion);
  Json traces = Json::array();
  for (const auto& t : s.traces) {
    Json e;
    e["path"] = t.path;
    if (t.report) {
      e["r"] = t.report->r;
      e["p"] = t.report->p;
      e["n_points"] = t.report->n_points;
      e["p_method"] = t.report->p_method;
    } else {
      e["error"] = t.error;
    }
    traces.push_back(e);
  }
  j["traces"] = traces;
  j["mean_r"] = optional_json(s.mean_r);
  j["min_r"] = optional_json(s.min_r);
  j["max_r"] = optional_json(s.max_r);
  return j.dump(2) + "\n";
}

}  // namespace semgap
