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

#include "semgap/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "semgap/config_text.hpp"
#include "semgap/error.hpp"
#include "semgap/rng.hpp"

namespace semgap {
namespace {

struct RealField {
  const char* key;
  double PipelineConfig::*member;
};
struct IntField {
  const char* key;
  int PipelineConfig::*member;
};

constexpr RealField kRealFields[] = {
    {"perception_hz", &PipelineConfig::perception_hz},
    {"control_hz", &PipelineConfig::control_hz},
    {"gate_px", &PipelineConfig::gate_px},
    {"measurement_sigma_px", &PipelineConfig::measurement_sigma_px},
    {"process_sigma_px", &PipelineConfig::process_sigma_px},
    {"decel_limit", &PipelineConfig::decel_limit},
    {"accel_limit", &PipelineConfig::accel_limit},
    {"max_steer", &PipelineConfig::max_steer},
    {"wheelbase", &PipelineConfig::wheelbase},
    {"brake_margin", &PipelineConfig::brake_margin},
    {"stop_zone", &PipelineConfig::stop_zone},
    {"stop_speed_eps", &PipelineConfig::stop_speed_eps},
    {"post_stop_hold", &PipelineConfig::post_stop_hold},
    {"stanley_k", &PipelineConfig::stanley_k},
    {"stanley_v_floor", &PipelineConfig::stanley_v_floor},
    {"pid_kp", &PipelineConfig::pid_kp},
    {"pid_ki", &PipelineConfig::pid_ki},
    {"pid_kd", &PipelineConfig::pid_kd},
    {"pid_integral_limit", &PipelineConfig::pid_integral_limit},
    {"sign_height", &PipelineConfig::sign_height},
    {"focal_length", &PipelineConfig::focal_length},
    {"max_range", &PipelineConfig::max_range},
    {"overrun", &PipelineConfig::overrun},
    {"max_time", &PipelineConfig::max_time},
};

constexpr IntField kIntFields[] = {
    {"track_create_frames", &PipelineConfig::track_create_frames},
    {"track_delete_frames", &PipelineConfig::track_delete_frames},
};

void read_pipeline(const config::Section& sec, PipelineConfig& cfg) {
  bool create_set = false;
  bool delete_set = false;
  for (const auto& entry : sec.entries) {
    const std::string& key = entry.key;
    bool known = false;
    for (const auto& f : kRealFields) {
      if (key == f.key) {
        cfg.*f.member = sec.get_real(key);
        known = true;
      }
    }
    for (const auto& f : kIntFields) {
      if (key == f.key) {
        cfg.*f.member = static_cast<int>(sec.get_int(key));
        known = true;
        create_set |= key == "track_create_frames";
        delete_set |= key == "track_delete_frames";
      }
    }
    if (key == "detection_threshold") {
      cfg.detection_threshold = sec.get_real(key);
      known = true;
    } else if (key == "create_requires_consecutive") {
      cfg.create_requires_consecutive = sec.get_bool(key);
      known = true;
    }
    if (!known) fail(ErrorCode::kParse, "unknown pipeline key: " + key);
  }
  // Track thresholds follow the frame rate unless pinned explicitly.
  if (!create_set) cfg.track_create_frames = static_cast<int>(std::lround(0.2 * cfg.perception_hz));
  if (!delete_set) cfg.track_delete_frames = static_cast<int>(std::lround(2.0 * cfg.perception_hz));
}

void render_pipeline(std::ostringstream& out, const PipelineConfig& cfg) {
  out << "[pipeline]\n";
  for (const auto& f : kRealFields) out << f.key << " = " << config::format_real(cfg.*f.member) << "\n";
  for (const auto& f : kIntFields) out << f.key << " = " << cfg.*f.member << "\n";
  out << "create_requires_consecutive = " << (cfg.create_requires_consecutive ? "true" : "false")
      << "\n";
  if (cfg.detection_threshold) {
    out << "detection_threshold = " << config::format_real(*cfg.detection_threshold) << "\n";
  }
}

constexpr const char* kScenarioKeys[] = {"speed_mph", "speed_mps", "attack",    "pipeline",
                                         "road_length", "stop_line_offset", "condition",
                                         "seed",        "runs",     "defense"};

void read_common(const config::Section& sec, Scenario& s) {
  if (sec.has("road_length")) s.road_length = sec.get_real("road_length");
  if (sec.has("stop_line_offset")) s.stop_line_offset = sec.get_real("stop_line_offset");
  if (sec.has("seed")) s.seed = sec.get_uint("seed");
  if (sec.has("runs")) s.runs = static_cast<int>(sec.get_int("runs"));
  s.defense = sec.get_string("defense", s.defense);
}

}  // namespace

std::string_view to_string(PipelineVariant v) {
  switch (v) {
    case PipelineVariant::kMap: return "Map";
    case PipelineVariant::kPinhole: return "Pinhole";
    case PipelineVariant::kFusion: return "Fusion";
  }
  return "?";
}

PipelineVariant parse_pipeline_variant(std::string_view s) {
  if (s == "Map" || s == "map") return PipelineVariant::kMap;
  if (s == "Pinhole" || s == "pinhole") return PipelineVariant::kPinhole;
  if (s == "Fusion" || s == "fusion") return PipelineVariant::kFusion;
  fail(ErrorCode::kParse,
       "unknown pipeline variant '" + std::string(s) + "' (expected Map, Pinhole or Fusion)");
}

std::string AttackSpec::detection_profile() const {
  return kind == Kind::kPhysicalPatch ? profile : "none";
}

AttackSpec parse_attack(std::string_view text) {
  AttackSpec a;
  if (text == "none") return a;
  auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    fail(ErrorCode::kParse, "attack '" + std::string(text) +
                                "': expected none, physical:<profile>, sensor:<hook> or "
                                "cyber:<component>=<replacement>");
  }
  std::string_view kind = text.substr(0, colon);
  std::string_view rest = text.substr(colon + 1);
  if (rest.empty()) fail(ErrorCode::kParse, "attack '" + std::string(text) + "': empty argument");
  if (kind == "physical") {
    a.kind = AttackSpec::Kind::kPhysicalPatch;
    a.profile = std::string(rest);
  } else if (kind == "sensor") {
    a.kind = AttackSpec::Kind::kSensorHook;
    auto slash = rest.find('/');
    a.hook = std::string(rest.substr(0, slash));
    while (slash != std::string_view::npos) {
      rest = rest.substr(slash + 1);
      slash = rest.find('/');
      std::string_view kv = rest.substr(0, slash);
      auto eq = kv.find('=');
      if (eq == std::string_view::npos || eq == 0) {
        fail(ErrorCode::kParse, "attack parameter '" + std::string(kv) + "': expected name=value");
      }
      std::string name(kv.substr(0, eq));
      a.params[name] = config::to_real(std::string(kv.substr(eq + 1)), name);
    }
  } else if (kind == "cyber") {
    a.kind = AttackSpec::Kind::kCyberSwap;
    auto eq = rest.find('=');
    if (eq == std::string_view::npos || eq == 0 || eq + 1 == rest.size()) {
      fail(ErrorCode::kParse, "cyber attack '" + std::string(text) +
                                  "': expected cyber:<component>=<replacement>");
    }
    a.component = std::string(rest.substr(0, eq));
    a.replacement = std::string(rest.substr(eq + 1));
  } else {
    fail(ErrorCode::kParse, "unknown attack kind '" + std::string(kind) + "'");
  }
  return a;
}

std::string render_attack(const AttackSpec& a) {
  switch (a.kind) {
    case AttackSpec::Kind::kNone: return "none";
    case AttackSpec::Kind::kPhysicalPatch: return "physical:" + a.profile;
    case AttackSpec::Kind::kSensorHook: {
      std::string s = "sensor:" + a.hook;
      for (const auto& [k, v] : a.params) s += "/" + k + "=" + config::format_real(v);
      return s;
    }
    case AttackSpec::Kind::kCyberSwap: return "cyber:" + a.component + "=" + a.replacement;
  }
  return "none";
}

int PipelineConfig::ticks_per_frame() const {
  return static_cast<int>(std::lround(control_hz / perception_hz));
}

void PipelineConfig::validate() const {
  auto bad = [](const std::string& m) { fail(ErrorCode::kInvalidArgument, m); };
  if (!(perception_hz > 0) || !(control_hz > 0)) bad("frequencies must be positive");
  double ratio = control_hz / perception_hz;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 || ratio < 1) {
    bad("control_hz must be an integer multiple of perception_hz");
  }
  if (track_create_frames < 1 || track_delete_frames < 1) bad("track thresholds must be >= 1");
  if (!(decel_limit > 0) || !(accel_limit > 0) || !(max_steer > 0) || !(wheelbase > 0)) {
    bad("actuator limits must be positive");
  }
  if (detection_threshold && (*detection_threshold < 0 || *detection_threshold > 1)) {
    bad("detection_threshold must lie in [0, 1]");
  }
  if (!(sign_height > 0) || !(focal_length > 0) || !(max_range > 0)) {
    bad("camera parameters must be positive");
  }
  if (!(stop_speed_eps > 0) || stop_zone < 0 || post_stop_hold < 0 || brake_margin < 0) {
    bad("stop parameters out of range");
  }
  if (!(max_time > 0) || overrun < 0) bad("run limits out of range");
}

void validate_scenario(const Scenario& s) {
  s.config.validate();
  if (!(s.desired_speed > 0) || !std::isfinite(s.desired_speed)) {
    fail(ErrorCode::kInvalidArgument, "desired speed must be positive");
  }
  double braking = s.desired_speed * s.desired_speed / (2.0 * s.config.decel_limit);
  if (!(s.road_length > braking)) {
    fail(ErrorCode::kInvalidArgument, "road_length " + config::format_real(s.road_length) +
                                          " m is shorter than the braking distance " +
                                          config::format_real(braking) + " m");
  }
  if (s.runs < 1) fail(ErrorCode::kInvalidArgument, "runs must be >= 1");
}

Scenario parse_scenario(std::string_view text) {
  auto doc = config::parse(text);
  const config::Section* sec = doc.find("scenario");
  if (sec == nullptr) fail(ErrorCode::kParse, "missing section: [scenario]");
  for (const auto& e : sec->entries) {
    bool known = false;
    for (const char* k : kScenarioKeys) known |= e.key == k;
    if (!known) fail(ErrorCode::kParse, "unknown scenario key: " + e.key);
  }
  for (const auto& s : doc.sections) {
    if (s.name != "" && s.name != "scenario" && s.name != "pipeline") {
      fail(ErrorCode::kParse, "unexpected section [" + s.name + "]");
    }
    if (s.name.empty() && !s.entries.empty()) {
      fail(ErrorCode::kParse, "key '" + s.entries.front().key + "' outside of a section");
    }
  }

  Scenario s;
  if (sec->has("speed_mps") && sec->has("speed_mph")) {
    fail(ErrorCode::kParse, "speed_mph and speed_mps are mutually exclusive");
  }
  if (sec->has("speed_mps")) {
    s.desired_speed = sec->get_real("speed_mps");
  } else if (sec->has("speed_mph")) {
    s.desired_speed = mph_to_mps(sec->get_real("speed_mph"));
  } else {
    fail(ErrorCode::kParse, "missing key: speed_mph");
  }
  if (!sec->has("attack")) fail(ErrorCode::kParse, "missing key: attack");
  s.attack = parse_attack(sec->get_string("attack"));
  s.pipeline = parse_pipeline_variant(sec->get_string("pipeline", "Map"));
  s.condition = sec->get_string("condition", s.condition);
  read_common(*sec, s);
  if (const auto* p = doc.find("pipeline")) read_pipeline(*p, s.config);
  validate_scenario(s);
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorCode::kIo, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  try {
    return parse_scenario(ss.str());
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

std::string render_scenario(const Scenario& s) {
  std::ostringstream out;
  out << "[scenario]\n";
  double mph = mps_to_mph(s.desired_speed);
  if (mph_to_mps(mph) == s.desired_speed) {
    out << "speed_mph = " << config::format_real(mph) << "\n";
  } else {
    out << "speed_mps = " << config::format_real(s.desired_speed) << "\n";
  }
  out << "attack = " << config::quote(render_attack(s.attack)) << "\n";
  out << "pipeline = " << to_string(s.pipeline) << "\n";
  out << "road_length = " << config::format_real(s.road_length) << "\n";
  out << "stop_line_offset = " << config::format_real(s.stop_line_offset) << "\n";
  out << "condition = " << config::quote(s.condition) << "\n";
  out << "seed = " << s.seed << "\n";
  out << "runs = " << s.runs << "\n";
  if (!s.defense.empty()) out << "defense = " << config::quote(s.defense) << "\n";
  out << "\n";
  render_pipeline(out, s.config);
  return out.str();
}

std::string condition_label(std::string_view lighting, std::string_view weather) {
  return std::string(lighting) + "-" + std::string(weather);
}

MatrixSpec parse_matrix(std::string_view text) {
  auto doc = config::parse(text);
  const config::Section* sec = doc.find("matrix");
  if (sec == nullptr) fail(ErrorCode::kParse, "missing section: [matrix]");

  MatrixSpec spec;
  Scenario& base = spec.base;
  read_common(*sec, base);
  if (const auto* p = doc.find("pipeline")) read_pipeline(*p, base.config);
  base.config.validate();
  if (base.runs < 1) fail(ErrorCode::kInvalidArgument, "runs must be >= 1");

  auto read_block = [](const config::Section& b, std::string name) {
    MatrixBlock block;
    block.name = std::move(name);
    auto axis = [&](const char* key) {
      if (!b.has(key)) fail(ErrorCode::kParse, "block '" + block.name + "': missing key: " + key);
      auto items = b.get_strings(key);
      if (items.empty()) fail(ErrorCode::kParse, "block '" + block.name + "': empty axis " + key);
      return items;
    };
    for (const auto& s : axis("speeds_mph")) block.speeds_mph.push_back(config::to_real(s, "speeds_mph"));
    block.lighting = axis("lighting");
    block.weather = axis("weather");
    block.attacks = axis("attacks");
    for (const auto& a : block.attacks) (void)parse_attack(a);
    for (const auto& p : axis("pipelines")) block.pipelines.push_back(parse_pipeline_variant(p));
    return block;
  };

  auto blocks = doc.with_prefix("block");
  static constexpr const char* kAxes[] = {"speeds_mph", "lighting", "weather", "attacks", "pipelines"};
  static constexpr const char* kBase[] = {"road_length", "stop_line_offset", "seed", "runs", "defense"};
  auto check_keys = [](const config::Section& sec, bool base, bool axes) {
    for (const auto& e : sec.entries) {
      bool known = false;
      if (base) for (const char* k : kBase) known |= e.key == k;
      if (axes) for (const char* k : kAxes) known |= e.key == k;
      if (!known) fail(ErrorCode::kParse, "line " + std::to_string(e.value.line) + ": unknown key '" + e.key + "' in [" + sec.name + "]");
    }
  };
  for (const auto& s : doc.sections) {
    if (s.name.empty()) {
      if (!s.entries.empty()) fail(ErrorCode::kParse, "key '" + s.entries.front().key + "' outside of a section");
    } else if (s.name != "matrix" && s.name != "pipeline" && s.name.rfind("block.", 0) != 0) {
      fail(ErrorCode::kParse, "unexpected section [" + s.name + "]");
    }
  }
  check_keys(*sec, true, blocks.empty());
  for (const auto* b : blocks) check_keys(*b, false, true);
  if (blocks.empty()) {
    spec.blocks.push_back(read_block(*sec, "main"));
  } else {
    for (const auto* b : blocks) {
      std::string name = b->name.size() > 6 ? b->name.substr(6) : "block";
      spec.blocks.push_back(read_block(*b, name));
    }
  }
  return spec;
}

MatrixSpec load_matrix(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorCode::kIo, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  try {
    return parse_matrix(ss.str());
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

std::vector<Scenario> expand_matrix(const MatrixSpec& spec) {
  if (spec.blocks.empty()) fail(ErrorCode::kInvalidArgument, "matrix has no blocks");
  std::vector<Scenario> out;
  std::uint64_t index = 0;
  for (const auto& block : spec.blocks) {
    if (block.size() == 0) fail(ErrorCode::kInvalidArgument, "block '" + block.name + "' has an empty axis");
    for (const auto& attack : block.attacks) {
      for (auto pipeline : block.pipelines) {
        for (double mph : block.speeds_mph) {
          for (const auto& light : block.lighting) {
            for (const auto& weather : block.weather) {
              Scenario s = spec.base;
              s.attack = parse_attack(attack);
              s.pipeline = pipeline;
              s.desired_speed = mph_to_mps(mph);
              s.condition = condition_label(light, weather);
              s.seed = combination_seed(spec.base.seed, index++);
              validate_scenario(s);
              out.push_back(std::move(s));
            }
          }
        }
      }
    }
  }
  return out;
}

}  // namespace semgap
