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

// Sweeps brake_margin and the width of the ss-like guard bin (the miss-free
// band just outside the occluded range) and prints the violation count per
// speed for the SS / Map approach. A row matches when every 10 mph run
// violates and no run at 15 mph or above does. The shipped profile uses a
// 2.0 m guard with a 1.2 m margin; 1.5 m also matches but leaves less room
// for the coasted prediction to drift outside the association gate.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "semgap/scenario.hpp"
#include "semgap/sensing.hpp"
#include "semgap/sim.hpp"

namespace {

using namespace semgap;

// Copy of ss-like whose guard bin spans [occluded_hi, occluded_hi + width).
AttackProfile with_guard(const AttackProfile& base, double width) {
  AttackProfile p = base;
  p.name = "ss-like-calibration";
  for (auto& [condition, bins] : p.variants) {
    const double start = bins[1].lo;
    bins[1].hi = start + width;
    bins[2].lo = start + width;
  }
  p.validate();
  return p;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"semgap-calibrate: brake margin x guard width sweep for the ss-like profile"};
  std::vector<double> margins{0.0, 0.6, 1.0, 1.2, 1.4};
  std::vector<double> guards{1.0, 1.5, 2.0};
  std::vector<double> speeds{10, 15, 20, 25, 30};
  int runs = 50;
  std::uint64_t seed = 11;
  app.add_option("--margins", margins, "brake_margin values (m)");
  app.add_option("--guards", guards, "Guard bin widths (m); must stay below the next bin's end");
  app.add_option("--speeds", speeds, "Speeds (mph)");
  app.add_option("--runs", runs, "Runs per cell")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "Base seed");
  CLI11_PARSE(app, argc, argv);

  try {
    ProfileRegistry registry;
    const AttackProfile base = registry.get("ss-like");
    std::printf("%6s %6s", "guard", "margin");
    for (double mph : speeds) std::printf("  %3.0fmph", mph);
    std::printf("  pattern\n");
    for (double guard : guards) {
      registry.add(with_guard(base, guard));
      for (double margin : margins) {
        std::printf("%6.2f %6.2f", guard, margin);
        bool match = true;
        for (double mph : speeds) {
          Scenario s;
          s.desired_speed = mph_to_mps(mph);
          s.attack = parse_attack("physical:ss-like-calibration");
          s.config.brake_margin = margin;
          s.seed = seed;
          int violated = 0;
          for (int k = 0; k < runs; ++k) violated += run_closed_loop(s, k, registry).system.violated;
          std::printf("  %3d/%-3d", violated, runs);
          match = match && (mph < 12.5 ? violated == runs : violated == 0);
        }
        std::printf("  %s\n", match ? "yes" : "no");
      }
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "semgap-calibrate: %s\n", e.what());
    return 1;
  }
  return 0;
}
