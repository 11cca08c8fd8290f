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

#pragma once

#include <cstdint>
#include <random>

namespace semgap {

// SplitMix64 finalizer (Steele, Lea & Flood 2014). A bijection on 64-bit
// words, used to decorrelate derived seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// seed(base, combination, run) = mix64(mix64(base ^ mix64(combination)) ^ mix64(~run))
// Distinct combinations give distinct combination seeds because every step
// is a bijection in the varying argument.
constexpr std::uint64_t combination_seed(std::uint64_t base, std::uint64_t combination) noexcept {
  return mix64(base ^ mix64(combination));
}
constexpr std::uint64_t run_seed(std::uint64_t combination_seed, std::uint64_t run) noexcept {
  return mix64(combination_seed ^ mix64(~run));
}

// Portable stream: std::mt19937_64 is bit-exact across standard libraries;
// the std distributions are not, so conversions are done here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Symmetric triangular on [mean - spread, mean + spread] (sum of two
  // uniforms), consuming exactly two draws.
  double triangular(double mean, double spread) {
    double a = uniform();
    double b = uniform();
    return mean + spread * (a + b - 1.0);
  }

  // Standard normal via Box-Muller, consuming exactly two draws.
  double normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace semgap
