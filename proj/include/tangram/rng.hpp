/* Copyright 2026 The Tangram Authors. All Rights Reserved.

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

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace tangram {

// Every random stream in a run is derived from one master seed and a
// component name, so adding a consumer never perturbs the draws of another.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view component) {
  // FNV-1a over the component name, then a splitmix64 finalizer.
  std::uint64_t h = 14695981039346656037ull;
  for (char c : component) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  std::uint64_t z = master + 0x9e3779b97f4a7c15ull + h;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// mt19937_64 with hand-rolled distributions: the standard distribution
// objects are implementation-defined, and event logs must replay bit-exact.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // Uniform in [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer in [lo, hi], inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(eng_() % span);
  }

  // Box-Muller; consumes exactly two engine draws per sample.
  double normal(double mu, double sigma) {
    const double u1 = 1.0 - uniform01();
    const double u2 = uniform01();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    return mu + sigma * mag * std::cos(2.0 * 3.141592653589793238462643383279502884 * u2);
  }

  // Normal draw clamped at zero; execution times cannot be negative.
  double truncated_normal(double mu, double sigma) { return std::max(0.0, normal(mu, sigma)); }

 private:
  std::mt19937_64 eng_;
};

}  // namespace tangram
