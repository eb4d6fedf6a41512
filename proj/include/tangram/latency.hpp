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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tangram/partition.hpp"

namespace tangram {

// One profiled batch size: mean and standard deviation of the measured
// execution time for k canvases per invocation.
struct ProfileEntry {
  int batch_size = 1;
  double mu_ms = 0.0;
  double sigma_ms = 0.0;
};

// Offline execution-time profile for a fixed canvas size. The slack time for
// k canvases is mu_k + 3*sigma_k; unprofiled batch sizes are linearly
// interpolated on slack values, and extrapolated from the two nearest entries
// beyond either end of the table. Immutable after construction.
class LatencyProfile {
 public:
  static LatencyProfile from_entries(int canvas_w, int canvas_h, std::vector<ProfileEntry> entries,
                                     std::vector<std::string>* warnings = nullptr) {
    if (entries.empty()) throw std::invalid_argument("latency profile has no entries");
    std::sort(entries.begin(), entries.end(),
              [](const ProfileEntry& a, const ProfileEntry& b) { return a.batch_size < b.batch_size; });
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const ProfileEntry& e = entries[i];
      if (e.batch_size < 1) throw std::invalid_argument("profile entry with batch size < 1");
      if (e.mu_ms <= 0) throw std::invalid_argument("profile entry with non-positive mu");
      if (e.sigma_ms < 0) throw std::invalid_argument("profile entry with negative sigma");
      if (i > 0 && entries[i - 1].batch_size == e.batch_size) {
        throw std::invalid_argument("duplicate profile entry for batch size " +
                                    std::to_string(e.batch_size));
      }
      if (i > 0 && warnings != nullptr && e.mu_ms < entries[i - 1].mu_ms) {
        warnings->push_back("profile mu decreases from k=" + std::to_string(entries[i - 1].batch_size) +
                            " to k=" + std::to_string(e.batch_size));
      }
    }
    LatencyProfile p;
    p.canvas_w_ = canvas_w;
    p.canvas_h_ = canvas_h;
    p.entries_ = std::move(entries);
    return p;
  }

  int canvas_width() const { return canvas_w_; }
  int canvas_height() const { return canvas_h_; }
  const std::vector<ProfileEntry>& entries() const { return entries_; }
  int max_profiled_batch() const { return entries_.back().batch_size; }

  double slack_ms(int k) const {
    return interpolate(k, [](const ProfileEntry& e) { return e.mu_ms + 3.0 * e.sigma_ms; });
  }

  Micros slack_us(int k) const { return ms_to_us(slack_ms(k)); }

  // Interpolated distribution parameters, for samplers that need execution
  // times at batch sizes the table does not list.
  double mu_ms(int k) const {
    return interpolate(k, [](const ProfileEntry& e) { return e.mu_ms; });
  }
  double sigma_ms(int k) const {
    return std::max(0.0, interpolate(k, [](const ProfileEntry& e) { return e.sigma_ms; }));
  }

 private:
  template <typename Getter>
  double interpolate(int k, Getter value) const {
    if (k < 1) throw std::invalid_argument("invalid batch size");
    const auto& es = entries_;
    if (es.size() == 1) return value(es[0]);
    auto it = std::lower_bound(es.begin(), es.end(), k,
                               [](const ProfileEntry& e, int key) { return e.batch_size < key; });
    const ProfileEntry* lo;
    const ProfileEntry* hi;
    if (it == es.begin()) {
      lo = &es[0];
      hi = &es[1];
    } else if (it == es.end()) {
      lo = &es[es.size() - 2];
      hi = &es[es.size() - 1];
    } else if (it->batch_size == k) {
      return value(*it);
    } else {
      hi = &*it;
      lo = hi - 1;
    }
    const double t = static_cast<double>(k - lo->batch_size) /
                     static_cast<double>(hi->batch_size - lo->batch_size);
    return std::max(0.0, value(*lo) + t * (value(*hi) - value(*lo)));
  }

  int canvas_w_ = 0;
  int canvas_h_ = 0;
  std::vector<ProfileEntry> entries_;
};

// Builds a profile from raw per-batch-size execution samples. Sigma uses the
// population form (n divisor).
inline LatencyProfile profile_from_samples(int canvas_w, int canvas_h,
                                           const std::map<int, std::vector<double>>& samples_ms,
                                           std::vector<std::string>* warnings = nullptr) {
  std::vector<ProfileEntry> entries;
  for (const auto& [k, samples] : samples_ms) {
    if (samples.empty()) {
      throw std::invalid_argument("no samples for batch size " + std::to_string(k));
    }
    double sum = 0.0;
    for (double s : samples) sum += s;
    const double mu = sum / static_cast<double>(samples.size());
    double var = 0.0;
    for (double s : samples) var += (s - mu) * (s - mu);
    var /= static_cast<double>(samples.size());
    entries.push_back(ProfileEntry{k, mu, std::sqrt(var)});
  }
  return LatencyProfile::from_entries(canvas_w, canvas_h, std::move(entries), warnings);
}

// Profile file format: a `# canvas=MxN` comment line, the exact header
// `k,mu_ms,sigma_ms`, then one record per line.
inline void save_profile(std::ostream& out, const LatencyProfile& profile) {
  out << "# canvas=" << profile.canvas_width() << "x" << profile.canvas_height() << "\n";
  out << "k,mu_ms,sigma_ms\n";
  char line[96];
  for (const ProfileEntry& e : profile.entries()) {
    std::snprintf(line, sizeof(line), "%d,%.10g,%.10g\n", e.batch_size, e.mu_ms, e.sigma_ms);
    out << line;
  }
}

inline void save_profile_file(const std::string& path, const LatencyProfile& profile) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write profile file: " + path);
  save_profile(out, profile);
}

inline LatencyProfile load_profile(std::istream& in, std::vector<std::string>* warnings = nullptr) {
  int canvas_w = -1, canvas_h = -1;
  bool header_seen = false;
  std::vector<ProfileEntry> entries;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      int w = 0, h = 0;
      if (std::sscanf(line.c_str(), "# canvas=%dx%d", &w, &h) == 2) {
        canvas_w = w;
        canvas_h = h;
      }
      continue;
    }
    if (!header_seen) {
      if (line != "k,mu_ms,sigma_ms") {
        throw std::runtime_error("profile header must be 'k,mu_ms,sigma_ms' (line " +
                                 std::to_string(line_no) + ")");
      }
      header_seen = true;
      continue;
    }
    ProfileEntry e;
    if (std::sscanf(line.c_str(), "%d,%lf,%lf", &e.batch_size, &e.mu_ms, &e.sigma_ms) != 3) {
      throw std::runtime_error("bad profile record on line " + std::to_string(line_no));
    }
    entries.push_back(e);
  }
  if (canvas_w < 0) throw std::runtime_error("profile file missing '# canvas=MxN' line");
  if (!header_seen) throw std::runtime_error("profile file missing header");
  return LatencyProfile::from_entries(canvas_w, canvas_h, std::move(entries), warnings);
}

inline LatencyProfile load_profile_file(const std::string& path,
                                        std::vector<std::string>* warnings = nullptr) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open profile file: " + path);
  return load_profile(in, warnings);
}

}  // namespace tangram
