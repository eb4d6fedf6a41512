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
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "tangram/geometry.hpp"
#include "tangram/partition.hpp"
#include "tangram/rng.hpp"

namespace tangram {

// A camera trace: per-frame timestamps and detected regions of interest.

struct TraceFrame {
  std::uint64_t frame_id = 0;
  Micros t_us = 0;
  int width = 0;
  int height = 0;
  std::vector<Rect> rois;
};

struct TraceScene {
  std::string scene_id;
  std::vector<TraceFrame> frames;
};

inline void validate_scene(const TraceScene& scene) {
  Micros prev_t = -1;
  for (const TraceFrame& f : scene.frames) {
    if (f.width < 1 || f.height < 1)
      throw std::invalid_argument("frame dimensions must be positive (scene " + scene.scene_id +
                                  ", frame " + std::to_string(f.frame_id) + ")");
    if (f.t_us <= prev_t && prev_t >= 0)
      throw std::invalid_argument("frame times must be strictly increasing (scene " +
                                  scene.scene_id + ", frame " + std::to_string(f.frame_id) + ")");
    prev_t = f.t_us;
    const Rect frame_rect{0, 0, f.width, f.height};
    for (std::size_t i = 0; i < f.rois.size(); ++i) {
      const Rect& r = f.rois[i];
      if (r.w < 1 || r.h < 1 || !contains(frame_rect, r))
        throw std::invalid_argument("roi outside frame (scene " + scene.scene_id + ", frame " +
                                    std::to_string(f.frame_id) + ", roi " + std::to_string(i) +
                                    ")");
    }
  }
}

// JSON-lines persistence. One frame per line:
//   {"scene": "...", "frame": 0, "t_ms": 0.0, "W": 1920, "H": 1080,
//    "rois": [[x, y, w, h], ...]}
// Lines are grouped into scenes by the "scene" field; frames of one scene
// must be contiguous.

inline void save_trace(std::ostream& os, const std::vector<TraceScene>& scenes) {
  for (const TraceScene& scene : scenes) {
    for (const TraceFrame& f : scene.frames) {
      nlohmann::json rois = nlohmann::json::array();
      for (const Rect& r : f.rois) rois.push_back({r.x, r.y, r.w, r.h});
      nlohmann::json line{{"scene", scene.scene_id}, {"frame", f.frame_id},
                          {"t_ms", us_to_ms(f.t_us)}, {"W", f.width},
                          {"H", f.height},            {"rois", rois}};
      os << line.dump() << "\n";
    }
  }
}

inline std::vector<TraceScene> load_trace(std::istream& is) {
  std::vector<TraceScene> scenes;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument("bad trace line " + std::to_string(line_no) + ": " + e.what());
    }
    try {
      TraceFrame f;
      f.frame_id = j.at("frame").get<std::uint64_t>();
      f.t_us = ms_to_us(j.at("t_ms").get<double>());
      f.width = j.at("W").get<int>();
      f.height = j.at("H").get<int>();
      for (const auto& r : j.at("rois")) {
        if (!r.is_array() || r.size() != 4)
          throw std::invalid_argument("roi must be [x, y, w, h]");
        f.rois.push_back(Rect{r[0].get<int>(), r[1].get<int>(), r[2].get<int>(), r[3].get<int>()});
      }
      const std::string scene_id = j.at("scene").get<std::string>();
      if (scenes.empty() || scenes.back().scene_id != scene_id) {
        scenes.push_back(TraceScene{scene_id, {}});
      }
      scenes.back().frames.push_back(std::move(f));
    } catch (const std::exception& e) {
      throw std::invalid_argument("bad trace line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  for (const TraceScene& scene : scenes) validate_scene(scene);
  return scenes;
}

inline void save_trace_file(const std::string& path, const std::vector<TraceScene>& scenes) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open trace file for writing: " + path);
  save_trace(os, scenes);
}

inline std::vector<TraceScene> load_trace_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open trace file: " + path);
  return load_trace(is);
}

// Synthetic workload generator. Frame area covered by regions of interest
// follows a mean proportion with per-frame jitter, plus occasional bursts
// that multiply the covered proportion. Region boxes get random aspect
// ratios and positions. Deterministic for a fixed seed.
struct WorkloadGenConfig {
  std::string scene_id = "scene0";
  int n_frames = 150;
  double fps = 15.0;
  int frame_width = 1920;
  int frame_height = 1080;
  double roi_proportion_mean = 0.10;   // of frame area
  double roi_proportion_jitter = 0.5;  // +/- relative jitter
  double burst_probability = 0.05;
  double burst_multiplier = 3.0;
  int roi_count_min = 2;
  int roi_count_max = 12;
  double roi_aspect_min = 0.5;  // w / h
  double roi_aspect_max = 2.0;
  int roi_max_dim = 480;  // cap on either box side, keeps boxes canvas-sized
  std::uint64_t seed = 1;

  void validate() const {
    if (n_frames < 0) throw std::invalid_argument("frame count must be >= 0");
    if (!(fps > 0.0)) throw std::invalid_argument("fps must be positive");
    if (frame_width < 1 || frame_height < 1)
      throw std::invalid_argument("frame dimensions must be positive");
    if (!(roi_proportion_mean > 0.0) || roi_proportion_mean >= 1.0)
      throw std::invalid_argument("roi proportion must be in (0, 1)");
    if (roi_proportion_jitter < 0.0 || roi_proportion_jitter > 1.0)
      throw std::invalid_argument("roi jitter must be in [0, 1]");
    if (burst_probability < 0.0 || burst_probability > 1.0)
      throw std::invalid_argument("burst probability must be in [0, 1]");
    if (burst_multiplier < 1.0) throw std::invalid_argument("burst multiplier must be >= 1");
    if (roi_count_min < 0 || roi_count_max < roi_count_min)
      throw std::invalid_argument("bad roi count range");
    if (!(roi_aspect_min > 0.0) || roi_aspect_max < roi_aspect_min)
      throw std::invalid_argument("bad roi aspect range");
    if (roi_max_dim < 4) throw std::invalid_argument("roi max dim must be >= 4");
    if (roi_count_max > 0 && (frame_width < 4 || frame_height < 4))
      throw std::invalid_argument("cannot place requested roi count in frame");
  }
};

inline TraceScene generate_trace(const WorkloadGenConfig& cfg) {
  cfg.validate();
  Rng rng(derive_seed(cfg.seed, "trace"));
  TraceScene scene;
  scene.scene_id = cfg.scene_id;
  scene.frames.reserve(static_cast<std::size_t>(cfg.n_frames));
  for (int i = 0; i < cfg.n_frames; ++i) {
    TraceFrame f;
    f.frame_id = static_cast<std::uint64_t>(i);
    f.t_us = std::llround(static_cast<double>(i) * 1e6 / cfg.fps);
    f.width = cfg.frame_width;
    f.height = cfg.frame_height;

    const bool burst = rng.uniform01() < cfg.burst_probability;
    const double jitter = rng.uniform(-1.0, 1.0) * cfg.roi_proportion_jitter;
    double proportion = cfg.roi_proportion_mean * (1.0 + jitter);
    if (burst) proportion *= cfg.burst_multiplier;
    proportion = std::clamp(proportion, 0.0, 0.6);
    const int n_rois = rng.uniform_int(cfg.roi_count_min, cfg.roi_count_max);

    if (n_rois > 0 && proportion > 0.0) {
      std::vector<double> weights(static_cast<std::size_t>(n_rois));
      double total_weight = 0.0;
      for (double& w : weights) {
        w = rng.uniform(0.5, 1.5);
        total_weight += w;
      }
      const double total_area =
          proportion * static_cast<double>(f.width) * static_cast<double>(f.height);
      const int max_w = std::min(cfg.roi_max_dim, f.width);
      const int max_h = std::min(cfg.roi_max_dim, f.height);
      for (int r = 0; r < n_rois; ++r) {
        const double area = total_area * weights[static_cast<std::size_t>(r)] / total_weight;
        const double aspect = rng.uniform(cfg.roi_aspect_min, cfg.roi_aspect_max);
        int w = static_cast<int>(std::lround(std::sqrt(area * aspect)));
        int h = static_cast<int>(std::lround(std::sqrt(area / aspect)));
        w = std::clamp(w, 4, max_w);
        h = std::clamp(h, 4, max_h);
        const int x = rng.uniform_int(0, f.width - w);
        const int y = rng.uniform_int(0, f.height - h);
        f.rois.push_back(Rect{x, y, w, h});
      }
    }
    scene.frames.push_back(std::move(f));
  }
  validate_scene(scene);
  return scene;
}

// Patch upload over a shared first-in-first-out link: each patch starts
// transmitting when both it exists and the link is free, and arrives after
// size / bandwidth.
struct LinkModel {
  double bandwidth_mbps = 80.0;  // megabits per second, decimal megabits
  double bytes_per_pixel = 1.5;
  bool per_scene = true;  // independent link per scene; false = one shared link

  void validate() const {
    if (!(bandwidth_mbps > 0.0)) throw std::invalid_argument("bandwidth must be positive");
    if (!(bytes_per_pixel > 0.0)) throw std::invalid_argument("bytes per pixel must be positive");
  }
};

inline Micros transmission_us(std::int64_t size_bytes, double bandwidth_mbps) {
  if (!(bandwidth_mbps > 0.0)) throw std::invalid_argument("bandwidth must be positive");
  const double bits = static_cast<double>(size_bytes) * 8.0;
  return std::llround(bits / bandwidth_mbps);  // Mbps == bits per microsecond
}

// Arrival time of each patch, in input order. Patches must be ordered by
// generation time.
inline std::vector<Micros> transmission_schedule(const std::vector<PatchMeta>& patches,
                                                 double bandwidth_mbps) {
  std::vector<Micros> arrivals;
  arrivals.reserve(patches.size());
  Micros link_free_at = 0;
  for (const PatchMeta& p : patches) {
    const Micros start = std::max(p.generation_time_us, link_free_at);
    const Micros arrival = start + transmission_us(p.size_bytes, bandwidth_mbps);
    arrivals.push_back(arrival);
    link_free_at = arrival;
  }
  return arrivals;
}

}  // namespace tangram
