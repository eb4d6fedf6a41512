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
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tangram/geometry.hpp"

namespace tangram {

// All internal timestamps and durations are integer microseconds. File
// formats and CLI flags speak milliseconds; conversion happens at those
// boundaries only.
using Micros = std::int64_t;

constexpr Micros ms_to_us(double ms) {
  return static_cast<Micros>(ms < 0 ? ms * 1000.0 - 0.5 : ms * 1000.0 + 0.5);
}

constexpr double us_to_ms(Micros us) { return static_cast<double>(us) / 1000.0; }

struct FrameSpec {
  std::uint64_t frame_id = 0;
  int width = 0;
  int height = 0;
  Micros generation_time_us = 0;
  Micros slo_us = 0;
};

// Zone grid applied to a frame; zones_x columns by zones_y rows.
struct PartitionConfig {
  int zones_x = 4;
  int zones_y = 4;
};

// A cut-out patch queued for transmission and stitching. The deadline is
// always generation time plus the frame's SLO.
struct PatchMeta {
  std::uint64_t patch_id = 0;
  std::uint64_t source_frame_id = 0;
  Rect rect;
  Micros generation_time_us = 0;
  Micros slo_us = 0;
  Micros deadline_us = 0;
  std::int64_t size_bytes = 0;
};

// Tiles the frame into zones_x * zones_y rectangles in row-major order
// starting at the bottom-left. When the frame size is not divisible by the
// grid, the last column/row absorbs the remainder pixels.
inline std::vector<Rect> make_zones(const FrameSpec& frame, const PartitionConfig& cfg) {
  if (cfg.zones_x < 1 || cfg.zones_y < 1 || cfg.zones_x > frame.width ||
      cfg.zones_y > frame.height) {
    throw std::invalid_argument("zone grid finer than frame");
  }
  const int zw = frame.width / cfg.zones_x;
  const int zh = frame.height / cfg.zones_y;
  std::vector<Rect> zones;
  zones.reserve(static_cast<std::size_t>(cfg.zones_x) * cfg.zones_y);
  for (int row = 0; row < cfg.zones_y; ++row) {
    const int y = row * zh;
    const int h = (row == cfg.zones_y - 1) ? frame.height - y : zh;
    for (int col = 0; col < cfg.zones_x; ++col) {
      const int x = col * zw;
      const int w = (col == cfg.zones_x - 1) ? frame.width - x : zw;
      zones.push_back(Rect{x, y, w, h});
    }
  }
  return zones;
}

// Assigns each RoI to the zone of maximum overlap area. Ties go to the
// lowest zone index in row-major order. Returns per-zone lists of RoI
// indices into the input span.
inline std::vector<std::vector<int>> assign_rois(std::span<const Rect> rois,
                                                 std::span<const Rect> zones) {
  std::vector<std::vector<int>> lists(zones.size());
  for (int i = 0; i < static_cast<int>(rois.size()); ++i) {
    std::int64_t best = 0;
    int best_zone = -1;
    for (int z = 0; z < static_cast<int>(zones.size()); ++z) {
      const std::int64_t s = overlap_area(rois[i], zones[z]);
      if (s > best) {
        best = s;
        best_zone = z;
      }
    }
    if (best_zone < 0) {
      throw std::invalid_argument("roi outside frame (roi index " + std::to_string(i) + ")");
    }
    lists[best_zone].push_back(i);
  }
  return lists;
}

// Cuts one patch per non-empty zone: the minimum enclosing rectangle of the
// RoIs assigned to it. Patches are emitted in zone row-major order with
// consecutive ids starting at first_patch_id. Patch rects may extend beyond
// their zone and may overlap patches from neighbouring zones; overlapped
// pixels are transmitted twice.
inline std::vector<PatchMeta> partition(const FrameSpec& frame, const PartitionConfig& cfg,
                                        std::span<const Rect> rois, double bytes_per_pixel,
                                        std::uint64_t first_patch_id = 0) {
  const std::vector<Rect> zones = make_zones(frame, cfg);
  const auto lists = assign_rois(rois, zones);
  std::vector<PatchMeta> patches;
  std::uint64_t next_id = first_patch_id;
  for (std::size_t z = 0; z < zones.size(); ++z) {
    if (lists[z].empty()) continue;
    std::vector<Rect> members;
    members.reserve(lists[z].size());
    for (int idx : lists[z]) members.push_back(rois[idx]);
    PatchMeta p;
    p.patch_id = next_id++;
    p.source_frame_id = frame.frame_id;
    p.rect = enclosing_rect(members);
    p.generation_time_us = frame.generation_time_us;
    p.slo_us = frame.slo_us;
    p.deadline_us = frame.generation_time_us + frame.slo_us;
    p.size_bytes = static_cast<std::int64_t>(
        std::ceil(static_cast<double>(area(p.rect)) * bytes_per_pixel));
    patches.push_back(p);
  }
  return patches;
}

}  // namespace tangram
