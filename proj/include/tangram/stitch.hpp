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

#include <cstdint>
#include <cstdio>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tangram/partition.hpp"

namespace tangram {

// A fixed-size stitching surface. vram_per_canvas_gb is the GPU memory one
// canvas occupies inside a function instance; it bounds the batch size.
struct CanvasSpec {
  int width = 1024;
  int height = 1024;
  double vram_per_canvas_gb = 1.0;

  std::int64_t surface_area() const {
    return static_cast<std::int64_t>(width) * height;
  }
};

struct Placement {
  std::uint64_t patch_id = 0;
  int canvas_index = 0;
  Rect position;  // in canvas coordinates; size equals the patch's size
};

struct CanvasState {
  std::vector<Placement> placements;
  std::vector<Rect> free_rects;  // live guillotine free set, never degenerate
  std::int64_t used_area = 0;
};

// Immutable outcome of packing one queue onto a sequence of canvases.
struct StitchResult {
  CanvasSpec spec;
  std::vector<CanvasState> canvases;
  std::map<std::uint64_t, Placement> placement_index;

  int canvas_count() const { return static_cast<int>(canvases.size()); }
  bool empty() const { return canvases.empty(); }
};

namespace detail {

struct Candidate {
  int canvas = -1;
  int free_index = -1;
  int score = 0;  // min(w_c - w_i, h_c - h_i); lower is better
};

inline bool candidate_better(const Candidate& a, const Candidate& b,
                             const std::vector<CanvasState>& canvases) {
  if (b.canvas < 0) return true;
  if (a.score != b.score) return a.score < b.score;
  if (a.canvas != b.canvas) return a.canvas < b.canvas;
  const Rect& ra = canvases[a.canvas].free_rects[a.free_index];
  const Rect& rb = canvases[b.canvas].free_rects[b.free_index];
  if (ra.y != rb.y) return ra.y < rb.y;
  return ra.x < rb.x;
}

// Guillotine split of the residual space after placing a w*h patch at the
// bottom-left of free rect c. The cut runs along the shorter leftover side;
// ties cut vertically. Degenerate pieces are dropped.
inline void split_free_rect(const Rect& c, int w, int h, std::vector<Rect>& out) {
  const int leftover_w = c.w - w;
  const int leftover_h = c.h - h;
  Rect first, second;
  if (leftover_w <= leftover_h) {
    first = Rect{c.x + w, c.y, leftover_w, c.h};
    second = Rect{c.x, c.y + h, w, leftover_h};
  } else {
    first = Rect{c.x + w, c.y, leftover_w, h};
    second = Rect{c.x, c.y + h, c.w, leftover_h};
  }
  if (first.w > 0 && first.h > 0) out.push_back(first);
  if (second.w > 0 && second.h > 0) out.push_back(second);
}

}  // namespace detail

// Packs patches in strict queue order onto as few canvases as the heuristic
// manages: best-short-side-fit free-rect choice over all open canvases,
// bottom-left placement, guillotine split. Patches are never rotated,
// resized, padded, or overlapped. Always repacks from blank canvases, so a
// given queue maps to exactly one result.
inline StitchResult stitch_all(std::span<const PatchMeta> queue, const CanvasSpec& spec) {
  StitchResult result;
  result.spec = spec;
  for (const PatchMeta& patch : queue) {
    const int w = patch.rect.w;
    const int h = patch.rect.h;
    if (w > spec.width || h > spec.height) {
      throw std::invalid_argument("patch exceeds canvas (patch " +
                                  std::to_string(patch.patch_id) + ", " + std::to_string(w) +
                                  "x" + std::to_string(h) + ")");
    }
    detail::Candidate best;
    for (int ci = 0; ci < result.canvas_count(); ++ci) {
      const auto& free_rects = result.canvases[ci].free_rects;
      for (int fi = 0; fi < static_cast<int>(free_rects.size()); ++fi) {
        const Rect& c = free_rects[fi];
        if (c.w < w || c.h < h) continue;
        detail::Candidate cand{ci, fi, std::min(c.w - w, c.h - h)};
        if (detail::candidate_better(cand, best, result.canvases)) best = cand;
      }
    }
    if (best.canvas < 0) {
      CanvasState blank;
      blank.free_rects.push_back(Rect{0, 0, spec.width, spec.height});
      result.canvases.push_back(std::move(blank));
      best = detail::Candidate{result.canvas_count() - 1, 0,
                               std::min(spec.width - w, spec.height - h)};
    }
    CanvasState& canvas = result.canvases[best.canvas];
    const Rect chosen = canvas.free_rects[best.free_index];
    canvas.free_rects.erase(canvas.free_rects.begin() + best.free_index);
    detail::split_free_rect(chosen, w, h, canvas.free_rects);
    Placement placed{patch.patch_id, best.canvas, Rect{chosen.x, chosen.y, w, h}};
    canvas.placements.push_back(placed);
    canvas.used_area += area(placed.position);
    result.placement_index[patch.patch_id] = placed;
  }
  return result;
}

// Ratio of placed patch area to canvas area, per canvas.
inline std::vector<double> canvas_efficiency(const StitchResult& result) {
  std::vector<double> out;
  out.reserve(result.canvases.size());
  for (const CanvasState& c : result.canvases) {
    out.push_back(static_cast<double>(c.used_area) /
                  static_cast<double>(result.spec.surface_area()));
  }
  return out;
}

// Plain-text layout listing for debugging and the dump-packing command.
inline std::string dump_layout(const StitchResult& result) {
  std::string out;
  const auto eff = canvas_efficiency(result);
  for (int ci = 0; ci < result.canvas_count(); ++ci) {
    char line[128];
    std::snprintf(line, sizeof(line), "canvas %d (%dx%d) efficiency=%.4f\n", ci,
                  result.spec.width, result.spec.height, eff[ci]);
    out += line;
    for (const Placement& p : result.canvases[ci].placements) {
      std::snprintf(line, sizeof(line), "  patch %llu at (%d,%d) %dx%d\n",
                    static_cast<unsigned long long>(p.patch_id), p.position.x, p.position.y,
                    p.position.w, p.position.h);
      out += line;
    }
  }
  return out;
}

// A one-canvas view of a larger result, with canvas indices rebased to 0.
inline StitchResult extract_canvas(const StitchResult& result, int canvas_index) {
  if (canvas_index < 0 || canvas_index >= result.canvas_count())
    throw std::out_of_range("canvas index out of range");
  StitchResult out;
  out.spec = result.spec;
  out.canvases.push_back(result.canvases[static_cast<std::size_t>(canvas_index)]);
  for (Placement& p : out.canvases[0].placements) {
    p.canvas_index = 0;
    out.placement_index[p.patch_id] = p;
  }
  return out;
}

// Concatenates per-item stitches into one batch result, reindexing canvases.
inline StitchResult concat_stitches(std::span<const StitchResult> parts) {
  StitchResult out;
  if (!parts.empty()) out.spec = parts[0].spec;
  for (const StitchResult& part : parts) {
    const int base = out.canvas_count();
    for (const CanvasState& c : part.canvases) {
      CanvasState copy = c;
      for (Placement& p : copy.placements) {
        p.canvas_index += base;
        out.placement_index[p.patch_id] = p;
      }
      out.canvases.push_back(std::move(copy));
    }
  }
  return out;
}

}  // namespace tangram
