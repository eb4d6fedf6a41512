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
#include <cstdint>
#include <span>
#include <stdexcept>

namespace tangram {

// Axis-aligned integer pixel rectangle. Origin is at the bottom-left of the
// containing surface, x grows rightward, y grows upward. Rotation is never
// applied anywhere in this library.
struct Rect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  int right() const { return x + w; }
  int top() const { return y + h; }

  bool operator==(const Rect&) const = default;
};

inline std::int64_t area(const Rect& r) {
  return static_cast<std::int64_t>(r.w) * static_cast<std::int64_t>(r.h);
}

inline std::int64_t overlap_area(const Rect& a, const Rect& b) {
  const int ow = std::min(a.right(), b.right()) - std::max(a.x, b.x);
  const int oh = std::min(a.top(), b.top()) - std::max(a.y, b.y);
  if (ow <= 0 || oh <= 0) return 0;
  return static_cast<std::int64_t>(ow) * static_cast<std::int64_t>(oh);
}

inline bool contains(const Rect& outer, const Rect& inner) {
  return inner.x >= outer.x && inner.y >= outer.y &&
         inner.right() <= outer.right() && inner.top() <= outer.top();
}

// Smallest axis-aligned rectangle covering every input rect.
inline Rect enclosing_rect(std::span<const Rect> rects) {
  if (rects.empty()) throw std::invalid_argument("empty rect set");
  int x0 = rects[0].x, y0 = rects[0].y;
  int x1 = rects[0].right(), y1 = rects[0].top();
  for (const Rect& r : rects.subspan(1)) {
    x0 = std::min(x0, r.x);
    y0 = std::min(y0, r.y);
    x1 = std::max(x1, r.right());
    y1 = std::max(y1, r.top());
  }
  return Rect{x0, y0, x1 - x0, y1 - y0};
}

}  // namespace tangram
