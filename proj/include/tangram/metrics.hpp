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

#include <cstdio>
#include <ostream>
#include <string>

#include "tangram/cost.hpp"
#include "tangram/sim.hpp"

namespace tangram {

namespace detail {

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

// Millisecond columns print exact integer microseconds with 3 decimals;
// negative sentinels (not applicable) print empty.
inline std::string ms_col(Micros us) {
  if (us < 0) return "";
  return fmt("%.3f", us_to_ms(us));
}

}  // namespace detail

inline const char* summary_csv_header() {
  return "policy,seed,slo_ms,bandwidth_mbps,frames,rois,patches,admitted,rejected_oversize,"
         "infeasible,violations,violation_rate,invocations,canvases,total_cost_usd,total_bytes,"
         "mean_canvas_efficiency,median_canvas_efficiency,mean_amortized_latency_ms,"
         "mean_latency_ms,max_latency_ms,mean_dispatch_wait_ms";
}

inline std::string summary_csv_row(const RunSummary& s) {
  std::string row;
  row += detail::csv_escape(s.policy);
  row += ',' + std::to_string(s.seed);
  row += ',' + detail::ms_col(s.slo_us);
  row += ',' + detail::fmt("%.3f", s.bandwidth_mbps);
  row += ',' + std::to_string(s.n_frames);
  row += ',' + std::to_string(s.n_rois);
  row += ',' + std::to_string(s.n_patches);
  row += ',' + std::to_string(s.admitted);
  row += ',' + std::to_string(s.rejected_oversize);
  row += ',' + std::to_string(s.infeasible);
  row += ',' + std::to_string(s.violations);
  row += ',' + detail::fmt("%.6f", s.violation_rate);
  row += ',' + std::to_string(s.invocations);
  row += ',' + std::to_string(s.canvases);
  row += ',' + nanos_to_usd_string(s.total_cost_nanos);
  row += ',' + std::to_string(s.total_bytes);
  row += ',' + detail::fmt("%.6f", s.mean_canvas_efficiency);
  row += ',' + detail::fmt("%.6f", s.median_canvas_efficiency);
  row += ',' + detail::fmt("%.6f", s.mean_amortized_latency_ms);
  row += ',' + detail::fmt("%.6f", s.mean_latency_ms);
  row += ',' + detail::fmt("%.6f", s.max_latency_ms);
  row += ',' + detail::fmt("%.6f", s.mean_dispatch_wait_ms);
  return row;
}

inline void write_summary_csv(std::ostream& os, const RunSummary& s) {
  os << summary_csv_header() << "\n" << summary_csv_row(s) << "\n";
}

inline void write_patches_csv(std::ostream& os, const RunMetrics& m) {
  os << "patch_id,scene,frame,x,y,w,h,size_bytes,gen_ms,slo_ms,deadline_ms,arrival_ms,admitted,"
        "infeasible_at_arrival,invocation_id,fire_ms,dispatch_ms,completion_ms,latency_ms,"
        "violated\n";
  for (const PatchRecord& p : m.patches) {
    os << p.patch_id << ',' << detail::csv_escape(p.scene_id) << ',' << p.frame_id << ','
       << p.rect.x << ',' << p.rect.y << ',' << p.rect.w << ',' << p.rect.h << ','
       << p.size_bytes << ',' << detail::ms_col(p.generation_us) << ','
       << detail::ms_col(p.slo_us) << ',' << detail::ms_col(p.deadline_us) << ','
       << detail::ms_col(p.arrival_us) << ',' << (p.admitted ? 1 : 0) << ','
       << (p.infeasible_at_arrival ? 1 : 0) << ','
       << (p.invocation_id < 0 ? std::string() : std::to_string(p.invocation_id)) << ','
       << detail::ms_col(p.fire_us) << ',' << detail::ms_col(p.dispatch_us) << ','
       << detail::ms_col(p.completion_us) << ',' << detail::ms_col(p.latency_us) << ','
       << (p.violated ? 1 : 0) << "\n";
  }
}

inline void write_invocations_csv(std::ostream& os, const RunMetrics& m) {
  os << "invocation_id,trigger,fire_ms,dispatch_ms,completion_ms,t_f_ms,batch_size,n_patches,"
        "cost_usd,mean_canvas_efficiency\n";
  for (const InvocationRecord& inv : m.invocations) {
    double eff = 0.0;
    for (double e : inv.canvas_efficiencies) eff += e;
    if (!inv.canvas_efficiencies.empty()) eff /= static_cast<double>(inv.canvas_efficiencies.size());
    os << inv.invocation_id << ',' << detail::csv_escape(inv.trigger) << ','
       << detail::ms_col(inv.fire_us) << ',' << detail::ms_col(inv.dispatch_us) << ','
       << detail::ms_col(inv.completion_us) << ',' << detail::ms_col(inv.t_f_us) << ','
       << inv.batch_size << ',' << inv.n_patches << ',' << nanos_to_usd_string(inv.cost_nanos)
       << ',' << detail::fmt("%.6f", eff) << "\n";
  }
}

// The one-line result printed by the simulate command.
inline std::string summary_line(const RunSummary& s) {
  return "policy=" + s.policy + " cost_usd=" + nanos_to_usd_string(s.total_cost_nanos) +
         " violation_rate=" + detail::fmt("%.6f", s.violation_rate) +
         " mean_canvas_efficiency=" + detail::fmt("%.6f", s.mean_canvas_efficiency);
}

}  // namespace tangram
