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
#include <map>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "tangram/baselines.hpp"
#include "tangram/cost.hpp"
#include "tangram/event_log.hpp"
#include "tangram/latency.hpp"
#include "tangram/partition.hpp"
#include "tangram/rng.hpp"
#include "tangram/scheduler.hpp"
#include "tangram/stitch.hpp"
#include "tangram/trace.hpp"

namespace tangram {

enum class Policy {
  tangram,     // SLO-aware batching with adaptive stitching
  sequential,  // one invocation per canvas, immediately
  elf,         // one invocation per patch, execution scaled by patch area
  clipper,     // AIMD dynamic batch size over canvases
  mark,        // size-or-timeout batching over canvases
};

inline const char* to_string(Policy p) {
  switch (p) {
    case Policy::tangram: return "tangram";
    case Policy::sequential: return "sequential";
    case Policy::elf: return "elf";
    case Policy::clipper: return "clipper";
    case Policy::mark: return "mark";
  }
  return "?";
}

inline Policy parse_policy(const std::string& name) {
  if (name == "tangram") return Policy::tangram;
  if (name == "sequential") return Policy::sequential;
  if (name == "elf") return Policy::elf;
  if (name == "clipper") return Policy::clipper;
  if (name == "mark") return Policy::mark;
  throw std::invalid_argument("unknown policy: " + name);
}

struct SimConfig {
  PartitionConfig partition;
  CanvasSpec canvas;
  FunctionConfig function;
  PricingTable prices;
  LinkModel link;
  Policy policy = Policy::tangram;
  Micros slo_us = 1'000'000;
  std::uint64_t seed = 1;
  int instance_count = 2;        // backend pool size, one request at a time each
  double exec_sigma_scale = 1.0;  // scales sigma of sampled execution times; 0 = deterministic
  Micros cold_start_us = 0;      // added to execution start; excluded from billed time
  double elf_min_scale = 0.2;    // floor for per-patch execution scaling
  AimdConfig aimd{1, 1, 0.5, -1.0, 0};        // target < 0 resolves to slo/2
  TimeoutBatchConfig timeout_batch{0, 250000};  // max_batch 0 resolves to the memory cap
};

struct PatchRecord {
  std::uint64_t patch_id = 0;
  std::string scene_id;
  std::uint64_t frame_id = 0;
  Rect rect{};
  std::int64_t size_bytes = 0;
  Micros generation_us = 0;
  Micros deadline_us = 0;
  Micros slo_us = 0;
  Micros arrival_us = -1;
  bool admitted = false;
  bool infeasible_at_arrival = false;
  bool violated = false;
  std::int64_t invocation_id = -1;
  Micros fire_us = -1;
  Micros dispatch_us = -1;
  Micros completion_us = -1;
  Micros latency_us = -1;
};

struct InvocationRecord {
  std::int64_t invocation_id = 0;
  std::string trigger;
  Micros fire_us = 0;
  Micros dispatch_us = 0;
  Micros completion_us = 0;
  Micros t_f_us = 0;
  int batch_size = 0;
  int n_patches = 0;
  Nanodollars cost_nanos = 0;
  std::vector<double> canvas_efficiencies;
};

struct RunSummary {
  std::string policy;
  std::uint64_t seed = 0;
  Micros slo_us = 0;
  double bandwidth_mbps = 0.0;
  std::int64_t n_frames = 0;
  std::int64_t n_rois = 0;
  std::int64_t n_patches = 0;
  std::int64_t admitted = 0;
  std::int64_t rejected_oversize = 0;
  std::int64_t infeasible = 0;
  std::int64_t violations = 0;
  double violation_rate = 0.0;
  std::int64_t invocations = 0;
  std::int64_t canvases = 0;
  Nanodollars total_cost_nanos = 0;
  std::int64_t total_bytes = 0;
  double mean_canvas_efficiency = 0.0;
  double median_canvas_efficiency = 0.0;
  double mean_amortized_latency_ms = 0.0;
  double mean_latency_ms = 0.0;
  double max_latency_ms = 0.0;
  double mean_dispatch_wait_ms = 0.0;
};

struct RunMetrics {
  std::vector<PatchRecord> patches;
  std::vector<InvocationRecord> invocations;
  RunSummary summary;
};

namespace detail {

// Fixed-size instance pool, one in-flight request per instance, dispatched
// first-free (lowest index on ties).
class InstancePool {
 public:
  explicit InstancePool(int n) : free_at_(static_cast<std::size_t>(n), 0) {
    if (n < 1) throw std::invalid_argument("instance count must be >= 1");
  }

  Micros dispatch(Micros fire_us, Micros busy_us) {
    std::size_t best = 0;
    Micros best_start = std::max(fire_us, free_at_[0]);
    for (std::size_t i = 1; i < free_at_.size(); ++i) {
      const Micros start = std::max(fire_us, free_at_[i]);
      if (start < best_start) {
        best = i;
        best_start = start;
      }
    }
    free_at_[best] = best_start + busy_us;
    return best_start;
  }

 private:
  std::vector<Micros> free_at_;
};

enum class EvKind { arrival, sched_timer, item, policy_timer };

struct Event {
  Micros t = 0;
  std::uint64_t seq = 0;
  EvKind kind = EvKind::arrival;
  std::uint64_t a = 0;  // patch id, item index, or timer epoch
};

struct EventLater {
  bool operator()(const Event& l, const Event& r) const {
    return std::tie(l.t, l.seq) > std::tie(r.t, r.seq);
  }
};

struct BaselineItem {
  std::uint64_t item_id = 0;
  Micros ready_us = 0;
  StitchResult stitch;  // exactly one canvas
  std::vector<std::uint64_t> patch_ids;
};

}  // namespace detail

// Runs the full pipeline over the given scenes: partition frames into
// patches, deliver them over the link, drive the selected policy from a
// deterministic event loop, and account execution, latency, and cost on a
// simulated pool of serverless instances. Pure function of (scenes, cfg,
// profile); the optional log receives the structured event stream.
inline RunMetrics run(const std::vector<TraceScene>& scenes, const SimConfig& cfg,
                      const LatencyProfile& profile, EventLog* log = nullptr) {
  cfg.function.validate();
  cfg.prices.validate();
  cfg.link.validate();
  if (cfg.canvas.width < 1 || cfg.canvas.height < 1)
    throw std::invalid_argument("canvas dimensions must be positive");
  if (cfg.slo_us <= 0) throw std::invalid_argument("slo must be positive");
  if (cfg.instance_count < 1) throw std::invalid_argument("instance count must be >= 1");
  if (cfg.exec_sigma_scale < 0.0)
    throw std::invalid_argument("execution sigma scale must be >= 0");
  if (cfg.cold_start_us < 0) throw std::invalid_argument("cold start must be >= 0");
  if (!(cfg.elf_min_scale > 0.0) || cfg.elf_min_scale > 1.0)
    throw std::invalid_argument("elf min scale must be in (0, 1]");
  if (profile.canvas_width() != cfg.canvas.width || profile.canvas_height() != cfg.canvas.height)
    throw std::invalid_argument("latency profile canvas size does not match canvas spec");
  const int max_canvases = max_canvases_per_batch(cfg.function, cfg.canvas);
  for (const TraceScene& scene : scenes) validate_scene(scene);

  AimdConfig aimd = cfg.aimd;
  if (aimd.latency_target_ms < 0.0) aimd.latency_target_ms = us_to_ms(cfg.slo_us) / 2.0;
  if (aimd.max_batch == 0) aimd.max_batch = max_canvases;
  aimd.validate();
  TimeoutBatchConfig timeout_cfg = cfg.timeout_batch;
  if (timeout_cfg.max_batch == 0) timeout_cfg.max_batch = max_canvases;
  timeout_cfg.max_batch = std::min(timeout_cfg.max_batch, max_canvases);
  timeout_cfg.validate();

  RunMetrics metrics;
  RunSummary& sum = metrics.summary;
  sum.policy = to_string(cfg.policy);
  sum.seed = cfg.seed;
  sum.slo_us = cfg.slo_us;
  sum.bandwidth_mbps = cfg.link.bandwidth_mbps;

  // Partition every frame; assign global patch ids in scene/frame order.
  std::vector<std::vector<PatchMeta>> admitted_by_scene(scenes.size());
  for (std::size_t s = 0; s < scenes.size(); ++s) {
    const TraceScene& scene = scenes[s];
    sum.n_frames += static_cast<std::int64_t>(scene.frames.size());
    for (const TraceFrame& frame : scene.frames) {
      sum.n_rois += static_cast<std::int64_t>(frame.rois.size());
      FrameSpec fs{frame.frame_id, frame.width, frame.height, frame.t_us, cfg.slo_us};
      std::vector<PatchMeta> patches =
          partition(fs, cfg.partition, frame.rois, cfg.link.bytes_per_pixel,
                    static_cast<std::uint64_t>(metrics.patches.size()));
      for (PatchMeta& p : patches) {
        PatchRecord rec;
        rec.patch_id = p.patch_id;
        rec.scene_id = scene.scene_id;
        rec.frame_id = frame.frame_id;
        rec.rect = p.rect;
        rec.size_bytes = p.size_bytes;
        rec.generation_us = p.generation_time_us;
        rec.deadline_us = p.deadline_us;
        rec.slo_us = p.slo_us;
        rec.admitted = p.rect.w <= cfg.canvas.width && p.rect.h <= cfg.canvas.height;
        metrics.patches.push_back(rec);
        if (rec.admitted) {
          admitted_by_scene[s].push_back(p);
          sum.total_bytes += p.size_bytes;
        } else {
          ++sum.rejected_oversize;
        }
      }
    }
  }

  // Transmission: per-scene FIFO links by default, or one shared link.
  std::map<std::uint64_t, Micros> arrival_of;
  if (cfg.link.per_scene) {
    for (const auto& metas : admitted_by_scene) {
      const std::vector<Micros> arrivals = transmission_schedule(metas, cfg.link.bandwidth_mbps);
      for (std::size_t i = 0; i < metas.size(); ++i) arrival_of[metas[i].patch_id] = arrivals[i];
    }
  } else {
    std::vector<PatchMeta> merged;
    for (const auto& metas : admitted_by_scene) merged.insert(merged.end(), metas.begin(), metas.end());
    std::sort(merged.begin(), merged.end(), [](const PatchMeta& a, const PatchMeta& b) {
      return std::tie(a.generation_time_us, a.patch_id) <
             std::tie(b.generation_time_us, b.patch_id);
    });
    const std::vector<Micros> arrivals = transmission_schedule(merged, cfg.link.bandwidth_mbps);
    for (std::size_t i = 0; i < merged.size(); ++i) arrival_of[merged[i].patch_id] = arrivals[i];
  }

  std::map<std::uint64_t, PatchMeta> meta_of;
  for (const auto& metas : admitted_by_scene) {
    for (const PatchMeta& p : metas) meta_of[p.patch_id] = p;
  }
  for (auto& [patch_id, arrival_us] : arrival_of) {
    PatchRecord& rec = metrics.patches[patch_id];
    rec.arrival_us = arrival_us;
    rec.infeasible_at_arrival = rec.deadline_us - profile.slack_us(1) < arrival_us;
  }

  // Baseline item stream: each frame's admitted patches are stitched once and
  // every resulting canvas becomes one item, ready when the frame's last
  // patch has arrived.
  std::vector<detail::BaselineItem> items;
  const bool wants_items = cfg.policy == Policy::sequential || cfg.policy == Policy::clipper ||
                           cfg.policy == Policy::mark;
  if (wants_items) {
    for (std::size_t s = 0; s < scenes.size(); ++s) {
      std::size_t begin = 0;
      const std::vector<PatchMeta>& metas = admitted_by_scene[s];
      while (begin < metas.size()) {
        std::size_t end = begin + 1;
        const Micros gen = metas[begin].generation_time_us;
        while (end < metas.size() && metas[end].generation_time_us == gen) ++end;
        const std::vector<PatchMeta> group(metas.begin() + begin, metas.begin() + end);
        Micros ready = 0;
        for (const PatchMeta& p : group) ready = std::max(ready, arrival_of.at(p.patch_id));
        const StitchResult stitch = stitch_all(group, cfg.canvas);
        for (int c = 0; c < stitch.canvas_count(); ++c) {
          detail::BaselineItem item;
          item.item_id = static_cast<std::uint64_t>(items.size());
          item.ready_us = ready;
          item.stitch = extract_canvas(stitch, c);
          for (const Placement& pl : item.stitch.canvases[0].placements)
            item.patch_ids.push_back(pl.patch_id);
          items.push_back(std::move(item));
        }
        begin = end;
      }
    }
  }

  // Event loop.
  std::priority_queue<detail::Event, std::vector<detail::Event>, detail::EventLater> heap;
  std::uint64_t next_seq = 0;
  for (const auto& metas : admitted_by_scene) {
    for (const PatchMeta& p : metas)
      heap.push({arrival_of.at(p.patch_id), next_seq++, detail::EvKind::arrival, p.patch_id});
  }
  for (const detail::BaselineItem& item : items)
    heap.push({item.ready_us, next_seq++, detail::EvKind::item, item.item_id});

  Rng exec_rng(derive_seed(cfg.seed, "exec"));
  detail::InstancePool pool(cfg.instance_count);

  // Samples execution time, dispatches to the pool, and accounts one
  // invocation; returns the sampled execution time in ms for feedback.
  auto record_invocation = [&](Micros fire_us, const StitchResult& stitch,
                               const std::vector<std::uint64_t>& patch_ids,
                               const std::string& trigger, double exec_scale) {
    const int k = stitch.canvas_count();
    const double mu = profile.mu_ms(k);
    const double sigma = profile.sigma_ms(k) * cfg.exec_sigma_scale;
    const double t_f_ms = exec_rng.truncated_normal(mu, sigma) * exec_scale;
    const Micros t_f_us = ms_to_us(t_f_ms);
    const Micros dispatch_us = pool.dispatch(fire_us, cfg.cold_start_us + t_f_us);
    const Micros completion_us = dispatch_us + cfg.cold_start_us + t_f_us;

    InvocationRecord inv;
    inv.invocation_id = static_cast<std::int64_t>(metrics.invocations.size());
    inv.trigger = trigger;
    inv.fire_us = fire_us;
    inv.dispatch_us = dispatch_us;
    inv.completion_us = completion_us;
    inv.t_f_us = t_f_us;
    inv.batch_size = k;
    inv.n_patches = static_cast<int>(patch_ids.size());
    inv.cost_nanos = invocation_cost_nanos(t_f_us, cfg.function, cfg.prices);
    inv.canvas_efficiencies = canvas_efficiency(stitch);
    metrics.invocations.push_back(inv);

    for (std::uint64_t id : patch_ids) {
      PatchRecord& rec = metrics.patches[id];
      rec.invocation_id = inv.invocation_id;
      rec.fire_us = fire_us;
      rec.dispatch_us = dispatch_us;
      rec.completion_us = completion_us;
      rec.latency_us = completion_us - rec.generation_us;
      rec.violated = rec.latency_us > rec.slo_us;
    }
    if (log != nullptr && log->enabled() && cfg.policy != Policy::tangram) {
      log->record({{"event", "invoke"},
                   {"t_us", fire_us},
                   {"trigger", trigger},
                   {"k", k},
                   {"patches", patch_ids}});
    }
    return t_f_ms;
  };

  SloScheduler sched(cfg.canvas, &profile, max_canvases, log);
  std::uint64_t sched_pushed_epoch = 0;
  auto sync_sched_timer = [&] {
    const auto timer = sched.pending_timer();
    if (timer && timer->epoch != sched_pushed_epoch) {
      heap.push({timer->fire_at_us, next_seq++, detail::EvKind::sched_timer, timer->epoch});
      sched_pushed_epoch = timer->epoch;
    }
  };

  AimdPolicy clipper(aimd);
  TimeoutPolicy mark(timeout_cfg);
  std::uint64_t mark_pushed_epoch = 0;
  auto sync_mark_timer = [&] {
    const auto timer = mark.pending_timer();
    if (timer && timer->epoch != mark_pushed_epoch) {
      heap.push({timer->fire_at_us, next_seq++, detail::EvKind::policy_timer, timer->epoch});
      mark_pushed_epoch = timer->epoch;
    }
  };

  auto fire_item_batch = [&](Micros t, const std::vector<std::uint64_t>& item_ids,
                             const std::string& trigger) {
    std::vector<StitchResult> parts;
    std::vector<std::uint64_t> patch_ids;
    parts.reserve(item_ids.size());
    for (std::uint64_t id : item_ids) {
      parts.push_back(items[id].stitch);
      patch_ids.insert(patch_ids.end(), items[id].patch_ids.begin(), items[id].patch_ids.end());
    }
    return record_invocation(t, concat_stitches(parts), patch_ids, trigger, 1.0);
  };

  Micros last_event_us = 0;
  while (!heap.empty()) {
    const detail::Event ev = heap.top();
    heap.pop();
    last_event_us = ev.t;
    switch (ev.kind) {
      case detail::EvKind::arrival: {
        const PatchMeta& meta = meta_of.at(ev.a);
        if (cfg.policy == Policy::tangram) {
          for (const InvokeEvent& fired : sched.on_patch_arrival(meta, ev.t)) {
            record_invocation(fired.fire_time_us, fired.stitch, fired.patch_ids,
                              to_string(fired.trigger), 1.0);
          }
          sync_sched_timer();
        } else if (cfg.policy == Policy::elf) {
          const std::vector<PatchMeta> solo_queue{meta};
          const StitchResult solo = stitch_all(solo_queue, cfg.canvas);
          const double ratio = static_cast<double>(area(meta.rect)) /
                               static_cast<double>(cfg.canvas.surface_area());
          record_invocation(ev.t, solo, {meta.patch_id}, "per_patch",
                            std::max(cfg.elf_min_scale, ratio));
        } else if (log != nullptr && log->enabled()) {
          log->record({{"event", "arrival"},
                       {"t_us", ev.t},
                       {"patch", meta.patch_id},
                       {"w", meta.rect.w},
                       {"h", meta.rect.h},
                       {"deadline_us", meta.deadline_us}});
        }
        break;
      }
      case detail::EvKind::sched_timer: {
        if (auto fired = sched.on_timer(ev.t, ev.a)) {
          record_invocation(fired->fire_time_us, fired->stitch, fired->patch_ids,
                            to_string(fired->trigger), 1.0);
        }
        break;
      }
      case detail::EvKind::item: {
        const detail::BaselineItem& item = items[ev.a];
        if (cfg.policy == Policy::sequential) {
          record_invocation(ev.t, item.stitch, item.patch_ids, "sequential", 1.0);
        } else if (cfg.policy == Policy::clipper) {
          if (auto fired = clipper.on_item(item.item_id, ev.t)) {
            const double t_f_ms = fire_item_batch(ev.t, fired->item_ids, "batch_size");
            clipper.on_feedback(t_f_ms);
          }
        } else if (cfg.policy == Policy::mark) {
          if (auto fired = mark.on_item(item.item_id, ev.t)) {
            fire_item_batch(ev.t, fired->item_ids, "batch_size");
          }
          sync_mark_timer();
        }
        break;
      }
      case detail::EvKind::policy_timer: {
        if (auto fired = mark.on_timer(ev.t, ev.a)) {
          fire_item_batch(ev.t, fired->item_ids, "timeout");
        }
        break;
      }
    }
  }
  if (cfg.policy == Policy::clipper) {
    if (auto fired = clipper.flush(last_event_us)) {
      const double t_f_ms = fire_item_batch(last_event_us, fired->item_ids, "end_flush");
      clipper.on_feedback(t_f_ms);
    }
  }
  if (cfg.policy == Policy::tangram && !sched.idle())
    throw std::logic_error("scheduler queue not drained");

  // Summary.
  std::int64_t total_patch_refs = 0;
  std::vector<double> efficiencies;
  std::int64_t total_batch_latency_us = 0;
  for (const InvocationRecord& inv : metrics.invocations) {
    sum.total_cost_nanos += inv.cost_nanos;
    sum.canvases += inv.batch_size;
    total_patch_refs += inv.n_patches;
    total_batch_latency_us += inv.completion_us - inv.fire_us;
    efficiencies.insert(efficiencies.end(), inv.canvas_efficiencies.begin(),
                        inv.canvas_efficiencies.end());
  }
  sum.invocations = static_cast<std::int64_t>(metrics.invocations.size());

  std::int64_t n_latency = 0;
  double latency_sum_ms = 0.0;
  double wait_sum_ms = 0.0;
  for (const PatchRecord& rec : metrics.patches) {
    if (!rec.admitted) continue;
    ++sum.admitted;
    if (rec.infeasible_at_arrival) ++sum.infeasible;
    // An infeasible-at-arrival patch counts against the SLO budget even when
    // the sampled execution happens to beat its deadline: no guarantee held.
    if (rec.violated || rec.infeasible_at_arrival) ++sum.violations;
    if (rec.latency_us >= 0) {
      ++n_latency;
      latency_sum_ms += us_to_ms(rec.latency_us);
      wait_sum_ms += us_to_ms(rec.dispatch_us - rec.fire_us);
      sum.max_latency_ms = std::max(sum.max_latency_ms, us_to_ms(rec.latency_us));
    }
  }
  sum.n_patches = static_cast<std::int64_t>(metrics.patches.size());
  if (sum.admitted != total_patch_refs)
    throw std::logic_error("patch conservation violated: admitted != invoked");
  if (sum.admitted > 0) sum.violation_rate = static_cast<double>(sum.violations) /
                                             static_cast<double>(sum.admitted);
  if (n_latency > 0) {
    sum.mean_latency_ms = latency_sum_ms / static_cast<double>(n_latency);
    sum.mean_dispatch_wait_ms = wait_sum_ms / static_cast<double>(n_latency);
  }
  // Batch end-to-end latency spread evenly over the patches it carried.
  if (sum.admitted > 0)
    sum.mean_amortized_latency_ms =
        us_to_ms(total_batch_latency_us) / static_cast<double>(sum.admitted);
  if (!efficiencies.empty()) {
    double total = 0.0;
    for (double e : efficiencies) total += e;
    sum.mean_canvas_efficiency = total / static_cast<double>(efficiencies.size());
    std::sort(efficiencies.begin(), efficiencies.end());
    const std::size_t mid = efficiencies.size() / 2;
    sum.median_canvas_efficiency = efficiencies.size() % 2 == 1
                                       ? efficiencies[mid]
                                       : 0.5 * (efficiencies[mid - 1] + efficiencies[mid]);
  }
  return metrics;
}

}  // namespace tangram
