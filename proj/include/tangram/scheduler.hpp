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
#include <optional>
#include <string>
#include <vector>

#include "tangram/event_log.hpp"
#include "tangram/latency.hpp"
#include "tangram/stitch.hpp"

namespace tangram {

enum class InvokeTrigger {
  deadline_timer,      // remaining time reached: fire the current batch
  infeasible_arrival,  // a new patch made the earliest deadline unmeetable
  memory_cap,          // the repacked batch would exceed GPU memory
};

inline const char* to_string(InvokeTrigger t) {
  switch (t) {
    case InvokeTrigger::deadline_timer: return "deadline_timer";
    case InvokeTrigger::infeasible_arrival: return "infeasible_arrival";
    case InvokeTrigger::memory_cap: return "memory_cap";
  }
  return "?";
}

// One function invocation decided by a scheduler: the batch of canvases to
// dispatch, when, and why.
struct InvokeEvent {
  Micros fire_time_us = 0;
  StitchResult stitch;
  std::vector<std::uint64_t> patch_ids;
  int batch_size = 0;  // canvases in the batch
  Micros estimated_slack_us = 0;
  InvokeTrigger trigger = InvokeTrigger::deadline_timer;
};

struct TimerHandle {
  Micros fire_at_us = 0;
  std::uint64_t epoch = 0;  // identifies the newest timer; older ones are stale
};

// Online SLO-aware batching invoker.
//
// The scheduler accumulates arriving patches in a queue, keeps them stitched
// onto canvases, and tracks the remaining time
//
//     t_remain = (earliest deadline in the queue) - slack(batch size),
//
// the latest instant at which the batch can still be dispatched safely. Each
// arrival tentatively joins the queue and triggers a full repack; if that
// makes t_remain fall behind the current time, or the batch outgrow the GPU
// memory cap, the pre-arrival batch is dispatched immediately and the new
// patch starts a fresh queue. Otherwise a timer is (re)armed at t_remain and
// fires the whole batch when reached.
//
// A patch that cannot meet its deadline even alone is still admitted and is
// dispatched solo on the spot; callers flag it as a guaranteed violation.
//
// One logical state machine: the caller serializes arrivals and timer
// firings. All times are absolute integer microseconds.
class SloScheduler {
 public:
  SloScheduler(CanvasSpec spec, const LatencyProfile* profile, int max_canvases,
               EventLog* log = nullptr)
      : spec_(spec), profile_(profile), max_canvases_(max_canvases), log_(log) {
    if (profile_ == nullptr) throw std::invalid_argument("scheduler needs a latency profile");
    if (max_canvases_ < 1) throw std::invalid_argument("max canvases must be >= 1");
  }

  // Returns zero, one, or (when a flush and a solo-infeasible dispatch
  // coincide) two invocations, in firing order.
  std::vector<InvokeEvent> on_patch_arrival(const PatchMeta& patch, Micros now) {
    std::vector<InvokeEvent> events;
    if (log_ != nullptr && log_->enabled()) {
      log_->record({{"event", "arrival"},
                    {"t_us", now},
                    {"patch", patch.patch_id},
                    {"w", patch.rect.w},
                    {"h", patch.rect.h},
                    {"deadline_us", patch.deadline_us}});
    }

    previous_ = current_;
    prev_patches_ = queue_;
    queue_.push_back(patch);
    repack(now);

    const bool over_cap = current_.canvas_count() > max_canvases_;
    if (over_cap || t_remain_us_ < now) {
      const InvokeTrigger trigger =
          over_cap ? InvokeTrigger::memory_cap : InvokeTrigger::infeasible_arrival;
      if (!prev_patches_.empty()) {
        events.push_back(make_event(now, previous_, prev_patches_, trigger));
      }
      queue_.assign(1, patch);
      previous_ = StitchResult{};
      prev_patches_.clear();
      repack(now);
      if (t_remain_us_ < now) {
        // Infeasible even alone: dispatch solo immediately.
        events.push_back(make_event(now, current_, queue_, InvokeTrigger::infeasible_arrival));
        reset();
        return events;
      }
    }
    arm_timer(t_remain_us_);
    return events;
  }

  // Fires the current batch. Timers superseded by a later arrival are
  // detected by their epoch and ignored.
  std::optional<InvokeEvent> on_timer(Micros now, std::uint64_t epoch) {
    if (!timer_.has_value() || timer_->epoch != epoch || queue_.empty()) return std::nullopt;
    InvokeEvent event = make_event(now, current_, queue_, InvokeTrigger::deadline_timer);
    reset();
    return event;
  }

  std::optional<TimerHandle> pending_timer() const { return timer_; }
  bool idle() const { return queue_.empty(); }
  const std::vector<PatchMeta>& queue() const { return queue_; }
  const StitchResult& current_stitch() const { return current_; }
  const StitchResult& previous_stitch() const { return previous_; }
  Micros earliest_deadline_us() const { return t_ddl_us_; }
  Micros remaining_time_us() const { return t_remain_us_; }

 private:
  void repack(Micros now) {
    t_ddl_us_ = queue_.front().deadline_us;
    for (const PatchMeta& p : queue_) t_ddl_us_ = std::min(t_ddl_us_, p.deadline_us);
    current_ = stitch_all(queue_, spec_);
    const Micros slack = profile_->slack_us(current_.canvas_count());
    t_remain_us_ = t_ddl_us_ - slack;
    if (log_ != nullptr && log_->enabled()) {
      log_->record({{"event", "repack"},
                    {"t_us", now},
                    {"patches", queue_.size()},
                    {"canvases", current_.canvas_count()},
                    {"slack_us", slack},
                    {"t_remain_us", t_remain_us_}});
    }
  }

  InvokeEvent make_event(Micros now, const StitchResult& stitch,
                         const std::vector<PatchMeta>& patches, InvokeTrigger trigger) {
    InvokeEvent event;
    event.fire_time_us = now;
    event.stitch = stitch;
    event.batch_size = stitch.canvas_count();
    event.estimated_slack_us = profile_->slack_us(event.batch_size);
    event.trigger = trigger;
    event.patch_ids.reserve(patches.size());
    for (const PatchMeta& p : patches) event.patch_ids.push_back(p.patch_id);
    if (log_ != nullptr && log_->enabled()) {
      log_->record({{"event", "invoke"},
                    {"t_us", now},
                    {"trigger", to_string(trigger)},
                    {"k", event.batch_size},
                    {"patches", event.patch_ids},
                    {"slack_us", event.estimated_slack_us}});
    }
    return event;
  }

  void arm_timer(Micros fire_at) {
    timer_ = TimerHandle{fire_at, next_epoch_++};
    if (log_ != nullptr && log_->enabled()) {
      log_->record({{"event", "timer_set"},
                    {"fire_at_us", timer_->fire_at_us},
                    {"epoch", timer_->epoch}});
    }
  }

  void reset() {
    queue_.clear();
    prev_patches_.clear();
    current_ = StitchResult{};
    previous_ = StitchResult{};
    timer_.reset();
    t_ddl_us_ = 0;
    t_remain_us_ = 0;
  }

  CanvasSpec spec_;
  const LatencyProfile* profile_;
  int max_canvases_;
  EventLog* log_;

  std::vector<PatchMeta> queue_;
  std::vector<PatchMeta> prev_patches_;  // queue contents backing previous_
  StitchResult current_;
  StitchResult previous_;
  Micros t_ddl_us_ = 0;
  Micros t_remain_us_ = 0;
  std::optional<TimerHandle> timer_;
  std::uint64_t next_epoch_ = 1;
};

}  // namespace tangram
