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
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "tangram/partition.hpp"

namespace tangram {

// Baseline batch formation policies. Items are opaque units (one canvas per
// item in the simulator); policies decide only when to group queued items
// into a batch, never how they are packed.

struct ItemArrival {
  std::uint64_t item_id = 0;
  Micros t_us = 0;
};

struct BatchEvent {
  Micros t_us = 0;
  std::vector<std::uint64_t> item_ids;
  int size() const { return static_cast<int>(item_ids.size()); }
};

// Additive-increase / multiplicative-decrease batch sizing. The queue fires
// whenever it reaches the current batch size; after each fired batch the
// caller reports the observed latency, which grows the batch size by
// `additive_step` when within target and shrinks it multiplicatively
// otherwise.
struct AimdConfig {
  int initial_batch = 1;
  int additive_step = 1;
  double multiplicative_factor = 0.5;
  double latency_target_ms = 0.0;
  int max_batch = 0;  // 0 means uncapped

  void validate() const {
    if (initial_batch < 1) throw std::invalid_argument("initial batch must be >= 1");
    if (additive_step < 1) throw std::invalid_argument("additive step must be >= 1");
    if (!(multiplicative_factor > 0.0) || !(multiplicative_factor < 1.0))
      throw std::invalid_argument("multiplicative factor must be in (0, 1)");
    if (max_batch < 0) throw std::invalid_argument("max batch must be >= 0");
  }
};

class AimdPolicy {
 public:
  explicit AimdPolicy(const AimdConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    batch_ = clamp_batch(cfg_.initial_batch);
  }

  std::optional<BatchEvent> on_item(std::uint64_t item_id, Micros t_us) {
    queue_.push_back(item_id);
    if (static_cast<int>(queue_.size()) >= batch_) return fire(t_us);
    return std::nullopt;
  }

  // Latency feedback for the batch fired most recently.
  void on_feedback(double observed_latency_ms) {
    if (observed_latency_ms <= cfg_.latency_target_ms) {
      batch_ += cfg_.additive_step;
    } else {
      batch_ = static_cast<int>(std::floor(batch_ * cfg_.multiplicative_factor));
    }
    batch_ = clamp_batch(batch_);
  }

  // Drains whatever is queued at end of stream so no item is dropped.
  std::optional<BatchEvent> flush(Micros t_us) {
    if (queue_.empty()) return std::nullopt;
    return fire(t_us);
  }

  int current_batch() const { return batch_; }
  int queued() const { return static_cast<int>(queue_.size()); }

 private:
  BatchEvent fire(Micros t_us) {
    BatchEvent event{t_us, queue_};
    queue_.clear();
    return event;
  }

  int clamp_batch(int b) const {
    b = std::max(1, b);
    if (cfg_.max_batch > 0) b = std::min(b, cfg_.max_batch);
    return b;
  }

  AimdConfig cfg_;
  int batch_ = 1;
  std::vector<std::uint64_t> queue_;
};

// Size-or-timeout batching: fire when the queue reaches `max_batch`, or when
// the oldest queued item has waited `timeout_us`, whichever comes first.
struct TimeoutBatchConfig {
  int max_batch = 8;
  Micros timeout_us = 250000;

  void validate() const {
    if (max_batch < 1) throw std::invalid_argument("max batch must be >= 1");
    if (timeout_us < 0) throw std::invalid_argument("timeout must be >= 0");
  }
};

class TimeoutPolicy {
 public:
  explicit TimeoutPolicy(const TimeoutBatchConfig& cfg) : cfg_(cfg) { cfg_.validate(); }

  std::optional<BatchEvent> on_item(std::uint64_t item_id, Micros t_us) {
    queue_.push_back(item_id);
    if (static_cast<int>(queue_.size()) >= cfg_.max_batch) {
      timer_.reset();
      return fire(t_us);
    }
    if (queue_.size() == 1) timer_ = TimerDue{t_us + cfg_.timeout_us, next_epoch_++};
    return std::nullopt;
  }

  std::optional<BatchEvent> on_timer(Micros now, std::uint64_t epoch) {
    if (!timer_.has_value() || timer_->epoch != epoch || queue_.empty()) return std::nullopt;
    timer_.reset();
    return fire(now);
  }

  struct TimerDue {
    Micros fire_at_us = 0;
    std::uint64_t epoch = 0;
  };
  std::optional<TimerDue> pending_timer() const { return timer_; }
  int queued() const { return static_cast<int>(queue_.size()); }

 private:
  BatchEvent fire(Micros t_us) {
    BatchEvent event{t_us, queue_};
    queue_.clear();
    return event;
  }

  TimeoutBatchConfig cfg_;
  std::vector<std::uint64_t> queue_;
  std::optional<TimerDue> timer_;
  std::uint64_t next_epoch_ = 1;
};

// Fold helpers: run a whole arrival list through a policy and collect the
// batches. Arrivals must be in non-decreasing time order. Every input item
// appears in exactly one batch and batch times are non-decreasing.

inline std::vector<BatchEvent> sequential_schedule(const std::vector<ItemArrival>& items) {
  std::vector<BatchEvent> out;
  out.reserve(items.size());
  for (const ItemArrival& item : items) out.push_back(BatchEvent{item.t_us, {item.item_id}});
  return out;
}

// `latency_fn` maps a fired batch to the latency fed back to the controller.
// The tail of the queue is flushed at the last arrival time.
inline std::vector<BatchEvent> aimd_schedule(
    const std::vector<ItemArrival>& items, const AimdConfig& cfg,
    const std::function<double(const BatchEvent&)>& latency_fn) {
  AimdPolicy policy(cfg);
  std::vector<BatchEvent> out;
  Micros last_t = 0;
  for (const ItemArrival& item : items) {
    last_t = item.t_us;
    if (auto fired = policy.on_item(item.item_id, item.t_us)) {
      policy.on_feedback(latency_fn(*fired));
      out.push_back(std::move(*fired));
    }
  }
  if (auto fired = policy.flush(last_t)) out.push_back(std::move(*fired));
  return out;
}

inline std::vector<BatchEvent> timeout_schedule(const std::vector<ItemArrival>& items,
                                                const TimeoutBatchConfig& cfg) {
  TimeoutPolicy policy(cfg);
  std::vector<BatchEvent> out;
  for (const ItemArrival& item : items) {
    // A due timer precedes an arrival at the same instant.
    if (auto timer = policy.pending_timer(); timer && timer->fire_at_us <= item.t_us) {
      if (auto fired = policy.on_timer(timer->fire_at_us, timer->epoch)) {
        out.push_back(std::move(*fired));
      }
    }
    if (auto fired = policy.on_item(item.item_id, item.t_us)) out.push_back(std::move(*fired));
  }
  if (auto timer = policy.pending_timer()) {
    if (auto fired = policy.on_timer(timer->fire_at_us, timer->epoch)) {
      out.push_back(std::move(*fired));
    }
  }
  return out;
}

}  // namespace tangram
