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

#include "tangram/baselines.hpp"

#include <gtest/gtest.h>

#include <set>
#include <vector>

#include "tangram/rng.hpp"

namespace tangram {
namespace {

std::vector<ItemArrival> evenly_spaced(int n, Micros step) {
  std::vector<ItemArrival> items;
  for (int i = 0; i < n; ++i) {
    items.push_back({static_cast<std::uint64_t>(i), i * step});
  }
  return items;
}

TEST(SequentialSchedule, OneBatchPerItem) {
  const auto items = evenly_spaced(3, 10);
  const auto events = sequential_schedule(items);
  ASSERT_EQ(events.size(), 3u);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(events[i].t_us, i * 10);
    EXPECT_EQ(events[i].item_ids, std::vector<std::uint64_t>{static_cast<std::uint64_t>(i)});
  }
}

TEST(AimdPolicy, ShrinksMultiplicativelyOnSlowFeedback) {
  AimdConfig cfg;
  cfg.initial_batch = 4;
  cfg.latency_target_ms = 0.0;
  // Every observation misses the target: 4 -> 2 -> 1 -> 1.
  const auto events = aimd_schedule(evenly_spaced(8, 10), cfg,
                                    [](const BatchEvent&) { return 1.0; });
  ASSERT_EQ(events.size(), 4u);
  EXPECT_EQ(events[0].size(), 4);
  EXPECT_EQ(events[0].t_us, 30);
  EXPECT_EQ(events[1].size(), 2);
  EXPECT_EQ(events[1].t_us, 50);
  EXPECT_EQ(events[2].size(), 1);
  EXPECT_EQ(events[3].size(), 1);
}

TEST(AimdPolicy, GrowsAdditivelyOnFastFeedback) {
  AimdConfig cfg;
  cfg.latency_target_ms = 1e18;
  // Every observation is within target: 1 -> 2 -> 3.
  const auto events = aimd_schedule(evenly_spaced(6, 10), cfg,
                                    [](const BatchEvent&) { return 0.0; });
  ASSERT_EQ(events.size(), 3u);
  EXPECT_EQ(events[0].size(), 1);
  EXPECT_EQ(events[1].size(), 2);
  EXPECT_EQ(events[1].t_us, 20);
  EXPECT_EQ(events[2].size(), 3);
  EXPECT_EQ(events[2].t_us, 50);
}

TEST(AimdPolicy, BatchSizeClampedToCap) {
  AimdConfig cfg;
  cfg.initial_batch = 2;
  cfg.additive_step = 5;
  cfg.latency_target_ms = 1e18;
  cfg.max_batch = 3;
  AimdPolicy policy(cfg);
  EXPECT_FALSE(policy.on_item(0, 0).has_value());
  auto fired = policy.on_item(1, 10);
  ASSERT_TRUE(fired.has_value());
  policy.on_feedback(0.0);  // 2 + 5 clamps to 3
  EXPECT_EQ(policy.current_batch(), 3);
}

TEST(AimdPolicy, FlushDrainsQueueTail) {
  AimdConfig cfg;
  cfg.initial_batch = 5;
  AimdPolicy policy(cfg);
  policy.on_item(7, 100);
  policy.on_item(8, 200);
  EXPECT_EQ(policy.queued(), 2);
  auto fired = policy.flush(250);
  ASSERT_TRUE(fired.has_value());
  EXPECT_EQ(fired->t_us, 250);
  EXPECT_EQ(fired->item_ids, (std::vector<std::uint64_t>{7, 8}));
  EXPECT_FALSE(policy.flush(300).has_value());
}

TEST(AimdConfig, Validation) {
  AimdConfig bad;
  bad.initial_batch = 0;
  EXPECT_THROW(AimdPolicy{bad}, std::invalid_argument);
  bad = AimdConfig{};
  bad.multiplicative_factor = 1.0;
  EXPECT_THROW(AimdPolicy{bad}, std::invalid_argument);
  bad.multiplicative_factor = 0.0;
  EXPECT_THROW(AimdPolicy{bad}, std::invalid_argument);
  bad = AimdConfig{};
  bad.max_batch = -1;
  EXPECT_THROW(AimdPolicy{bad}, std::invalid_argument);
}

TEST(TimeoutPolicy, TimerFiresLoneItemAfterTimeout) {
  TimeoutBatchConfig cfg;
  cfg.max_batch = 2;
  cfg.timeout_us = 50'000;
  const std::vector<ItemArrival> items{{0, 0}, {1, 60'000}};
  const auto events = timeout_schedule(items, cfg);
  ASSERT_EQ(events.size(), 2u);
  EXPECT_EQ(events[0].t_us, 50'000);
  EXPECT_EQ(events[0].item_ids, std::vector<std::uint64_t>{0});
  EXPECT_EQ(events[1].t_us, 110'000);
  EXPECT_EQ(events[1].item_ids, std::vector<std::uint64_t>{1});
}

TEST(TimeoutPolicy, SizeCapFiresBeforeTimeout) {
  TimeoutBatchConfig cfg;
  cfg.max_batch = 2;
  cfg.timeout_us = 1'000'000;
  const auto events = timeout_schedule(evenly_spaced(4, 10), cfg);
  ASSERT_EQ(events.size(), 2u);
  EXPECT_EQ(events[0].t_us, 10);
  EXPECT_EQ(events[0].item_ids, (std::vector<std::uint64_t>{0, 1}));
  EXPECT_EQ(events[1].t_us, 30);
  EXPECT_EQ(events[1].item_ids, (std::vector<std::uint64_t>{2, 3}));
}

TEST(TimeoutPolicy, DueTimerPrecedesSameInstantArrival) {
  TimeoutBatchConfig cfg;
  cfg.max_batch = 8;
  cfg.timeout_us = 50'000;
  const std::vector<ItemArrival> items{{0, 0}, {1, 50'000}};
  const auto events = timeout_schedule(items, cfg);
  ASSERT_EQ(events.size(), 2u);
  EXPECT_EQ(events[0].t_us, 50'000);
  EXPECT_EQ(events[0].item_ids, std::vector<std::uint64_t>{0});
  EXPECT_EQ(events[1].t_us, 100'000);
  EXPECT_EQ(events[1].item_ids, std::vector<std::uint64_t>{1});
}

TEST(TimeoutPolicy, StaleTimerIsIgnored) {
  TimeoutBatchConfig cfg;
  cfg.max_batch = 2;
  cfg.timeout_us = 50'000;
  TimeoutPolicy policy(cfg);
  EXPECT_FALSE(policy.on_item(0, 0).has_value());
  const auto armed = policy.pending_timer();
  ASSERT_TRUE(armed.has_value());
  EXPECT_EQ(armed->fire_at_us, 50'000);
  ASSERT_TRUE(policy.on_item(1, 10).has_value());  // size cap cancels the timer
  EXPECT_FALSE(policy.pending_timer().has_value());
  EXPECT_FALSE(policy.on_timer(50'000, armed->epoch).has_value());
}

TEST(TimeoutBatchConfig, Validation) {
  TimeoutBatchConfig bad;
  bad.max_batch = 0;
  EXPECT_THROW(TimeoutPolicy{bad}, std::invalid_argument);
  bad = TimeoutBatchConfig{};
  bad.timeout_us = -1;
  EXPECT_THROW(TimeoutPolicy{bad}, std::invalid_argument);
}

std::vector<ItemArrival> random_items(std::uint64_t seed, int n) {
  Rng rng(seed);
  std::vector<ItemArrival> items;
  Micros t = 0;
  for (int i = 0; i < n; ++i) {
    t += rng.uniform_int(0, 40'000);
    items.push_back({static_cast<std::uint64_t>(i), t});
  }
  return items;
}

void check_conservation(const std::vector<ItemArrival>& items,
                        const std::vector<BatchEvent>& events) {
  std::set<std::uint64_t> seen;
  Micros last_t = 0;
  for (const BatchEvent& e : events) {
    ASSERT_GE(e.t_us, last_t);
    last_t = e.t_us;
    ASSERT_GE(e.size(), 1);
    for (std::uint64_t id : e.item_ids) {
      ASSERT_TRUE(seen.insert(id).second) << "item " << id << " batched twice";
    }
  }
  ASSERT_EQ(seen.size(), items.size());
}

TEST(BatchSchedules, ConserveItemsOnRandomStreams) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto items = random_items(seed, 300);
    check_conservation(items, sequential_schedule(items));

    AimdConfig aimd;
    aimd.initial_batch = 2;
    aimd.latency_target_ms = 120.0;
    aimd.max_batch = 6;
    Rng fb(seed + 1000);
    check_conservation(items, aimd_schedule(items, aimd, [&fb](const BatchEvent&) {
                         return fb.uniform(60.0, 200.0);
                       }));

    TimeoutBatchConfig timeout;
    timeout.max_batch = 4;
    timeout.timeout_us = 70'000;
    check_conservation(items, timeout_schedule(items, timeout));
  }
}

}  // namespace
}  // namespace tangram
