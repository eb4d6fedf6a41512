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

#include "tangram/cost.hpp"

#include <gtest/gtest.h>

#include "tangram/rng.hpp"

namespace tangram {
namespace {

TEST(InvocationCost, WorkedExampleOneSecond) {
  const FunctionConfig cfg;  // 2 vCPU, 4 GB, 6 GB GPU
  const PricingTable prices;
  EXPECT_NEAR(invocation_cost(1.0, cfg, prices), 7.5848e-4, 1e-17);
  EXPECT_EQ(invocation_cost_nanos(1'000'000, cfg, prices), 758480);
  EXPECT_EQ(nanos_to_usd_string(758480), "0.000758480");
}

TEST(InvocationCost, TenthOfASecond) {
  EXPECT_EQ(invocation_cost_nanos(100'000, FunctionConfig{}, PricingTable{}), 76028);
}

TEST(InvocationCost, ZeroDurationPaysRequestFeeOnly) {
  EXPECT_DOUBLE_EQ(invocation_cost(0.0, FunctionConfig{}, PricingTable{}), 2e-7);
  EXPECT_EQ(invocation_cost_nanos(0, FunctionConfig{}, PricingTable{}), 200);
}

TEST(InvocationCost, NegativeDurationThrows) {
  EXPECT_THROW(invocation_cost(-1.0, FunctionConfig{}, PricingTable{}), std::invalid_argument);
  EXPECT_THROW(invocation_cost_nanos(-1, FunctionConfig{}, PricingTable{}), std::invalid_argument);
}

TEST(InvocationCost, NanosTrackDoubleFormula) {
  Rng rng(derive_seed(5, "cost"));
  for (int i = 0; i < 2000; ++i) {
    FunctionConfig cfg;
    cfg.vcpus = rng.uniform_int(1, 16);
    cfg.memory_gb = rng.uniform(0.5, 64.0);
    cfg.gpu_memory_gb = rng.uniform(4.0, 48.0);
    cfg.model_size_gb = 1.0;
    PricingTable prices;
    prices.p_cpu = rng.uniform(0.0, 1e-3);
    prices.p_mem = rng.uniform(0.0, 1e-3);
    prices.p_gpu = rng.uniform(0.0, 1e-3);
    prices.p_req = rng.uniform(0.0, 1e-5);
    const Micros t_f_us = rng.uniform_int(0, 5'000'000);
    const double usd = invocation_cost(static_cast<double>(t_f_us) / 1e6, cfg, prices);
    const double from_nanos = nanos_to_usd(invocation_cost_nanos(t_f_us, cfg, prices));
    // Each rounding step loses at most a nanodollar.
    ASSERT_NEAR(from_nanos, usd, 5e-9);
  }
}

TEST(FunctionConfig, ValidationRules) {
  FunctionConfig bad;
  bad.vcpus = 0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = FunctionConfig{};
  bad.model_size_gb = bad.gpu_memory_gb;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  EXPECT_NO_THROW(FunctionConfig{}.validate());
}

TEST(PricingTable, RejectsNegativePrices) {
  PricingTable bad;
  bad.p_gpu = -1e-6;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  EXPECT_NO_THROW(PricingTable{}.validate());
}

TEST(MaxCanvases, FlooredHeadroomRatio) {
  FunctionConfig cfg;  // 6 GB GPU, 2 GB model
  CanvasSpec spec;
  spec.vram_per_canvas_gb = 1.0;
  EXPECT_EQ(max_canvases_per_batch(cfg, spec), 4);
  spec.vram_per_canvas_gb = 0.5;
  EXPECT_EQ(max_canvases_per_batch(cfg, spec), 8);
}

TEST(MaxCanvases, NoRoomForOneCanvasThrows) {
  FunctionConfig cfg;
  cfg.model_size_gb = 5.5;
  CanvasSpec spec;
  spec.vram_per_canvas_gb = 1.0;
  try {
    max_canvases_per_batch(cfg, spec);
    FAIL() << "expected an exception";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("cannot fit one canvas"), std::string::npos);
  }
}

TEST(NanosToUsdString, PadsFractionToNineDigits) {
  EXPECT_EQ(nanos_to_usd_string(0), "0.000000000");
  EXPECT_EQ(nanos_to_usd_string(1), "0.000000001");
  EXPECT_EQ(nanos_to_usd_string(1'000'000'000), "1.000000000");
  EXPECT_EQ(nanos_to_usd_string(1'234'567'890'123), "1234.567890123");
  EXPECT_EQ(nanos_to_usd_string(-758480), "-0.000758480");
}

}  // namespace
}  // namespace tangram
