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
#include <cstdio>
#include <stdexcept>
#include <string>

#include "tangram/partition.hpp"
#include "tangram/stitch.hpp"

namespace tangram {

// Resource allocation of one serverless function instance.
struct FunctionConfig {
  int vcpus = 2;
  double memory_gb = 4.0;
  double gpu_memory_gb = 6.0;
  double model_size_gb = 2.0;  // resident model weights; must fit under gpu_memory_gb
  int concurrency = 1;

  void validate() const {
    if (vcpus < 1 || memory_gb <= 0 || gpu_memory_gb <= 0 || model_size_gb <= 0 ||
        concurrency < 1) {
      throw std::invalid_argument("function config fields must be positive");
    }
    if (model_size_gb >= gpu_memory_gb) {
      throw std::invalid_argument("model size must be smaller than GPU memory");
    }
  }
};

// Unit prices in dollars. Defaults are Alibaba Function Compute GPU-instance
// rates: per vCPU-second, per GB-second of memory, per GB-second of GPU
// memory, and a flat per-invocation fee.
struct PricingTable {
  double p_cpu = 2.138e-5;
  double p_mem = 2.138e-5;
  double p_gpu = 1.05e-4;
  double p_req = 2e-7;

  void validate() const {
    if (p_cpu < 0 || p_mem < 0 || p_gpu < 0 || p_req < 0) {
      throw std::invalid_argument("prices must be non-negative");
    }
  }
};

using Nanodollars = std::int64_t;

inline double resource_rate_usd_per_s(const FunctionConfig& cfg, const PricingTable& prices) {
  return cfg.vcpus * prices.p_cpu + cfg.memory_gb * prices.p_mem +
         cfg.gpu_memory_gb * prices.p_gpu;
}

// Billed cost of a single invocation that executed for t_f seconds:
// t_f * (vcpus*p_cpu + mem*p_mem + gpu*p_gpu) + p_req.
inline double invocation_cost(double t_f_seconds, const FunctionConfig& cfg,
                              const PricingTable& prices) {
  if (t_f_seconds < 0) throw std::invalid_argument("negative execution time");
  return t_f_seconds * resource_rate_usd_per_s(cfg, prices) + prices.p_req;
}

// Integer-nanodollar variant used by the simulator's accumulators, so that
// totals over millions of invocations stay exact. The duration rate and the
// request fee are each rounded to the nearest nanodollar once.
inline Nanodollars invocation_cost_nanos(Micros t_f_us, const FunctionConfig& cfg,
                                         const PricingTable& prices) {
  if (t_f_us < 0) throw std::invalid_argument("negative execution time");
  const Nanodollars rate_nanos_per_s =
      std::llround(resource_rate_usd_per_s(cfg, prices) * 1e9);
  const Nanodollars req_nanos = std::llround(prices.p_req * 1e9);
  // t_f_us * rate / 1e6, rounded half up in exact integer arithmetic.
  const std::int64_t num = t_f_us * rate_nanos_per_s;
  return (num + 500000) / 1000000 + req_nanos;
}

inline double nanos_to_usd(Nanodollars n) { return static_cast<double>(n) / 1e9; }

// Exact decimal rendering of a nanodollar amount, e.g. 758480 -> "0.000758480".
inline std::string nanos_to_usd_string(Nanodollars n) {
  char buf[48];
  const char* sign = n < 0 ? "-" : "";
  const std::int64_t mag = n < 0 ? -n : n;
  std::snprintf(buf, sizeof(buf), "%s%lld.%09lld", sign,
                static_cast<long long>(mag / 1000000000), static_cast<long long>(mag % 1000000000));
  return buf;
}

// Largest batch size whose canvases fit in GPU memory next to the model:
// floor((gpu_memory - model_size) / vram_per_canvas).
inline int max_canvases_per_batch(const FunctionConfig& cfg, const CanvasSpec& spec) {
  if (spec.vram_per_canvas_gb <= 0) {
    throw std::invalid_argument("vram per canvas must be positive");
  }
  const double head_room = cfg.gpu_memory_gb - cfg.model_size_gb;
  const int k = static_cast<int>(std::floor(head_room / spec.vram_per_canvas_gb + 1e-9));
  if (k < 1) throw std::invalid_argument("cannot fit one canvas in GPU memory");
  return k;
}

}  // namespace tangram
