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

#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tangram/sim.hpp"

namespace tangram {

// Invalid or inconsistent configuration; the command line maps this to a
// dedicated exit code.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Minimal key-value config document:
//
//   # comment
//   [section]
//   key = value            # bare scalar
//   name = "quoted text"
//   grid = [1, 2, 3]       # list of scalars
//
// Keys are addressed as "section.key". No nesting, no escapes in strings,
// comments start at an unquoted '#'.
class KVConfig {
 public:
  static KVConfig parse(std::istream& is) {
    KVConfig cfg;
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(is, line)) {
      ++line_no;
      std::string text = strip_comment(line);
      text = trim(text);
      if (text.empty()) continue;
      if (text.front() == '[' && text.back() == ']') {
        section = trim(text.substr(1, text.size() - 2));
        if (section.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty section name");
        continue;
      }
      const std::size_t eq = text.find('=');
      if (eq == std::string::npos)
        throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
      const std::string key = trim(text.substr(0, eq));
      const std::string value = trim(text.substr(eq + 1));
      if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
      const std::string full_key = section.empty() ? key : section + "." + key;
      if (!value.empty() && value.front() == '[') {
        if (value.back() != ']')
          throw ConfigError("line " + std::to_string(line_no) + ": unterminated list");
        cfg.lists_[full_key] = split_list(value.substr(1, value.size() - 2), line_no);
      } else {
        cfg.values_[full_key] = unquote(value);
      }
    }
    return cfg;
  }

  static KVConfig parse_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open config file: " + path);
    return parse(is);
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  bool has_list(const std::string& key) const { return lists_.count(key) > 0; }

  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  std::string get_string(const std::string& key, const std::string& def) const {
    const auto it = values_.find(key);
    return it == values_.end() ? def : it->second;
  }

  std::string require_string(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing required config key: " + key);
    return it->second;
  }

  std::int64_t get_int(const std::string& key, std::int64_t def) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return def;
    return parse_int(key, it->second);
  }

  double get_double(const std::string& key, double def) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return def;
    return parse_double(key, it->second);
  }

  bool get_bool(const std::string& key, bool def) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return def;
    if (it->second == "true") return true;
    if (it->second == "false") return false;
    throw ConfigError(key + ": expected true or false, got '" + it->second + "'");
  }

  std::vector<std::string> get_string_list(const std::string& key) const {
    const auto it = lists_.find(key);
    if (it == lists_.end()) return {};
    return it->second;
  }

  std::vector<double> get_double_list(const std::string& key) const {
    std::vector<double> out;
    for (const std::string& item : get_string_list(key)) out.push_back(parse_double(key, item));
    return out;
  }

  // Keys present in the document but not in `known`; used to warn on typos.
  std::vector<std::string> unknown_keys(const std::set<std::string>& known) const {
    std::vector<std::string> out;
    for (const auto& [key, value] : values_) {
      if (known.count(key) == 0) out.push_back(key);
    }
    for (const auto& [key, value] : lists_) {
      if (known.count(key) == 0) out.push_back(key);
    }
    return out;
  }

 private:
  static std::string trim(const std::string& s) {
    const std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  static std::string strip_comment(const std::string& s) {
    bool in_quotes = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '"') in_quotes = !in_quotes;
      if (s[i] == '#' && !in_quotes) return s.substr(0, i);
    }
    return s;
  }

  static std::string unquote(const std::string& s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
    return s;
  }

  static std::vector<std::string> split_list(const std::string& body, int line_no) {
    std::vector<std::string> out;
    std::string current;
    bool in_quotes = false;
    bool any = false;
    for (char c : body) {
      if (c == '"') in_quotes = !in_quotes;
      if (c == ',' && !in_quotes) {
        out.push_back(unquote(trim(current)));
        current.clear();
        any = true;
        continue;
      }
      current += c;
    }
    if (in_quotes) throw ConfigError("line " + std::to_string(line_no) + ": unterminated string");
    const std::string last = trim(current);
    if (!last.empty() || any) out.push_back(unquote(last));
    return out;
  }

  static std::int64_t parse_int(const std::string& key, const std::string& value) {
    std::int64_t result = 0;
    const char* begin = value.data();
    const char* end = begin + value.size();
    const auto [ptr, ec] = std::from_chars(begin, end, result);
    if (ec != std::errc() || ptr != end)
      throw ConfigError(key + ": expected integer, got '" + value + "'");
    return result;
  }

  static double parse_double(const std::string& key, const std::string& value) {
    try {
      std::size_t consumed = 0;
      const double result = std::stod(value, &consumed);
      if (consumed != value.size()) throw std::invalid_argument(value);
      return result;
    } catch (const std::exception&) {
      throw ConfigError(key + ": expected number, got '" + value + "'");
    }
  }

  std::map<std::string, std::string> values_;
  std::map<std::string, std::vector<std::string>> lists_;
};

// Everything one simulation or sweep needs, assembled from a config document.
struct ExperimentConfig {
  SimConfig sim;
  std::string trace_file;                       // empty when generating inline
  std::optional<WorkloadGenConfig> trace_gen;   // used when trace_file is empty
  std::string profile_file;
  std::string out_dir = ".";
  bool write_patches = true;
  bool write_invocations = true;
  bool write_event_log = true;
  std::vector<double> sweep_slo_ms;
  std::vector<double> sweep_bandwidth_mbps;
  std::vector<std::string> sweep_policies;
};

inline const std::set<std::string>& known_experiment_keys() {
  static const std::set<std::string> keys{
      "trace.file",
      "trace_gen.scene_id", "trace_gen.frames", "trace_gen.fps", "trace_gen.width",
      "trace_gen.height", "trace_gen.roi_proportion_mean", "trace_gen.roi_proportion_jitter",
      "trace_gen.burst_probability", "trace_gen.burst_multiplier", "trace_gen.roi_count_min",
      "trace_gen.roi_count_max", "trace_gen.roi_aspect_min", "trace_gen.roi_aspect_max",
      "trace_gen.roi_max_dim", "trace_gen.seed",
      "partition.zones_x", "partition.zones_y",
      "canvas.width", "canvas.height", "canvas.vram_gb",
      "function.vcpus", "function.memory_gb", "function.gpu_memory_gb", "function.model_size_gb",
      "function.concurrency", "function.instance_count",
      "prices.p_cpu", "prices.p_mem", "prices.p_gpu", "prices.p_req",
      "profile.file",
      "link.bandwidth_mbps", "link.bytes_per_pixel", "link.shared",
      "policy.name", "policy.elf_min_scale", "policy.aimd_initial_batch", "policy.aimd_step",
      "policy.aimd_factor", "policy.aimd_target_ms", "policy.timeout_ms", "policy.max_batch",
      "run.seed", "run.slo_ms", "run.exec_sigma_scale", "run.cold_start_ms",
      "output.dir", "output.patches", "output.invocations", "output.event_log",
      "sweep.slo_ms", "sweep.bandwidth_mbps", "sweep.policies",
  };
  return keys;
}

inline ExperimentConfig load_experiment_config(const KVConfig& kv) {
  ExperimentConfig exp;
  try {
    SimConfig& sim = exp.sim;
    sim.partition.zones_x = static_cast<int>(kv.get_int("partition.zones_x", sim.partition.zones_x));
    sim.partition.zones_y = static_cast<int>(kv.get_int("partition.zones_y", sim.partition.zones_y));
    sim.canvas.width = static_cast<int>(kv.get_int("canvas.width", sim.canvas.width));
    sim.canvas.height = static_cast<int>(kv.get_int("canvas.height", sim.canvas.height));
    sim.canvas.vram_per_canvas_gb = kv.get_double("canvas.vram_gb", sim.canvas.vram_per_canvas_gb);
    sim.function.vcpus = static_cast<int>(kv.get_int("function.vcpus", sim.function.vcpus));
    sim.function.memory_gb = kv.get_double("function.memory_gb", sim.function.memory_gb);
    sim.function.gpu_memory_gb = kv.get_double("function.gpu_memory_gb", sim.function.gpu_memory_gb);
    sim.function.model_size_gb = kv.get_double("function.model_size_gb", sim.function.model_size_gb);
    sim.function.concurrency = static_cast<int>(kv.get_int("function.concurrency", sim.function.concurrency));
    sim.instance_count = static_cast<int>(kv.get_int("function.instance_count", sim.instance_count));
    sim.prices.p_cpu = kv.get_double("prices.p_cpu", sim.prices.p_cpu);
    sim.prices.p_mem = kv.get_double("prices.p_mem", sim.prices.p_mem);
    sim.prices.p_gpu = kv.get_double("prices.p_gpu", sim.prices.p_gpu);
    sim.prices.p_req = kv.get_double("prices.p_req", sim.prices.p_req);
    sim.link.bandwidth_mbps = kv.get_double("link.bandwidth_mbps", sim.link.bandwidth_mbps);
    sim.link.bytes_per_pixel = kv.get_double("link.bytes_per_pixel", sim.link.bytes_per_pixel);
    sim.link.per_scene = !kv.get_bool("link.shared", !sim.link.per_scene);
    sim.policy = parse_policy(kv.get_string("policy.name", "tangram"));
    sim.elf_min_scale = kv.get_double("policy.elf_min_scale", sim.elf_min_scale);
    sim.aimd.initial_batch = static_cast<int>(kv.get_int("policy.aimd_initial_batch", sim.aimd.initial_batch));
    sim.aimd.additive_step = static_cast<int>(kv.get_int("policy.aimd_step", sim.aimd.additive_step));
    sim.aimd.multiplicative_factor = kv.get_double("policy.aimd_factor", sim.aimd.multiplicative_factor);
    sim.aimd.latency_target_ms = kv.get_double("policy.aimd_target_ms", sim.aimd.latency_target_ms);
    sim.timeout_batch.timeout_us = ms_to_us(kv.get_double("policy.timeout_ms",
                                                          us_to_ms(sim.timeout_batch.timeout_us)));
    const int max_batch = static_cast<int>(kv.get_int("policy.max_batch", 0));
    if (max_batch < 0) throw ConfigError("policy.max_batch: must be >= 0");
    sim.aimd.max_batch = max_batch;
    sim.timeout_batch.max_batch = max_batch;
    sim.seed = static_cast<std::uint64_t>(kv.get_int("run.seed", static_cast<std::int64_t>(sim.seed)));
    sim.slo_us = ms_to_us(kv.get_double("run.slo_ms", us_to_ms(sim.slo_us)));
    sim.exec_sigma_scale = kv.get_double("run.exec_sigma_scale", sim.exec_sigma_scale);
    sim.cold_start_us = ms_to_us(kv.get_double("run.cold_start_ms", 0.0));

    exp.trace_file = kv.get_string("trace.file", "");
    if (exp.trace_file.empty()) {
      WorkloadGenConfig gen;
      gen.scene_id = kv.get_string("trace_gen.scene_id", gen.scene_id);
      gen.n_frames = static_cast<int>(kv.get_int("trace_gen.frames", gen.n_frames));
      gen.fps = kv.get_double("trace_gen.fps", gen.fps);
      gen.frame_width = static_cast<int>(kv.get_int("trace_gen.width", gen.frame_width));
      gen.frame_height = static_cast<int>(kv.get_int("trace_gen.height", gen.frame_height));
      gen.roi_proportion_mean = kv.get_double("trace_gen.roi_proportion_mean", gen.roi_proportion_mean);
      gen.roi_proportion_jitter = kv.get_double("trace_gen.roi_proportion_jitter", gen.roi_proportion_jitter);
      gen.burst_probability = kv.get_double("trace_gen.burst_probability", gen.burst_probability);
      gen.burst_multiplier = kv.get_double("trace_gen.burst_multiplier", gen.burst_multiplier);
      gen.roi_count_min = static_cast<int>(kv.get_int("trace_gen.roi_count_min", gen.roi_count_min));
      gen.roi_count_max = static_cast<int>(kv.get_int("trace_gen.roi_count_max", gen.roi_count_max));
      gen.roi_aspect_min = kv.get_double("trace_gen.roi_aspect_min", gen.roi_aspect_min);
      gen.roi_aspect_max = kv.get_double("trace_gen.roi_aspect_max", gen.roi_aspect_max);
      gen.roi_max_dim = static_cast<int>(kv.get_int("trace_gen.roi_max_dim", gen.roi_max_dim));
      gen.seed = static_cast<std::uint64_t>(
          kv.get_int("trace_gen.seed", static_cast<std::int64_t>(sim.seed)));
      gen.validate();
      exp.trace_gen = gen;
    }
    exp.profile_file = kv.require_string("profile.file");
    exp.out_dir = kv.get_string("output.dir", exp.out_dir);
    exp.write_patches = kv.get_bool("output.patches", exp.write_patches);
    exp.write_invocations = kv.get_bool("output.invocations", exp.write_invocations);
    exp.write_event_log = kv.get_bool("output.event_log", exp.write_event_log);
    exp.sweep_slo_ms = kv.get_double_list("sweep.slo_ms");
    exp.sweep_bandwidth_mbps = kv.get_double_list("sweep.bandwidth_mbps");
    exp.sweep_policies = kv.get_string_list("sweep.policies");

    sim.function.validate();
    sim.prices.validate();
    sim.link.validate();
    if (sim.canvas.width < 1 || sim.canvas.height < 1)
      throw ConfigError("canvas dimensions must be positive");
    if (sim.slo_us <= 0) throw ConfigError("run.slo_ms must be positive");
    max_canvases_per_batch(sim.function, sim.canvas);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return exp;
}

}  // namespace tangram
