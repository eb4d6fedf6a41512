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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tangram/tangram.hpp"

namespace {

struct DimsSpec {
  int width = 0;
  int height = 0;
};

DimsSpec parse_dims(const std::string& text, const std::string& what) {
  DimsSpec d;
  char extra = 0;
  if (std::sscanf(text.c_str(), "%dx%d%c", &d.width, &d.height, &extra) != 2 || d.width < 1 ||
      d.height < 1) {
    throw tangram::ConfigError(what + " must be WxH with positive integers, got '" + text + "'");
  }
  return d;
}

struct LoadedExperiment {
  tangram::ExperimentConfig exp;
  std::vector<tangram::TraceScene> scenes;
  tangram::LatencyProfile profile;
};

LoadedExperiment load_experiment(const std::string& config_path,
                                 const std::optional<std::uint64_t>& seed_override,
                                 const std::string& policy_override,
                                 const std::string& out_override) {
  tangram::KVConfig kv = tangram::KVConfig::parse_file(config_path);
  for (const std::string& key : kv.unknown_keys(tangram::known_experiment_keys())) {
    std::cerr << "warning: unknown config key: " << key << "\n";
  }
  if (seed_override) kv.set("run.seed", std::to_string(*seed_override));
  if (!policy_override.empty()) kv.set("policy.name", policy_override);
  if (!out_override.empty()) kv.set("output.dir", out_override);

  LoadedExperiment loaded;
  loaded.exp = tangram::load_experiment_config(kv);
  std::vector<std::string> warnings;
  try {
    loaded.profile = tangram::load_profile_file(loaded.exp.profile_file, &warnings);
    if (!loaded.exp.trace_file.empty()) {
      loaded.scenes = tangram::load_trace_file(loaded.exp.trace_file);
    } else {
      loaded.scenes.push_back(tangram::generate_trace(*loaded.exp.trace_gen));
    }
  } catch (const tangram::ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw tangram::ConfigError(e.what());
  }
  for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
  return loaded;
}

int cmd_simulate(const std::string& config_path, const std::optional<std::uint64_t>& seed,
                 const std::string& policy, const std::string& out) {
  const LoadedExperiment loaded = load_experiment(config_path, seed, policy, out);
  const tangram::ExperimentConfig& exp = loaded.exp;
  std::filesystem::create_directories(exp.out_dir);

  std::ofstream log_stream;
  tangram::EventLog log;
  if (exp.write_event_log) {
    const std::string path = exp.out_dir + "/events.jsonl";
    log_stream.open(path, std::ios::binary);
    if (!log_stream) throw std::runtime_error("cannot write event log: " + path);
    log = tangram::EventLog(&log_stream, tangram::to_string(exp.sim.policy));
  }

  const tangram::RunMetrics metrics =
      tangram::run(loaded.scenes, exp.sim, loaded.profile, exp.write_event_log ? &log : nullptr);

  {
    std::ofstream os(exp.out_dir + "/summary.csv", std::ios::binary);
    if (!os) throw std::runtime_error("cannot write summary.csv under " + exp.out_dir);
    tangram::write_summary_csv(os, metrics.summary);
  }
  if (exp.write_patches) {
    std::ofstream os(exp.out_dir + "/patches.csv", std::ios::binary);
    tangram::write_patches_csv(os, metrics);
  }
  if (exp.write_invocations) {
    std::ofstream os(exp.out_dir + "/invocations.csv", std::ios::binary);
    tangram::write_invocations_csv(os, metrics);
  }
  std::cout << tangram::summary_line(metrics.summary) << "\n";
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::optional<std::uint64_t>& seed,
              const std::string& out) {
  const LoadedExperiment loaded = load_experiment(config_path, seed, "", out);
  const tangram::ExperimentConfig& exp = loaded.exp;
  std::filesystem::create_directories(exp.out_dir);

  std::vector<std::string> policies = exp.sweep_policies;
  if (policies.empty()) policies.push_back(tangram::to_string(exp.sim.policy));
  std::vector<double> slos = exp.sweep_slo_ms;
  if (slos.empty()) slos.push_back(tangram::us_to_ms(exp.sim.slo_us));
  std::vector<double> bandwidths = exp.sweep_bandwidth_mbps;
  if (bandwidths.empty()) bandwidths.push_back(exp.sim.link.bandwidth_mbps);

  const std::string path = exp.out_dir + "/sweep.csv";
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write sweep csv: " + path);
  os << "status,error," << tangram::summary_csv_header() << "\n";

  int rows = 0;
  for (const std::string& policy : policies) {
    for (double slo_ms : slos) {
      for (double bandwidth : bandwidths) {
        tangram::SimConfig cell = exp.sim;
        tangram::RunSummary fallback;
        fallback.policy = policy;
        fallback.slo_us = tangram::ms_to_us(slo_ms);
        fallback.bandwidth_mbps = bandwidth;
        fallback.seed = cell.seed;
        try {
          cell.policy = tangram::parse_policy(policy);
          if (!(slo_ms > 0.0)) throw std::invalid_argument("slo must be positive");
          cell.slo_us = tangram::ms_to_us(slo_ms);
          cell.link.bandwidth_mbps = bandwidth;
          const tangram::RunMetrics metrics = tangram::run(loaded.scenes, cell, loaded.profile);
          os << "ok,," << tangram::summary_csv_row(metrics.summary) << "\n";
        } catch (const std::exception& e) {
          os << "error," << tangram::detail::csv_escape(e.what()) << ','
             << tangram::summary_csv_row(fallback) << "\n";
        }
        ++rows;
      }
    }
  }
  std::cout << "wrote " << rows << " rows to " << path << "\n";
  return 0;
}

int cmd_gen_trace(const tangram::WorkloadGenConfig& gen, const std::string& out) {
  tangram::TraceScene scene;
  try {
    scene = tangram::generate_trace(gen);
  } catch (const std::invalid_argument& e) {
    throw tangram::ConfigError(e.what());
  }
  tangram::save_trace_file(out, {scene});
  std::cout << "wrote " << scene.frames.size() << " frames to " << out << "\n";
  return 0;
}

int cmd_gen_profile(const std::string& canvas_text, int k_max, double base_ms,
                    double per_canvas_ms, double sigma_frac, int samples, std::uint64_t seed,
                    const std::string& out) {
  const DimsSpec canvas = parse_dims(canvas_text, "--canvas");
  if (k_max < 1) throw tangram::ConfigError("--k-max must be >= 1");
  if (samples < 1) throw tangram::ConfigError("--samples must be >= 1");
  if (base_ms < 0 || per_canvas_ms < 0 || base_ms + per_canvas_ms <= 0)
    throw tangram::ConfigError("latency law must be positive");
  if (sigma_frac < 0) throw tangram::ConfigError("--sigma-frac must be >= 0");

  tangram::Rng rng(tangram::derive_seed(seed, "profile"));
  std::map<int, std::vector<double>> samples_ms;
  for (int k = 1; k <= k_max; ++k) {
    const double mu = base_ms + per_canvas_ms * k;
    const double sigma = sigma_frac * mu;
    std::vector<double>& bucket = samples_ms[k];
    bucket.reserve(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i) bucket.push_back(rng.truncated_normal(mu, sigma));
  }
  std::vector<std::string> warnings;
  const tangram::LatencyProfile profile =
      tangram::profile_from_samples(canvas.width, canvas.height, samples_ms, &warnings);
  for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
  tangram::save_profile_file(out, profile);
  std::cout << "wrote profile with k=1.." << k_max << " to " << out << "\n";
  return 0;
}

int cmd_dump_packing(const std::string& canvas_text, const std::vector<std::string>& patch_texts,
                     bool as_json, const std::string& out) {
  const DimsSpec canvas = parse_dims(canvas_text, "--canvas");
  tangram::CanvasSpec spec;
  spec.width = canvas.width;
  spec.height = canvas.height;
  std::vector<tangram::PatchMeta> patches;
  for (std::size_t i = 0; i < patch_texts.size(); ++i) {
    const DimsSpec d = parse_dims(patch_texts[i], "--patch");
    if (d.width > spec.width || d.height > spec.height)
      throw tangram::ConfigError("patch " + std::to_string(i) + " does not fit the canvas");
    tangram::PatchMeta p;
    p.patch_id = i;
    p.rect = tangram::Rect{0, 0, d.width, d.height};
    patches.push_back(p);
  }
  const tangram::StitchResult result = tangram::stitch_all(patches, spec);

  std::string text;
  if (as_json) {
    nlohmann::json doc;
    doc["canvas"] = {{"width", spec.width}, {"height", spec.height}};
    doc["canvases"] = nlohmann::json::array();
    const std::vector<double> eff = tangram::canvas_efficiency(result);
    for (int ci = 0; ci < result.canvas_count(); ++ci) {
      nlohmann::json entry;
      entry["index"] = ci;
      entry["efficiency"] = eff[static_cast<std::size_t>(ci)];
      entry["placements"] = nlohmann::json::array();
      entry["free_rects"] = nlohmann::json::array();
      for (const tangram::Placement& p : result.canvases[static_cast<std::size_t>(ci)].placements) {
        entry["placements"].push_back({{"patch", p.patch_id},
                                       {"x", p.position.x},
                                       {"y", p.position.y},
                                       {"w", p.position.w},
                                       {"h", p.position.h}});
      }
      for (const tangram::Rect& r : result.canvases[static_cast<std::size_t>(ci)].free_rects) {
        entry["free_rects"].push_back({{"x", r.x}, {"y", r.y}, {"w", r.w}, {"h", r.h}});
      }
      doc["canvases"].push_back(entry);
    }
    text = doc.dump(2) + "\n";
  } else {
    text = tangram::dump_layout(result);
  }
  if (out.empty()) {
    std::cout << text;
  } else {
    std::ofstream os(out, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write layout to " + out);
    os << text;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-event simulator for SLO-aware patch batching on serverless GPUs"};
  app.require_subcommand(1);

  std::string config_path;
  std::string policy_override;
  std::string out_override;
  std::optional<std::uint64_t> seed_override;

  CLI::App* simulate = app.add_subcommand("simulate", "Run one simulation from a config file");
  simulate->add_option("--config", config_path, "Config file path")->required();
  simulate->add_option("--seed", seed_override, "Override run.seed");
  simulate->add_option("--policy", policy_override,
                       "Override policy (tangram|sequential|elf|clipper|mark)");
  simulate->add_option("--out", out_override, "Override output directory");

  CLI::App* sweep = app.add_subcommand("sweep", "Run the SLO x bandwidth x policy grid");
  sweep->add_option("--config", config_path, "Config file path")->required();
  sweep->add_option("--seed", seed_override, "Override run.seed");
  sweep->add_option("--out", out_override, "Override output directory");

  tangram::WorkloadGenConfig gen;
  std::string gen_out = "trace.jsonl";
  CLI::App* gen_trace = app.add_subcommand("gen-trace", "Generate a synthetic camera trace");
  gen_trace->add_option("--out", gen_out, "Output trace path");
  gen_trace->add_option("--seed", gen.seed, "Generator seed");
  gen_trace->add_option("--scene", gen.scene_id, "Scene identifier");
  gen_trace->add_option("--frames", gen.n_frames, "Frame count");
  gen_trace->add_option("--fps", gen.fps, "Frames per second");
  gen_trace->add_option("--width", gen.frame_width, "Frame width in pixels");
  gen_trace->add_option("--height", gen.frame_height, "Frame height in pixels");
  gen_trace->add_option("--roi-mean", gen.roi_proportion_mean, "Mean covered proportion");
  gen_trace->add_option("--roi-jitter", gen.roi_proportion_jitter, "Relative jitter");
  gen_trace->add_option("--burst-prob", gen.burst_probability, "Burst probability per frame");
  gen_trace->add_option("--burst-mult", gen.burst_multiplier, "Burst area multiplier");
  gen_trace->add_option("--count-min", gen.roi_count_min, "Minimum regions per frame");
  gen_trace->add_option("--count-max", gen.roi_count_max, "Maximum regions per frame");
  gen_trace->add_option("--aspect-min", gen.roi_aspect_min, "Minimum region aspect (w/h)");
  gen_trace->add_option("--aspect-max", gen.roi_aspect_max, "Maximum region aspect (w/h)");
  gen_trace->add_option("--max-dim", gen.roi_max_dim, "Maximum region side in pixels");

  std::string profile_canvas = "1024x1024";
  int k_max = 6;
  double base_ms = 60.0;
  double per_canvas_ms = 25.0;
  double sigma_frac = 0.05;
  int samples = 200;
  std::uint64_t profile_seed = 1;
  std::string profile_out = "profile.csv";
  CLI::App* gen_profile =
      app.add_subcommand("gen-profile", "Profile a synthetic execution-latency law");
  gen_profile->add_option("--out", profile_out, "Output profile path");
  gen_profile->add_option("--canvas", profile_canvas, "Canvas size WxH");
  gen_profile->add_option("--k-max", k_max, "Largest batch size to profile");
  gen_profile->add_option("--base-ms", base_ms, "Latency law intercept in ms");
  gen_profile->add_option("--per-canvas-ms", per_canvas_ms, "Latency law slope per canvas in ms");
  gen_profile->add_option("--sigma-frac", sigma_frac, "Noise sigma as a fraction of the mean");
  gen_profile->add_option("--samples", samples, "Samples per batch size");
  gen_profile->add_option("--seed", profile_seed, "Sampling seed");

  std::string pack_canvas = "100x100";
  std::vector<std::string> pack_patches;
  bool pack_json = false;
  std::string pack_out;
  CLI::App* dump_packing = app.add_subcommand("dump-packing", "Show how patches pack onto canvases");
  dump_packing->add_option("--canvas", pack_canvas, "Canvas size WxH");
  dump_packing->add_option("--patch", pack_patches, "Patch size WxH (repeatable)")->required();
  dump_packing->add_flag("--json", pack_json, "Emit JSON instead of text");
  dump_packing->add_option("--out", pack_out, "Write to a file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(config_path, seed_override, policy_override, out_override);
    if (sweep->parsed()) return cmd_sweep(config_path, seed_override, out_override);
    if (gen_trace->parsed()) return cmd_gen_trace(gen, gen_out);
    if (gen_profile->parsed())
      return cmd_gen_profile(profile_canvas, k_max, base_ms, per_canvas_ms, sigma_frac, samples,
                             profile_seed, profile_out);
    if (dump_packing->parsed()) return cmd_dump_packing(pack_canvas, pack_patches, pack_json, pack_out);
  } catch (const tangram::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
