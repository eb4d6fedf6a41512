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

#include "tangram/trace.hpp"

#include <gtest/gtest.h>

#include <sstream>
#include <string>
#include <vector>

namespace tangram {
namespace {

std::vector<TraceScene> sample_scenes() {
  TraceScene a;
  a.scene_id = "cam_a";
  a.frames = {
      TraceFrame{0, 0, 640, 480, {Rect{10, 20, 100, 50}, Rect{300, 100, 64, 64}}},
      TraceFrame{1, 66'667, 640, 480, {}},
      TraceFrame{2, 133'333, 640, 480, {Rect{0, 0, 640, 480}}},
  };
  TraceScene b;
  b.scene_id = "cam_b";
  b.frames = {TraceFrame{0, 5'000, 1920, 1080, {Rect{100, 200, 480, 270}}}};
  return {a, b};
}

TEST(TraceIo, SaveLoadRoundTrip) {
  const auto scenes = sample_scenes();
  std::stringstream ss;
  save_trace(ss, scenes);
  const auto loaded = load_trace(ss);
  ASSERT_EQ(loaded.size(), 2u);
  EXPECT_EQ(loaded[0].scene_id, "cam_a");
  EXPECT_EQ(loaded[1].scene_id, "cam_b");
  ASSERT_EQ(loaded[0].frames.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    const TraceFrame& got = loaded[0].frames[i];
    const TraceFrame& want = scenes[0].frames[i];
    EXPECT_EQ(got.frame_id, want.frame_id);
    EXPECT_EQ(got.t_us, want.t_us);
    EXPECT_EQ(got.width, want.width);
    EXPECT_EQ(got.height, want.height);
    ASSERT_EQ(got.rois.size(), want.rois.size());
    for (std::size_t r = 0; r < got.rois.size(); ++r) {
      EXPECT_EQ(got.rois[r], want.rois[r]);
    }
  }

  // Serialization is stable: saving the loaded trace reproduces the bytes.
  std::ostringstream again;
  save_trace(again, loaded);
  EXPECT_EQ(again.str(), ss.str());
}

TEST(TraceIo, BlankLinesAreSkipped) {
  std::stringstream ss;
  ss << "\n  \t\n"
     << R"({"scene":"s","frame":0,"t_ms":0.0,"W":100,"H":100,"rois":[[1,2,3,4]]})" << "\n\n";
  const auto scenes = load_trace(ss);
  ASSERT_EQ(scenes.size(), 1u);
  ASSERT_EQ(scenes[0].frames.size(), 1u);
  EXPECT_EQ(scenes[0].frames[0].rois[0], (Rect{1, 2, 3, 4}));
}

TEST(TraceIo, ScenesGroupByContiguousRuns) {
  std::stringstream ss;
  ss << R"({"scene":"a","frame":0,"t_ms":0.0,"W":10,"H":10,"rois":[]})" << "\n"
     << R"({"scene":"b","frame":0,"t_ms":0.0,"W":10,"H":10,"rois":[]})" << "\n"
     << R"({"scene":"a","frame":1,"t_ms":10.0,"W":10,"H":10,"rois":[]})" << "\n";
  const auto scenes = load_trace(ss);
  ASSERT_EQ(scenes.size(), 3u);
  EXPECT_EQ(scenes[0].scene_id, "a");
  EXPECT_EQ(scenes[1].scene_id, "b");
  EXPECT_EQ(scenes[2].scene_id, "a");
}

TEST(TraceIo, MalformedLinesAreDiagnosed) {
  {
    std::stringstream ss;
    ss << "not json\n";
    EXPECT_THROW(load_trace(ss), std::invalid_argument);
  }
  {
    std::stringstream ss;
    ss << R"({"scene":"s","frame":0,"t_ms":0.0,"W":10,"H":10,"rois":[[1,2,3]]})" << "\n";
    try {
      load_trace(ss);
      FAIL() << "expected an exception";
    } catch (const std::invalid_argument& e) {
      EXPECT_NE(std::string(e.what()).find("line 1"), std::string::npos);
    }
  }
  {
    std::stringstream ss;  // missing the "W" key
    ss << R"({"scene":"s","frame":0,"t_ms":0.0,"H":10,"rois":[]})" << "\n";
    EXPECT_THROW(load_trace(ss), std::invalid_argument);
  }
}

TEST(TraceIo, MissingFileNamesPath) {
  try {
    load_trace_file("/nonexistent/dir/trace.jsonl");
    FAIL() << "expected an exception";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/dir/trace.jsonl"), std::string::npos);
  }
}

TEST(ValidateScene, RejectsBadFrames) {
  TraceScene scene;
  scene.scene_id = "s";
  scene.frames = {TraceFrame{0, 0, 0, 480, {}}};
  EXPECT_THROW(validate_scene(scene), std::invalid_argument);

  scene.frames = {TraceFrame{0, 100, 640, 480, {}}, TraceFrame{1, 100, 640, 480, {}}};
  EXPECT_THROW(validate_scene(scene), std::invalid_argument);

  scene.frames = {TraceFrame{3, 0, 640, 480, {Rect{600, 0, 100, 10}}}};
  try {
    validate_scene(scene);
    FAIL() << "expected an exception";
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("scene s"), std::string::npos);
    EXPECT_NE(msg.find("frame 3"), std::string::npos);
    EXPECT_NE(msg.find("roi 0"), std::string::npos);
  }
}

TEST(GenerateTrace, DeterministicForFixedSeed) {
  WorkloadGenConfig cfg;
  cfg.n_frames = 60;
  cfg.seed = 7;
  std::ostringstream a;
  std::ostringstream b;
  save_trace(a, {generate_trace(cfg)});
  save_trace(b, {generate_trace(cfg)});
  EXPECT_FALSE(a.str().empty());
  EXPECT_EQ(a.str(), b.str());

  cfg.seed = 8;
  std::ostringstream c;
  save_trace(c, {generate_trace(cfg)});
  EXPECT_NE(c.str(), a.str());
}

TEST(GenerateTrace, FrameTimestampsFollowFps) {
  WorkloadGenConfig cfg;
  cfg.n_frames = 5;
  cfg.fps = 15.0;
  const TraceScene scene = generate_trace(cfg);
  ASSERT_EQ(scene.frames.size(), 5u);
  EXPECT_EQ(scene.frames[0].t_us, 0);
  EXPECT_EQ(scene.frames[1].t_us, 66'667);
  EXPECT_EQ(scene.frames[3].t_us, 200'000);
}

TEST(GenerateTrace, MeanCoverageNearConfiguredProportion) {
  WorkloadGenConfig cfg;
  cfg.n_frames = 1000;
  cfg.roi_count_min = 4;
  cfg.roi_count_max = 8;
  cfg.roi_max_dim = 1920;
  cfg.seed = 3;
  const TraceScene scene = generate_trace(cfg);
  double sum = 0.0;
  for (const TraceFrame& f : scene.frames) {
    double area = 0.0;
    for (const Rect& r : f.rois) area += static_cast<double>(r.w) * r.h;
    sum += area / (static_cast<double>(f.width) * f.height);
  }
  const double mean = sum / static_cast<double>(scene.frames.size());
  // Mean proportion 0.10 plus the burst contribution 0.05 * (3 - 1) * 0.10.
  EXPECT_GT(mean, 0.08);
  EXPECT_LT(mean, 0.14);
}

TEST(GenerateTrace, BoxesRespectBoundsAndCaps) {
  WorkloadGenConfig cfg;
  cfg.n_frames = 200;
  cfg.roi_count_min = 5;
  cfg.roi_count_max = 5;
  cfg.roi_max_dim = 256;
  cfg.seed = 4;
  const TraceScene scene = generate_trace(cfg);
  for (const TraceFrame& f : scene.frames) {
    ASSERT_EQ(f.rois.size(), 5u);
    for (const Rect& r : f.rois) {
      ASSERT_GE(r.w, 4);
      ASSERT_GE(r.h, 4);
      ASSERT_LE(r.w, 256);
      ASSERT_LE(r.h, 256);
      ASSERT_TRUE(contains(Rect{0, 0, f.width, f.height}, r));
    }
  }
}

TEST(GenerateTrace, ZeroRoiCountGivesEmptyFrames) {
  WorkloadGenConfig cfg;
  cfg.n_frames = 20;
  cfg.roi_count_min = 0;
  cfg.roi_count_max = 0;
  const TraceScene scene = generate_trace(cfg);
  for (const TraceFrame& f : scene.frames) EXPECT_TRUE(f.rois.empty());
}

TEST(WorkloadGenConfig, Validation) {
  WorkloadGenConfig cfg;
  cfg.fps = 0.0;
  EXPECT_THROW(generate_trace(cfg), std::invalid_argument);
  cfg = WorkloadGenConfig{};
  cfg.roi_proportion_mean = 1.0;
  EXPECT_THROW(generate_trace(cfg), std::invalid_argument);
  cfg = WorkloadGenConfig{};
  cfg.roi_count_max = 1;
  cfg.roi_count_min = 2;
  EXPECT_THROW(generate_trace(cfg), std::invalid_argument);
  cfg = WorkloadGenConfig{};
  cfg.roi_aspect_max = 0.2;
  EXPECT_THROW(generate_trace(cfg), std::invalid_argument);
  cfg = WorkloadGenConfig{};
  cfg.burst_multiplier = 0.5;
  EXPECT_THROW(generate_trace(cfg), std::invalid_argument);
  cfg = WorkloadGenConfig{};
  cfg.roi_max_dim = 3;
  EXPECT_THROW(generate_trace(cfg), std::invalid_argument);
}

TEST(Transmission, MegabyteAtEightyMbpsTakesHundredMs) {
  EXPECT_EQ(transmission_us(1'000'000, 80.0), 100'000);
  EXPECT_EQ(transmission_us(2'000'000, 80.0), 200'000);
  EXPECT_EQ(transmission_us(0, 80.0), 0);
  EXPECT_THROW(transmission_us(100, 0.0), std::invalid_argument);
}

PatchMeta sized_patch(std::uint64_t id, Micros gen_us, std::int64_t bytes) {
  PatchMeta p;
  p.patch_id = id;
  p.generation_time_us = gen_us;
  p.size_bytes = bytes;
  return p;
}

TEST(Transmission, FifoLinkQueuesBackToBackUploads) {
  const std::vector<PatchMeta> patches = {
      sized_patch(0, 0, 1'000'000),
      sized_patch(1, 0, 1'000'000),
      sized_patch(2, 150'000, 1'000'000),
  };
  const auto arrivals = transmission_schedule(patches, 80.0);
  ASSERT_EQ(arrivals.size(), 3u);
  EXPECT_EQ(arrivals[0], 100'000);  // starts at generation on an idle link
  EXPECT_EQ(arrivals[1], 200'000);  // waits for the first upload
  EXPECT_EQ(arrivals[2], 300'000);  // link still busy at generation time
}

TEST(Transmission, IdleLinkDeliversAtGenerationPlusTransferTime) {
  const auto arrivals = transmission_schedule({sized_patch(0, 40'000, 250'000)}, 80.0);
  ASSERT_EQ(arrivals.size(), 1u);
  EXPECT_EQ(arrivals[0], 40'000 + 25'000);
}

TEST(LinkModel, Validation) {
  LinkModel link;
  EXPECT_NO_THROW(link.validate());
  EXPECT_TRUE(link.per_scene);
  link.bandwidth_mbps = 0.0;
  EXPECT_THROW(link.validate(), std::invalid_argument);
  link = LinkModel{};
  link.bytes_per_pixel = 0.0;
  EXPECT_THROW(link.validate(), std::invalid_argument);
}

}  // namespace
}  // namespace tangram
