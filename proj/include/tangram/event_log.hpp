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

#include <ostream>
#include <string>
#include <utility>

#include <json.hpp>

namespace tangram {

// JSON-lines sink for scheduler events (arrival, repack, timer_set, invoke).
// Keys are emitted in sorted order, so identical runs produce identical logs.
// A null output stream makes every record a no-op.
class EventLog {
 public:
  EventLog() = default;
  EventLog(std::ostream* out, std::string policy) : out_(out), policy_(std::move(policy)) {}

  bool enabled() const { return out_ != nullptr; }

  void record(nlohmann::json obj) {
    if (out_ == nullptr) return;
    obj["policy"] = policy_;
    (*out_) << obj.dump() << "\n";
  }

 private:
  std::ostream* out_ = nullptr;
  std::string policy_;
};

}  // namespace tangram
