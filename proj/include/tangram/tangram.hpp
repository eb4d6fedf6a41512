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

#include "tangram/baselines.hpp"
#include "tangram/config.hpp"
#include "tangram/cost.hpp"
#include "tangram/event_log.hpp"
#include "tangram/geometry.hpp"
#include "tangram/latency.hpp"
#include "tangram/metrics.hpp"
#include "tangram/partition.hpp"
#include "tangram/rng.hpp"
#include "tangram/scheduler.hpp"
#include "tangram/sim.hpp"
#include "tangram/stitch.hpp"
#include "tangram/trace.hpp"
