// Copyright 2026 The uavlink Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "uavlink/consumer/consumer_state.hpp"
#include "uavlink/edge/edge_node.hpp"
#include "uavlink/scenario/scenario.hpp"
#include "uavlink/server/server_core.hpp"
#include "uavlink/server/store.hpp"
#include "uavlink/sim/report.hpp"
#include "uavlink/sim/trace.hpp"

namespace uavlink::sim {

/// Wall-clock origin of simulated runs (2026-01-01T00:00:00Z).
inline constexpr std::int64_t kSimEpochMs = 1'767'225'600'000;

struct RunOptions {
  /// After capture stops, keep running until the system is quiet or this
  /// much simulated time has passed.
  std::int64_t settle_limit_ms = 60'000;
};

struct RunResult {
  RunReport report;
  TraceLog trace;
  /// Every upload the server received, in capture order.
  std::vector<DetectionLatency> latencies;
  /// Frames shown by consumer 0.
  std::vector<consumer::DisplayRecord> displayed;
  edge::EdgeStats edge;
  server::ServerStats server;
  server::StoreCounts store;
  server::IntegrityReport integrity;
  std::optional<std::string> edge_error;

  bool passed() const;
};

/// Runs one scenario under the simulated clock: edge node, network links,
/// server core with an in-memory SQLite store, consumers and an optional
/// simulated operator.
RunResult run_scenario(const Scenario& scenario, const RunOptions& options = {});

/// Writes trace.log, report.json, report.txt, latency.tsv and display.tsv.
void write_run_outputs(const RunResult& result, const std::filesystem::path& dir);

/// A valid scenario with randomized objects, links, faults and rules.
Scenario random_scenario(std::uint64_t seed);

}  // namespace uavlink::sim
