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
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "uavlink/core/time.hpp"
#include "uavlink/sim/trace.hpp"

namespace uavlink::sim {

/// Timestamps of one uploaded frame as it moves through the pipeline.
struct DetectionLatency {
  std::int64_t capture_ts_ms = 0;
  std::optional<std::int64_t> detection_id;
  std::optional<SimTime> capture;
  std::optional<SimTime> detect_done;
  std::optional<SimTime> upload_received;
  /// Server finished rule verification.
  std::optional<SimTime> verified;
  /// Edge received VERIFY_RESULT; not ordered against the analysis stage.
  std::optional<SimTime> verify_received;
  std::optional<SimTime> analysis_done;
  std::optional<SimTime> delivered;

  bool complete() const { return capture && detect_done && upload_received && analysis_done && delivered; }
};

/// Nearest-rank summary of a sample in milliseconds.
struct Summary {
  std::size_t n = 0;
  double mean = 0.0;
  double p50 = 0.0;
  double p95 = 0.0;
  double min = 0.0;
  double max = 0.0;
};

Summary summarize(std::vector<double> sample);
/// Nearest-rank percentile of a sorted, non-empty sample.
double nearest_rank(const std::vector<double>& sorted, double p);

struct StageReport {
  std::string name;
  Summary ms;
  /// Stage mean over total mean; the four stages sum to one.
  double fraction = 0.0;
};

struct RunReport {
  std::string scenario;
  std::uint64_t seed = 0;
  double duration_s = 0.0;

  std::size_t uploads_completed = 0;
  std::vector<StageReport> stages;  // inference, transmission, analysis, delivery
  Summary total_ms;
  /// (transmission + delivery) / total.
  double network_fraction = 0.0;
  std::optional<double> reference_total_ms;

  std::uint64_t streams = 0;
  double stream_seconds = 0.0;
  std::uint64_t frames_encoded = 0;
  double encoded_fps = 0.0;
  double encoded_bitrate_bps = 0.0;
  std::uint64_t frames_delivered = 0;
  double delivered_fps = 0.0;
  Summary glass_to_glass_ms;
  Summary display_latency_ms;

  /// Edge-to-server bytes keyed by the gate state when the message left.
  std::map<std::string, std::uint64_t> uplink_bytes_by_phase;
  std::map<std::string, std::uint64_t> uplink_bytes_by_type;
  std::uint64_t downlink_bytes = 0;

  std::map<std::string, std::int64_t> counts;
  std::vector<InvariantResult> invariants;
  bool integrity_ok = true;
  bool history_monotone = true;
};

/// Fills the latency part of a report from per-upload records.
void fill_budget(RunReport& report, const std::vector<DetectionLatency>& latencies);

void write_text(std::ostream& out, const RunReport& r);
std::string to_json(const RunReport& r);
void write_latency_log(std::ostream& out, const std::vector<DetectionLatency>& latencies);

}  // namespace uavlink::sim
