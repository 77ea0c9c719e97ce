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
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "uavlink/domain/types.hpp"

namespace uavlink {

enum class ResolutionProfile { k4k360, k1080p };
enum class EncoderPreset { kUltrafast, kMedium, kSlow };

std::string_view to_string(ResolutionProfile r);
std::string_view to_string(EncoderPreset p);
std::optional<ResolutionProfile> parse_resolution(std::string_view s);
std::optional<EncoderPreset> parse_preset(std::string_view s);

/// One direction-agnostic network link: latency + bandwidth cap + uniform jitter.
struct LinkParams {
  double latency_ms = 0.0;
  /// 0 means unlimited.
  double bandwidth_bps = 0.0;
  double jitter_ms = 0.0;
};

enum class LinkName { kUplink, kDownlink };
std::string_view to_string(LinkName l);

struct NetworkEvent {
  std::int64_t t_ms = 0;
  LinkName link = LinkName::kUplink;
  std::optional<double> latency_ms;
  std::optional<double> bandwidth_bps;
  std::optional<double> jitter_ms;
  /// Drop the link for this long; endpoints see a transport loss.
  std::optional<std::int64_t> disconnect_ms;
};

/// Ground truth visible in every frame captured in [t_ms, t_ms + duration_ms).
struct ScriptedObject {
  std::int64_t t_ms = 0;
  std::int64_t duration_ms = 0;
  ObjectObservation object;
};

struct DetectorParams {
  double latency_min_ms = 200.0;
  double latency_max_ms = 400.0;
  double precision = 1.0;
  double recall = 1.0;
  double tp_confidence_min = 0.6;
  double tp_confidence_max = 0.95;
  double fp_confidence_min = 0.3;
  double fp_confidence_max = 0.7;
  std::vector<std::string> fp_classes{"person"};
};

/// Simulated dashboard user that works through incoming alerts.
struct OperatorParams {
  std::int64_t ack_after_ms = 1'000;
  /// Measured from the acknowledgement.
  std::int64_t resolve_after_ms = 5'000;
};

struct Scenario {
  int schema = 1;
  std::string name = "unnamed";
  std::int64_t duration_ms = 60'000;
  std::uint64_t seed = 1;

  std::string drone_id = "drone-1";
  std::string drone_token = "drone-1-secret";

  std::int64_t frame_period_ms = 200;
  ResolutionProfile resolution = ResolutionProfile::k4k360;
  DetectorParams detector;
  EncoderPreset preset = EncoderPreset::kUltrafast;
  std::int64_t stream_timeout_ms = 10'000;
  /// Raw bytes of the compressed still sent with IMAGE_UPLOAD.
  std::size_t image_bytes = 375'000;
  std::int64_t metrics_period_ms = 1'000;

  LinkParams uplink;
  LinkParams downlink;
  double provider_latency_ms = 2'100.0;
  int consumers = 1;
  double display_delay_ms = 0.0;

  /// rule_id and mission_id are assigned when the mission is provisioned.
  std::vector<Rule> rules;
  std::vector<ScriptedObject> objects;
  std::vector<NetworkEvent> events;

  std::optional<OperatorParams> operator_sim;
  /// An externally quoted end-to-end figure, echoed in reports for comparison.
  std::optional<double> reference_total_ms;
};

/// Schema violation with the 1-based source line and dotted field path.
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(int line, std::string field, const std::string& message);
  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  int line_;
  std::string field_;
};

Scenario parse_scenario(std::string_view yaml_text);
Scenario load_scenario(const std::filesystem::path& path);

/// Semantic checks that apply however the scenario was built.
void validate_scenario(const Scenario& s);

/// Ground-truth objects visible at time t.
std::vector<ObjectObservation> objects_at(const Scenario& s, std::int64_t t_ms);

}  // namespace uavlink
