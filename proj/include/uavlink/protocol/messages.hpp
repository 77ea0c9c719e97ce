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
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "uavlink/core/base64.hpp"
#include "uavlink/domain/types.hpp"

namespace uavlink::protocol {

/// Wire vocabulary. The enumerator order matches the Payload variant order.
enum class MsgType {
  kHello,
  kHelloAck,
  kImageUpload,
  kVerifyResult,
  kAnalysis,
  kStreamStart,
  kVideoFrame,
  kStreamStop,
  kAlertEvent,
  kAlertAck,
  kRuleUpdate,
  kMetricsSnapshot,
};

std::string_view to_string(MsgType t);
std::optional<MsgType> parse_msg_type(std::string_view s);

enum class Role { kEdge, kConsumer, kDashboard };
std::string_view to_string(Role r);
std::optional<Role> parse_role(std::string_view s);

struct Hello {
  Role role = Role::kEdge;
  /// Drone secret for edges, bearer token for dashboards, empty for consumers.
  std::string token;
  std::optional<Id> mission_id;
  bool operator==(const Hello&) const = default;
};

struct HelloAck {
  bool accepted = false;
  std::string reason;
  bool operator==(const HelloAck&) const = default;
};

struct ImageUpload {
  Bytes image_data;
  std::vector<ObjectObservation> detections;
  std::int64_t capture_ts_ms = 0;
  bool operator==(const ImageUpload&) const = default;
};

struct VerifyResult {
  bool verified = false;
  std::optional<Id> matched_rule_id;
  std::optional<Id> alert_id;
  /// Echo of the upload's capture timestamp so the edge can correlate.
  std::int64_t capture_ts_ms = 0;
  std::optional<std::string> error;
  bool operator==(const VerifyResult&) const = default;
};

struct Analysis {
  Id detection_id = 0;
  std::string text;
  bool operator==(const Analysis&) const = default;
};

struct StreamStart {
  std::string stream_id;
  bool operator==(const StreamStart&) const = default;
};

struct VideoFrame {
  std::string stream_id;
  std::uint64_t frame_seq = 0;
  Bytes frame_data;
  std::int64_t encode_ts_ms = 0;
  std::int64_t capture_ts_ms = 0;
  bool operator==(const VideoFrame&) const = default;
};

struct StreamStop {
  std::string stream_id;
  bool operator==(const StreamStop&) const = default;
};

struct AlertEvent {
  Alert alert;
  std::string drone_id;
  std::optional<Id> mission_id;
  /// Set when the event answers a rejected ALERT_ACK.
  std::optional<std::string> error;
  bool operator==(const AlertEvent&) const = default;
};

struct AlertAck {
  Id alert_id = 0;
  AlertAction action = AlertAction::kAcknowledge;
  bool operator==(const AlertAck&) const = default;
};

struct RuleUpdate {
  /// rule_id == 0 asks the server to create a new rule.
  Rule rule;
  std::optional<std::string> error;
  bool operator==(const RuleUpdate&) const = default;
};

struct MetricsSnapshot {
  std::map<std::string, double> values;
  bool operator==(const MetricsSnapshot&) const = default;
};

using Payload = std::variant<Hello, HelloAck, ImageUpload, VerifyResult, Analysis, StreamStart, VideoFrame, StreamStop,
                             AlertEvent, AlertAck, RuleUpdate, MetricsSnapshot>;

inline MsgType payload_type(const Payload& p) { return static_cast<MsgType>(p.index()); }

struct Envelope {
  MsgType msg_type = MsgType::kHello;
  std::string sender_id;
  std::uint64_t seq = 0;
  std::int64_t timestamp_ms = 0;
  Payload payload;

  bool operator==(const Envelope&) const = default;
};

/// Envelope whose msg_type agrees with its payload.
inline Envelope make_envelope(Payload payload, std::string sender_id = {}, std::uint64_t seq = 0,
                              std::int64_t timestamp_ms = 0) {
  const auto type = payload_type(payload);
  return Envelope{type, std::move(sender_id), seq, timestamp_ms, std::move(payload)};
}

}  // namespace uavlink::protocol
