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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace uavlink::edge {

enum class GateState { kIdle, kAwaitingVerification, kStreaming };
enum class GateEvent { kDetectionsFound, kDetectionsEmpty, kVerifyPositive, kVerifyNegative, kTimeout };
enum class GateAction { kSendImageUpload, kSendStreamStart, kBeginFrameEmission, kSendStreamStop };

std::string_view to_string(GateState s);
std::string_view to_string(GateEvent e);
std::string_view to_string(GateAction a);

/// Conditional-streaming state of one edge node.
/// Invariant: active_stream_id is set iff state == kStreaming.
struct StreamGate {
  GateState state = GateState::kIdle;
  std::optional<std::string> active_stream_id;
  std::int64_t last_verified_ts_ms = 0;
  std::int64_t stream_timeout_ms = 10'000;
  /// Stream ids are "<stream_prefix>-s<n>" with n counting streams opened.
  std::string stream_prefix = "stream";
  std::uint32_t streams_opened = 0;

  bool operator==(const StreamGate&) const = default;
};

struct GateStep {
  StreamGate gate;
  std::vector<GateAction> actions;
};

/// Total transition function:
///   Idle + detections_found            -> AwaitingVerification [upload]
///   AwaitingVerification + positive    -> Streaming [stream start, begin frames]
///   AwaitingVerification + negative    -> Idle
///   Streaming + positive               -> Streaming (refresh last_verified)
///   Streaming + timeout (expired)      -> Idle [stream stop]
/// Every other pair is a no-op self-transition.
GateStep step_gate(const StreamGate& gate, GateEvent event, std::int64_t now_ms);

}  // namespace uavlink::edge
