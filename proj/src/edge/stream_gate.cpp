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

#include "uavlink/edge/stream_gate.hpp"

namespace uavlink::edge {

std::string_view to_string(GateState s) {
  switch (s) {
    case GateState::kIdle: return "idle";
    case GateState::kAwaitingVerification: return "awaiting_verification";
    case GateState::kStreaming: return "streaming";
  }
  return "?";
}

std::string_view to_string(GateEvent e) {
  switch (e) {
    case GateEvent::kDetectionsFound: return "detections_found";
    case GateEvent::kDetectionsEmpty: return "detections_empty";
    case GateEvent::kVerifyPositive: return "verify_positive";
    case GateEvent::kVerifyNegative: return "verify_negative";
    case GateEvent::kTimeout: return "timeout";
  }
  return "?";
}

std::string_view to_string(GateAction a) {
  switch (a) {
    case GateAction::kSendImageUpload: return "send_image_upload";
    case GateAction::kSendStreamStart: return "send_stream_start";
    case GateAction::kBeginFrameEmission: return "begin_frame_emission";
    case GateAction::kSendStreamStop: return "send_stream_stop";
  }
  return "?";
}

GateStep step_gate(const StreamGate& gate, GateEvent event, std::int64_t now_ms) {
  GateStep step{gate, {}};
  auto& g = step.gate;
  switch (g.state) {
    case GateState::kIdle:
      if (event == GateEvent::kDetectionsFound) {
        g.state = GateState::kAwaitingVerification;
        step.actions = {GateAction::kSendImageUpload};
      }
      break;
    case GateState::kAwaitingVerification:
      if (event == GateEvent::kVerifyPositive) {
        g.state = GateState::kStreaming;
        g.active_stream_id = g.stream_prefix + "-s" + std::to_string(++g.streams_opened);
        g.last_verified_ts_ms = now_ms;
        step.actions = {GateAction::kSendStreamStart, GateAction::kBeginFrameEmission};
      } else if (event == GateEvent::kVerifyNegative) {
        g.state = GateState::kIdle;
      }
      break;
    case GateState::kStreaming:
      if (event == GateEvent::kVerifyPositive) {
        g.last_verified_ts_ms = now_ms;
      } else if (event == GateEvent::kTimeout && now_ms - g.last_verified_ts_ms > g.stream_timeout_ms) {
        g.state = GateState::kIdle;
        g.active_stream_id.reset();
        step.actions = {GateAction::kSendStreamStop};
      }
      break;
  }
  return step;
}

}  // namespace uavlink::edge
