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

#include "uavlink/edge/edge_node.hpp"

#include <cmath>

#include "uavlink/core/random.hpp"

namespace uavlink::edge {

using namespace protocol;

EdgeConfig EdgeConfig::from_scenario(const Scenario& s) {
  EdgeConfig c;
  c.drone_id = s.drone_id;
  c.token = s.drone_token;
  c.detector = DetectorModel{s.detector, s.seed};
  c.preset = s.preset;
  c.stream_timeout_ms = s.stream_timeout_ms;
  c.image_bytes = s.image_bytes;
  c.metrics_period_ms = s.metrics_period_ms;
  c.duration_ms = s.duration_ms;
  return c;
}

EdgeNode::EdgeNode(EdgeConfig config, const Scenario& scenario, EventLoop& loop, std::int64_t epoch_ms)
    : config_(std::move(config)),
      scenario_(scenario),
      loop_(loop),
      epoch_ms_(epoch_ms),
      source_(scenario_),
      encoder_(config_.preset),
      outbox_(config_.send_queue_capacity),
      sequencer_(config_.drone_id) {
  gate_.stream_timeout_ms = config_.stream_timeout_ms;
  gate_.stream_prefix = config_.drone_id;
}

void EdgeNode::start() {
  if (started_) return;
  started_ = true;
  loop_.schedule_at(loop_.now(), [this] { capture(0); });
  loop_.schedule_after(Millis(config_.metrics_period_ms), [this] { emit_metrics(); });
}

bool EdgeNode::awaiting_server() const {
  if (fatal_) return false;
  if (connected_ && !authenticated_) return true;
  return gate_.state == GateState::kAwaitingVerification;
}

bool EdgeNode::finished() const { return fatal_.has_value() || capture_done_; }

void EdgeNode::notify() {
  if (output_listener_) output_listener_();
}

void EdgeNode::push_control(Payload payload) {
  outbox_.push_control(make_envelope(std::move(payload)));
  notify();
}

std::optional<OutgoingMessage> EdgeNode::pop_outgoing() {
  auto env = outbox_.pop();
  if (!env) return std::nullopt;
  OutgoingMessage out;
  out.envelope = sequencer_.stamp(std::move(*env), now_ms());
  out.wire = encode_envelope(out.envelope);
  if (observer_) observer_->on_message(out.envelope);
  return out;
}

void EdgeNode::on_connected() {
  connected_ = true;
  authenticated_ = false;
  ++link_epoch_;
  ++stats_.connections;
  sequencer_.reset();
  outbox_.clear();
  push_control(Hello{Role::kEdge, config_.token, std::nullopt});
}

void EdgeNode::on_disconnected() {
  connected_ = false;
  authenticated_ = false;
  ++link_epoch_;
  outbox_.clear();
  detect_queue_.clear();
  pending_upload_ts_.reset();
  gate_.state = GateState::kIdle;
  gate_.active_stream_id.reset();
}

void EdgeNode::on_message(const Envelope& env) {
  if (const auto* ack = std::get_if<HelloAck>(&env.payload)) {
    if (ack->accepted) {
      authenticated_ = true;
    } else {
      fatal_ = "server rejected credentials for " + config_.drone_id + ": " + ack->reason;
      authenticated_ = false;
    }
    return;
  }
  if (const auto* vr = std::get_if<VerifyResult>(&env.payload)) {
    // Only the answer to the outstanding upload moves the gate.
    if (!pending_upload_ts_ || vr->capture_ts_ms != *pending_upload_ts_) return;
    pending_upload_ts_.reset();
    if (vr->verified) {
      ++stats_.verified;
    } else {
      ++stats_.rejected;
    }
    apply(vr->verified ? GateEvent::kVerifyPositive : GateEvent::kVerifyNegative, nullptr, nullptr);
    return;
  }
  if (std::holds_alternative<Analysis>(env.payload)) {
    ++stats_.analyses;
  }
}

void EdgeNode::capture(std::uint64_t index) {
  if (fatal_) return;
  Frame frame = source_.frame_at(index);
  if (config_.duration_ms > 0 && frame.capture_offset_ms >= config_.duration_ms) {
    capture_done_ = true;
    return;
  }
  ++stats_.frames_captured;
  if (observer_) observer_->on_capture(frame);

  if (gate_.state == GateState::kStreaming && now_ms() - gate_.last_verified_ts_ms > gate_.stream_timeout_ms)
    apply(GateEvent::kTimeout, nullptr, nullptr);

  if (!authenticated_) {
    ++stats_.frames_offline;
  } else {
    if (gate_.state == GateState::kStreaming) offer_encoder(frame);
    enqueue_detection(std::move(frame));
  }
  loop_.schedule_at(Millis(static_cast<std::int64_t>(index + 1) * source_.frame_period_ms()),
                    [this, index] { capture(index + 1); });
}

void EdgeNode::emit_metrics() {
  if (fatal_ || capture_done_) return;
  if (authenticated_) push_control(metrics());
  loop_.schedule_after(Millis(config_.metrics_period_ms), [this] { emit_metrics(); });
}

MetricsSnapshot EdgeNode::metrics() const {
  const auto& prof = encoder_.profile();
  const bool streaming = gate_.state == GateState::kStreaming;
  MetricsSnapshot m;
  m.values = {
      {"frames_captured", static_cast<double>(stats_.frames_captured)},
      {"frames_detected", static_cast<double>(stats_.frames_detected)},
      {"detect_queue_drops", static_cast<double>(stats_.detect_queue_drops)},
      {"uploads", static_cast<double>(stats_.uploads)},
      {"frames_encoded", static_cast<double>(stats_.frames_encoded)},
      {"frames_skipped", static_cast<double>(stats_.frames_skipped)},
      {"send_queue_drops", static_cast<double>(outbox_.dropped())},
      {"gate_state", static_cast<double>(static_cast<int>(gate_.state))},
      {"encoder_fps", prof.achievable_fps},
      {"encoder_bitrate_bps", prof.output_bitrate_bps},
      // Encoding saturates the CPU while a stream is live; modelled, not burned.
      {"cpu_fraction", streaming ? prof.cpu_fraction : 0.0},
  };
  return m;
}

void EdgeNode::enqueue_detection(Frame frame) {
  if (detect_queue_.size() >= config_.detect_queue_capacity) {
    ++stats_.detect_queue_drops;
    if (observer_) observer_->on_drop("detect_queue", detect_queue_.front().id);
    detect_queue_.pop_front();
  }
  detect_queue_.push_back(std::move(frame));
  start_detection();
}

void EdgeNode::start_detection() {
  if (detector_busy_ || detect_queue_.empty()) return;
  detector_busy_ = true;
  Frame frame = std::move(detect_queue_.front());
  detect_queue_.pop_front();
  auto out = detect(frame, config_.detector);
  const auto delay = from_ms(out.latency_ms);
  const auto epoch = link_epoch_;
  loop_.schedule_after(delay, [this, frame = std::move(frame), out = std::move(out), epoch] {
    detector_busy_ = false;
    detection_done(frame, out, epoch);
    start_detection();
  });
}

void EdgeNode::detection_done(const Frame& frame, const DetectorOutput& out, std::uint64_t epoch) {
  if (fatal_ || epoch != link_epoch_ || !authenticated_) return;
  ++stats_.frames_detected;
  if (observer_) observer_->on_detect_done(frame, out);
  apply(out.empty() ? GateEvent::kDetectionsEmpty : GateEvent::kDetectionsFound, &frame, &out);
}

void EdgeNode::offer_encoder(const Frame& frame) {
  const auto& stream_id = *gate_.active_stream_id;
  auto result = encoder_.encode_frame(frame, now_ms(), stream_id, stream_frame_seq_ + 1,
                                      epoch_ms_ + frame.capture_offset_ms);
  if (observer_) observer_->on_encode(frame, result.frame.has_value());
  if (!result.frame) {
    ++stats_.frames_skipped;
    return;
  }
  ++stream_frame_seq_;
  ++stats_.frames_encoded;
  const auto epoch = link_epoch_;
  loop_.schedule_after(from_ms(result.encode_time_ms),
                       [this, f = std::move(*result.frame), epoch]() mutable { encode_done(std::move(f), epoch); });
}

void EdgeNode::encode_done(VideoFrame frame, std::uint64_t epoch) {
  // Frames finishing after their stream closed must not leave the node.
  if (epoch != link_epoch_ || gate_.state != GateState::kStreaming || gate_.active_stream_id != frame.stream_id) {
    ++stats_.frames_stale;
    if (observer_) observer_->on_drop("stale_frame", frame.frame_seq);
    return;
  }
  ++stats_.frames_queued;
  if (outbox_.push_frame(make_envelope(std::move(frame)))) {
    if (observer_) observer_->on_drop("send_queue", 0);
  }
  notify();
}

void EdgeNode::apply(GateEvent event, const Frame* frame, const DetectorOutput* out) {
  const auto from = gate_.state;
  const auto closing_stream = gate_.active_stream_id;
  auto step = step_gate(gate_, event, now_ms());
  gate_ = std::move(step.gate);
  if (observer_ && (from != gate_.state || !step.actions.empty())) observer_->on_gate(from, event, gate_.state);

  for (auto action : step.actions) {
    switch (action) {
      case GateAction::kSendImageUpload: {
        ImageUpload up;
        const auto id = frame ? frame->id : 0;
        up.image_data = synthetic_bytes(mix_seed({config_.detector.seed, id, 0x1A6Eull}), config_.image_bytes);
        if (out) up.detections = out->observations();
        up.capture_ts_ms = epoch_ms_ + (frame ? frame->capture_offset_ms : 0);
        pending_upload_ts_ = up.capture_ts_ms;
        ++stats_.uploads;
        push_control(std::move(up));
        break;
      }
      case GateAction::kSendStreamStart:
        ++stats_.streams_started;
        stream_frame_seq_ = 0;
        push_control(StreamStart{*gate_.active_stream_id});
        break;
      case GateAction::kBeginFrameEmission:
        break;
      case GateAction::kSendStreamStop: {
        const auto& sid = *closing_stream;
        outbox_.drop_frames_if([&](const Envelope& e) {
          const auto* f = std::get_if<VideoFrame>(&e.payload);
          return f && f->stream_id == sid;
        });
        push_control(StreamStop{sid});
        break;
      }
    }
  }
}

}  // namespace uavlink::edge
