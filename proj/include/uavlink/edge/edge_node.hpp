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
#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "uavlink/core/event_loop.hpp"
#include "uavlink/core/outbound_queue.hpp"
#include "uavlink/edge/detector.hpp"
#include "uavlink/edge/encoder.hpp"
#include "uavlink/edge/frame_source.hpp"
#include "uavlink/edge/stream_gate.hpp"
#include "uavlink/protocol/codec.hpp"
#include "uavlink/scenario/scenario.hpp"

namespace uavlink::edge {

struct EdgeConfig {
  std::string drone_id = "drone-1";
  std::string token;
  DetectorModel detector;
  EncoderPreset preset = EncoderPreset::kUltrafast;
  std::int64_t stream_timeout_ms = 10'000;
  std::size_t image_bytes = 375'000;
  std::int64_t metrics_period_ms = 1'000;
  std::size_t detect_queue_capacity = 4;
  std::size_t send_queue_capacity = 4;
  /// Capture stops after this offset; 0 runs until the loop is abandoned.
  std::int64_t duration_ms = 0;

  static EdgeConfig from_scenario(const Scenario& s);
};

/// Hooks for tracing; every callback runs on the event-loop thread.
class EdgeObserver {
 public:
  virtual ~EdgeObserver() = default;
  virtual void on_capture(const Frame&) {}
  virtual void on_detect_done(const Frame&, const DetectorOutput&) {}
  virtual void on_gate(GateState /*from*/, GateEvent, GateState /*to*/) {}
  virtual void on_encode(const Frame&, bool /*admitted*/) {}
  virtual void on_drop(std::string_view /*stage*/, std::uint64_t /*frame_id*/) {}
  virtual void on_message(const protocol::Envelope&) {}
};

struct EdgeStats {
  std::uint64_t frames_captured = 0;
  std::uint64_t frames_offline = 0;
  std::uint64_t frames_detected = 0;
  std::uint64_t detect_queue_drops = 0;
  std::uint64_t uploads = 0;
  std::uint64_t verified = 0;
  std::uint64_t rejected = 0;
  std::uint64_t streams_started = 0;
  std::uint64_t frames_encoded = 0;
  std::uint64_t frames_skipped = 0;
  std::uint64_t frames_queued = 0;
  std::uint64_t frames_stale = 0;
  std::uint64_t analyses = 0;
  std::uint64_t connections = 0;
};

/// A message popped from the outbox, stamped for the current connection.
struct OutgoingMessage {
  protocol::Envelope envelope;
  std::string wire;
};

/// Drone-side pipeline: capture -> detect -> gate -> encode -> send.
///
/// Stages are modelled as discrete events on an EventLoop so the same code
/// runs under the simulated clock and against wall time. Detection has a
/// bounded drop-oldest queue; the send queue caps frames with drop-oldest and
/// never drops control messages. The gate is owned by this object alone.
class EdgeNode {
 public:
  EdgeNode(EdgeConfig config, const Scenario& scenario, EventLoop& loop, std::int64_t epoch_ms);

  /// Schedules the capture and metrics timers.
  void start();

  void set_observer(EdgeObserver* observer) { observer_ = observer; }
  /// Invoked whenever a message becomes available in the outbox.
  void set_output_listener(std::function<void()> fn) { output_listener_ = std::move(fn); }

  std::optional<OutgoingMessage> pop_outgoing();
  bool has_outgoing() const { return !outbox_.empty(); }
  std::size_t outbox_size() const { return outbox_.size(); }

  void on_connected();
  void on_message(const protocol::Envelope& env);
  void on_disconnected();

  bool connected() const { return connected_; }
  bool authenticated() const { return authenticated_; }
  /// Set after the server refuses the handshake; the node stops working.
  const std::optional<std::string>& fatal_error() const { return fatal_; }
  /// True while progress depends on a server reply (handshake or verification).
  bool awaiting_server() const;
  bool finished() const;

  const StreamGate& gate() const { return gate_; }
  const EdgeStats& stats() const { return stats_; }
  const EdgeConfig& config() const { return config_; }
  const Encoder& encoder() const { return encoder_; }
  std::uint64_t send_queue_drops() const { return outbox_.dropped(); }
  protocol::MetricsSnapshot metrics() const;
  std::int64_t now_ms() const { return epoch_ms_ + to_ms(loop_.now()); }

 private:
  void capture(std::uint64_t index);
  void emit_metrics();
  void enqueue_detection(Frame frame);
  void start_detection();
  void detection_done(const Frame& frame, const DetectorOutput& out, std::uint64_t epoch);
  void offer_encoder(const Frame& frame);
  void encode_done(protocol::VideoFrame frame, std::uint64_t epoch);
  void apply(GateEvent event, const Frame* frame, const DetectorOutput* out);
  void push_control(protocol::Payload payload);
  void notify();

  EdgeConfig config_;
  const Scenario& scenario_;
  EventLoop& loop_;
  std::int64_t epoch_ms_;
  FrameSource source_;
  Encoder encoder_;
  StreamGate gate_;
  EdgeObserver* observer_ = nullptr;
  std::function<void()> output_listener_;

  OutboundQueue<protocol::Envelope> outbox_;
  protocol::Sequencer sequencer_;

  std::deque<Frame> detect_queue_;
  bool detector_busy_ = false;
  std::uint64_t stream_frame_seq_ = 0;
  std::optional<std::int64_t> pending_upload_ts_;

  bool started_ = false;
  bool connected_ = false;
  bool authenticated_ = false;
  bool capture_done_ = false;
  /// Bumped on every (re)connect so results from a previous link are ignored.
  std::uint64_t link_epoch_ = 0;
  std::optional<std::string> fatal_;
  EdgeStats stats_;
};

}  // namespace uavlink::edge
