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
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "uavlink/core/outbound_queue.hpp"
#include "uavlink/core/time.hpp"
#include "uavlink/protocol/codec.hpp"
#include "uavlink/server/analysis.hpp"
#include "uavlink/server/object_store.hpp"
#include "uavlink/server/store.hpp"

namespace uavlink::server {

/// Which WebSocket path a connection arrived on.
enum class Endpoint { kEdge, kConsumer, kDashboard };
std::string_view to_string(Endpoint e);
std::optional<Endpoint> endpoint_for_path(std::string_view path);

using ConnId = std::uint64_t;

struct ServerConfig {
  std::string server_id = "server";
  /// Per-consumer cap on queued video frames; older frames are evicted.
  std::size_t consumer_frame_capacity = 8;
};

/// A stamped message ready for the transport. `envelope` is shared between
/// every connection the message went to and carries the payload only.
struct ServerOutgoing {
  protocol::MsgType type;
  std::uint64_t seq;
  std::int64_t timestamp_ms;
  std::shared_ptr<const protocol::Envelope> envelope;
  std::string wire;
};

/// Tracing hooks; all run on the thread driving the core.
class ServerObserver {
 public:
  virtual ~ServerObserver() = default;
  virtual void on_received(ConnId, const protocol::Envelope&) {}
  virtual void on_decode_error(ConnId, const protocol::DecodeError&) {}
  virtual void on_upload(const std::string& /*drone_id*/, std::int64_t /*capture_ts_ms*/, bool /*verified*/,
                         const UploadBatch&) {}
  virtual void on_analysis_done(const std::string& /*drone_id*/, std::int64_t /*capture_ts_ms*/,
                                Id /*detection_id*/) {}
  virtual void on_fanout(const std::string& /*stream_id*/, std::uint64_t /*frame_seq*/, std::size_t /*delivered*/,
                         std::size_t /*consumers*/) {}
};

struct ServerStats {
  std::uint64_t uploads = 0;
  std::uint64_t verified = 0;
  std::uint64_t unverified = 0;
  std::uint64_t invalid_uploads = 0;
  std::uint64_t analyses_done = 0;
  std::uint64_t analysis_failures = 0;
  std::uint64_t frames_relayed = 0;
  std::uint64_t consumer_frame_drops = 0;
  std::uint64_t decode_errors = 0;
  std::uint64_t seq_regressions = 0;
  std::uint64_t protocol_violations = 0;
  std::uint64_t rejected_handshakes = 0;
};

/// Server logic without I/O. A transport opens connections, feeds received
/// text messages in, pops stamped output and closes connections when asked.
/// Not thread-safe: one thread (or strand) drives every call.
class ServerCore {
 public:
  ServerCore(ServerConfig config, Store& store, ObjectStore& objects, AnalysisDispatcher& analysis,
             const Clock& clock);
  ~ServerCore();
  ServerCore(const ServerCore&) = delete;
  ServerCore& operator=(const ServerCore&) = delete;

  ConnId open(Endpoint endpoint);
  void receive(ConnId conn, std::string_view wire);
  /// Transport-level close, whoever initiated it.
  void close(ConnId conn);

  std::optional<ServerOutgoing> pop_outgoing(ConnId conn);
  bool has_outgoing(ConnId conn) const;
  /// The server wants this connection closed once its queue is flushed.
  bool wants_close(ConnId conn) const;
  bool is_open(ConnId conn) const { return conns_.count(conn) != 0; }

  /// Called with a connection id whenever its queue gains a message or it
  /// should be closed.
  void set_output_listener(std::function<void(ConnId)> fn) { listener_ = std::move(fn); }
  void set_observer(ServerObserver* observer) { observer_ = observer; }

  /// Queues a stream message for every consumer and returns how many accepted
  /// it without evicting an older frame.
  std::size_t fanout_stream(const std::string& drone_id, protocol::Payload payload);

  /// Refuses new work. Once no analysis is outstanding every connection is
  /// asked to close after its queue is flushed.
  void begin_shutdown();
  bool shutting_down() const { return shutting_down_; }
  std::size_t analyses_pending() const { return analyses_pending_; }

  /// JSON document served at GET /status.
  std::string status_json();
  const ServerStats& stats() const { return stats_; }
  std::size_t connection_count(Endpoint e) const;
  std::optional<std::string> active_stream(const std::string& drone_id) const;

 private:
  struct Queued {
    std::shared_ptr<const protocol::Envelope> envelope;
    std::shared_ptr<const std::string> payload_json;
  };
  struct Conn {
    Endpoint endpoint;
    bool authenticated = false;
    bool close_after_flush = false;
    std::string principal;
    std::optional<Id> mission_filter;
    std::set<Id> missions;
    OutboundQueue<Queued> queue;
    protocol::Sequencer sequencer;
    protocol::SeqTracker inbound;
  };

  static Queued prepare(protocol::Payload payload);
  void send(ConnId id, Conn& c, Queued q, bool frame = false);
  void send(ConnId id, protocol::Payload payload);
  void reject(ConnId id, Conn& c, const std::string& reason);
  void notify(ConnId id);
  void close_all();

  void on_hello(ConnId id, Conn& c, const protocol::Envelope& env, const protocol::Hello& h);
  void on_edge_message(ConnId id, Conn& c, const protocol::Envelope& env);
  void on_dashboard_message(ConnId id, Conn& c, const protocol::Envelope& env);
  void on_image_upload(ConnId id, Conn& c, const protocol::ImageUpload& up);
  void on_stream_message(Conn& c, const protocol::Envelope& env);
  void on_alert_ack(ConnId id, Conn& c, const protocol::AlertAck& ack);
  void on_rule_update(ConnId id, Conn& c, const protocol::RuleUpdate& ru);
  void finish_analysis(const std::string& drone_id, Id mission_id, std::int64_t capture_ts_ms, Id detection_id,
                       std::vector<Id> alert_ids, AnalysisOutcome outcome);

  void to_dashboards(Id mission_id, const Queued& q);
  void to_consumers(std::optional<Id> mission_id, const Queued& q);
  std::optional<Id> drone_mission(const std::string& drone_id) const;

  ServerConfig config_;
  Store& store_;
  ObjectStore& objects_;
  AnalysisDispatcher& analysis_;
  const Clock& clock_;
  std::int64_t started_ms_;
  ServerObserver* observer_ = nullptr;
  std::function<void(ConnId)> listener_;

  ConnId next_id_ = 1;
  std::map<ConnId, Conn> conns_;
  std::map<std::string, ConnId> edges_;
  std::map<std::string, Id> edge_missions_;
  std::map<std::string, std::string> streams_;
  std::map<std::string, protocol::MetricsSnapshot> metrics_;
  std::size_t analyses_pending_ = 0;
  bool shutting_down_ = false;
  /// Guards callbacks from the dispatcher that outlive the core.
  std::shared_ptr<bool> alive_ = std::make_shared<bool>(true);
  ServerStats stats_;
};

}  // namespace uavlink::server
