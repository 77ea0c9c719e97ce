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

#include "uavlink/sim/world.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <fstream>
#include <map>
#include <memory>
#include <random>
#include <set>

#include "uavlink/core/backoff.hpp"
#include "uavlink/core/event_loop.hpp"
#include "uavlink/core/random.hpp"
#include "uavlink/server/analysis.hpp"
#include "uavlink/server/auth.hpp"
#include "uavlink/server/object_store.hpp"
#include "uavlink/server/sqlite_store.hpp"
#include "uavlink/sim/link.hpp"

namespace uavlink::sim {

namespace {

using protocol::Envelope;
using protocol::MsgType;
using protocol::Payload;
using server::ConnId;
using server::Endpoint;

constexpr const char* kOperatorToken = "operator-token";

/// Trace fields describing one message.
TraceLog::Fields describe(MsgType type, std::uint64_t seq, std::int64_t ts, const Payload& p) {
  TraceLog::Fields f{kv("type", protocol::to_string(type)), kv("seq", seq), kv("ts", ts)};
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, protocol::Hello>) {
          f.push_back(kv("role", protocol::to_string(m.role)));
        } else if constexpr (std::is_same_v<T, protocol::HelloAck>) {
          f.push_back(kv("accepted", m.accepted));
        } else if constexpr (std::is_same_v<T, protocol::ImageUpload>) {
          f.push_back(kv("capture_ts", m.capture_ts_ms));
          f.push_back(kv("detections", static_cast<std::uint64_t>(m.detections.size())));
        } else if constexpr (std::is_same_v<T, protocol::VerifyResult>) {
          f.push_back(kv("verified", m.verified));
          f.push_back(kv("capture_ts", m.capture_ts_ms));
          if (m.matched_rule_id) f.push_back(kv("rule", *m.matched_rule_id));
          if (m.alert_id) f.push_back(kv("alert", *m.alert_id));
          if (m.error) f.push_back(kv("error", *m.error));
        } else if constexpr (std::is_same_v<T, protocol::Analysis>) {
          f.push_back(kv("detection", m.detection_id));
        } else if constexpr (std::is_same_v<T, protocol::StreamStart> || std::is_same_v<T, protocol::StreamStop>) {
          f.push_back(kv("stream", m.stream_id));
        } else if constexpr (std::is_same_v<T, protocol::VideoFrame>) {
          f.push_back(kv("stream", m.stream_id));
          f.push_back(kv("fseq", m.frame_seq));
          f.push_back(kv("capture_ts", m.capture_ts_ms));
          f.push_back(kv("encode_ts", m.encode_ts_ms));
        } else if constexpr (std::is_same_v<T, protocol::AlertEvent>) {
          f.push_back(kv("alert", m.alert.alert_id));
          f.push_back(kv("status", to_string(m.alert.status)));
          if (m.error) f.push_back(kv("error", *m.error));
        } else if constexpr (std::is_same_v<T, protocol::AlertAck>) {
          f.push_back(kv("alert", m.alert_id));
          f.push_back(kv("action", to_string(m.action)));
        } else if constexpr (std::is_same_v<T, protocol::RuleUpdate>) {
          f.push_back(kv("rule", m.rule.rule_id));
          if (m.error) f.push_back(kv("error", *m.error));
        }
      },
      p);
  return f;
}

int status_rank(AlertStatus s) { return static_cast<int>(s); }

class World final : public edge::EdgeObserver, public server::ServerObserver {
 public:
  World(const Scenario& s, const RunOptions& options);
  RunResult run();

  void on_capture(const edge::Frame& f) override;
  void on_detect_done(const edge::Frame& f, const edge::DetectorOutput& out) override;
  void on_gate(edge::GateState from, edge::GateEvent event, edge::GateState to) override;
  void on_encode(const edge::Frame& f, bool admitted) override;
  void on_drop(std::string_view stage, std::uint64_t frame_id) override;

  void on_upload(const std::string& drone_id, std::int64_t capture_ts_ms, bool verified,
                 const server::UploadBatch& batch) override;
  void on_analysis_done(const std::string& drone_id, std::int64_t capture_ts_ms, Id detection_id) override;
  void on_fanout(const std::string& stream_id, std::uint64_t frame_seq, std::size_t delivered,
                 std::size_t consumers) override;

 private:
  enum class Role { kEdge, kConsumer, kOperator };

  struct Peer {
    std::string name;
    Role role;
    Endpoint endpoint;
    LinkName network;
    std::unique_ptr<SimLink> up;
    std::unique_ptr<SimLink> down;
    std::optional<ConnId> conn;
    bool cut = false;
    bool retired = false;
    Backoff backoff;
    protocol::Sequencer sequencer;
    std::deque<Payload> outbox;
    std::unique_ptr<consumer::ConsumerState> state;
    std::optional<SimTime> stream_opened;
  };

  void provision();
  Peer& add_peer(std::string name, Role role, Endpoint endpoint, LinkName network);
  std::optional<Packet> pull_client(Peer& p);
  std::optional<Packet> pull_server(Peer& p);
  void deliver_to_client(Peer& p, Packet packet);
  void push_client(Peer& p, Payload payload);
  void connect(Peer& p);
  void disconnect(Peer& p, std::string_view reason, bool reconnect = true);
  void schedule_reconnect(Peer& p);
  void check_close(Peer& p);
  void apply_event(const NetworkEvent& ev);
  void on_operator_message(Peer& p, const Envelope& env);
  void close_edge_stream();
  bool quiet() const;
  std::int64_t now_ms() const { return kSimEpochMs + to_ms(loop_.now()); }
  DetectionLatency& latency(std::int64_t capture_ts_ms);

  const Scenario& s_;
  RunOptions options_;
  EventLoop loop_;
  TraceLog trace_;
  LoopClock clock_{loop_, kSimEpochMs};
  server::SqliteStore store_{":memory:"};
  server::MemoryObjectStore objects_;
  server::MockProvider provider_;
  server::LoopDispatcher dispatcher_{loop_, provider_};
  server::ServerCore core_;
  edge::EdgeNode edge_;
  std::vector<std::unique_ptr<Peer>> peers_;
  std::map<ConnId, Peer*> by_conn_;
  Id mission_ = 0;
  bool ended_ = false;
  std::size_t operator_pending_ = 0;
  std::set<Id> acked_, resolved_;

  std::map<std::int64_t, DetectionLatency> latencies_;
  std::map<Id, std::int64_t> detection_capture_;
  Peer* delivery_peer_ = nullptr;

  std::optional<SimTime> edge_stream_opened_;
  std::uint64_t streams_ = 0;
  SimTime stream_time_{0};
  SimTime consumer_stream_time_{0};
  std::map<std::string, std::uint64_t> uplink_by_phase_, uplink_by_type_;
  std::uint64_t downlink_bytes_ = 0;
  std::uint64_t fanouts_ = 0;
  std::uint64_t fanout_full_ = 0;
  std::uint64_t decode_errors_ = 0;
};

World::World(const Scenario& s, const RunOptions& options)
    : s_(s),
      options_(options),
      provider_(s.provider_latency_ms),
      core_(server::ServerConfig{}, store_, objects_, dispatcher_, clock_),
      edge_(edge::EdgeConfig::from_scenario(s), s, loop_, kSimEpochMs) {
  core_.set_observer(this);
  core_.set_output_listener([this](ConnId id) {
    auto it = by_conn_.find(id);
    if (it == by_conn_.end()) return;
    Peer* p = it->second;
    p->down->kick();
    loop_.schedule_after(Micros(0), [this, p] { check_close(*p); });
  });
  edge_.set_observer(this);
  edge_.set_output_listener([this] { peers_.front()->up->kick(); });

  add_peer(s.drone_id, Role::kEdge, Endpoint::kEdge, LinkName::kUplink);
  for (int i = 0; i < s.consumers; ++i)
    add_peer("consumer-" + std::to_string(i), Role::kConsumer, Endpoint::kConsumer, LinkName::kDownlink);
  if (s.operator_sim) add_peer("operator", Role::kOperator, Endpoint::kDashboard, LinkName::kDownlink);
  delivery_peer_ = s.consumers > 0 ? peers_[1].get() : peers_[0].get();
}

World::Peer& World::add_peer(std::string name, Role role, Endpoint endpoint, LinkName network) {
  auto p = std::make_unique<Peer>();
  p->name = name;
  p->role = role;
  p->endpoint = endpoint;
  p->network = network;
  p->sequencer = protocol::Sequencer(name);
  const auto& params = network == LinkName::kUplink ? s_.uplink : s_.downlink;
  const auto index = static_cast<std::uint64_t>(peers_.size());
  p->up = std::make_unique<SimLink>("up:" + name, loop_, trace_, params, mix_seed({s_.seed, index, 0x55}));
  p->down = std::make_unique<SimLink>("down:" + name, loop_, trace_, params, mix_seed({s_.seed, index, 0xD0}));
  if (role == Role::kConsumer)
    p->state = std::make_unique<consumer::ConsumerState>(static_cast<std::int64_t>(s_.display_delay_ms));
  Peer* raw = p.get();
  p->up->set_source([this, raw] { return pull_client(*raw); });
  p->up->set_sink([this, raw](Packet packet) {
    if (raw->conn) core_.receive(*raw->conn, packet.wire);
  });
  p->down->set_source([this, raw] { return pull_server(*raw); });
  p->down->set_sink([this, raw](Packet packet) { deliver_to_client(*raw, std::move(packet)); });
  peers_.push_back(std::move(p));
  return *raw;
}

void World::provision() {
  store_.put_drone(Drone{s_.drone_id, s_.drone_token, "simulated", std::nullopt});
  mission_ = store_.put_mission(Mission{0, s_.name, {s_.drone_id}, {}, {}, MissionStatus::kActive});
  store_.put_user(User{"operator", "Simulated operator", server::sha256_hex(kOperatorToken), {mission_}});
  for (auto rule : s_.rules) {
    rule.rule_id = 0;
    rule.mission_id = mission_;
    rule = store_.upsert_rule(rule);
    std::string classes;
    for (const auto& c : rule.target_classes) classes += (classes.empty() ? "" : ",") + c;
    trace_.record(loop_.now(), "rule",
                  {kv("id", rule.rule_id), kv("mission", mission_), kv("classes", classes),
                   kv("min_confidence", rule.min_confidence), kv("severity", to_string(rule.severity))});
  }
}

std::optional<Packet> World::pull_client(Peer& p) {
  if (p.role == Role::kEdge) {
    const auto phase = std::string(to_string(edge_.gate().state));
    auto m = edge_.pop_outgoing();
    if (!m) return std::nullopt;
    uplink_by_phase_[phase] += m->wire.size();
    uplink_by_type_[std::string(protocol::to_string(m->envelope.msg_type))] += m->wire.size();
    auto fields = describe(m->envelope.msg_type, m->envelope.seq, m->envelope.timestamp_ms, m->envelope.payload);
    return Packet{std::move(m->wire), std::move(fields), m->envelope.seq};
  }
  if (p.outbox.empty()) return std::nullopt;
  auto env = p.sequencer.stamp(protocol::make_envelope(std::move(p.outbox.front())), now_ms());
  p.outbox.pop_front();
  auto fields = describe(env.msg_type, env.seq, env.timestamp_ms, env.payload);
  return Packet{protocol::encode_envelope(env), std::move(fields), env.seq};
}

std::optional<Packet> World::pull_server(Peer& p) {
  if (!p.conn) return std::nullopt;
  auto out = core_.pop_outgoing(*p.conn);
  if (!out) {
    loop_.schedule_after(Micros(0), [this, pp = &p] { check_close(*pp); });
    return std::nullopt;
  }
  if (p.role != Role::kEdge) downlink_bytes_ += out->wire.size();
  auto fields = describe(out->type, out->seq, out->timestamp_ms, out->envelope->payload);
  return Packet{std::move(out->wire), std::move(fields), out->seq};
}

void World::push_client(Peer& p, Payload payload) {
  p.outbox.push_back(std::move(payload));
  p.up->kick();
}

void World::deliver_to_client(Peer& p, Packet packet) {
  if (p.role == Role::kConsumer) {
    const auto analyses_before = p.state->analyses().size();
    p.state->on_message(packet.wire, now_ms());
    if (&p == delivery_peer_) {
      if (p.state->analyses().size() > analyses_before) {
        auto it = detection_capture_.find(p.state->analyses().back().detection_id);
        if (it != detection_capture_.end()) {
          auto& l = latency(it->second);
          if (!l.delivered) l.delivered = loop_.now();
        }
      }
      std::string type;
      std::string stream;
      for (const auto& [k, v] : packet.fields) {
        if (k == "type") type = v;
        if (k == "stream") stream = v;
      }
      if (type == "STREAM_START" && p.state->active_streams().count(stream)) {
        p.stream_opened = loop_.now();
      } else if (type == "STREAM_STOP" && p.stream_opened) {
        consumer_stream_time_ += loop_.now() - *p.stream_opened;
        p.stream_opened.reset();
      }
    }
  } else {
    auto decoded = protocol::decode_envelope(packet.wire);
    if (auto* err = std::get_if<protocol::DecodeError>(&decoded)) {
      ++decode_errors_;
      trace_.record(loop_.now(), "decode_error", {kv("peer", p.name), kv("detail", err->detail)});
    } else {
      auto& env = std::get<Envelope>(decoded);
      if (p.role == Role::kEdge) {
        if (const auto* vr = std::get_if<protocol::VerifyResult>(&env.payload)) {
          auto& l = latency(vr->capture_ts_ms);
          if (!l.verify_received) l.verify_received = loop_.now();
        }
        if (const auto* a = std::get_if<protocol::Analysis>(&env.payload); a && &p == delivery_peer_) {
          auto it = detection_capture_.find(a->detection_id);
          if (it != detection_capture_.end() && !latency(it->second).delivered)
            latency(it->second).delivered = loop_.now();
        }
        edge_.on_message(env);
        if (edge_.fatal_error()) {
          trace_.record(loop_.now(), "fatal", {kv("peer", p.name), kv("error", *edge_.fatal_error())});
          p.retired = true;
        }
      } else {
        on_operator_message(p, env);
      }
    }
  }
  loop_.schedule_after(Micros(0), [this, pp = &p] { check_close(*pp); });
}

void World::on_operator_message(Peer& p, const Envelope& env) {
  const auto* ev = std::get_if<protocol::AlertEvent>(&env.payload);
  if (!ev || ev->error) return;
  const auto id = ev->alert.alert_id;
  const auto& op = *s_.operator_sim;
  auto act = [this, &p, id](std::int64_t delay, AlertAction action) {
    ++operator_pending_;
    loop_.schedule_after(from_ms(static_cast<double>(delay)), [this, &p, id, action] {
      --operator_pending_;
      if (p.conn) push_client(p, protocol::AlertAck{id, action});
    });
  };
  if (ev->alert.status == AlertStatus::kOpen && acked_.insert(id).second)
    act(op.ack_after_ms, AlertAction::kAcknowledge);
  else if (ev->alert.status == AlertStatus::kAcknowledged && resolved_.insert(id).second)
    act(op.resolve_after_ms, AlertAction::kResolve);
}

void World::connect(Peer& p) {
  if (p.retired || ended_ || p.conn) return;
  if (p.cut) {
    schedule_reconnect(p);
    return;
  }
  const auto id = core_.open(p.endpoint);
  p.conn = id;
  by_conn_[id] = &p;
  trace_.record(loop_.now(), "connect", {kv("peer", p.name), kv("conn", static_cast<std::uint64_t>(id))});
  p.backoff.reset();
  p.up->up();
  p.down->up();
  switch (p.role) {
    case Role::kEdge:
      edge_.on_connected();
      break;
    case Role::kConsumer:
      p.state->on_reconnect();
      [[fallthrough]];
    case Role::kOperator:
      p.sequencer.reset();
      p.outbox.clear();
      push_client(p, protocol::Hello{p.role == Role::kConsumer ? protocol::Role::kConsumer : protocol::Role::kDashboard,
                                     p.role == Role::kOperator ? kOperatorToken : "", mission_});
      break;
  }
}

void World::disconnect(Peer& p, std::string_view reason, bool reconnect) {
  if (!p.conn) return;
  const auto id = *p.conn;
  const char* role = p.role == Role::kEdge ? "edge" : p.role == Role::kConsumer ? "consumer" : "operator";
  trace_.record(loop_.now(), "disconnect", {kv("peer", p.name), kv("role", role), kv("reason", reason)});
  p.up->down();
  p.down->down();
  p.conn.reset();
  by_conn_.erase(id);
  core_.close(id);
  p.outbox.clear();
  if (p.role == Role::kEdge) {
    close_edge_stream();
    edge_.on_disconnected();
  }
  if (p.stream_opened) {
    consumer_stream_time_ += loop_.now() - *p.stream_opened;
    p.stream_opened.reset();
  }
  if (reconnect) schedule_reconnect(p);
}

void World::schedule_reconnect(Peer& p) {
  if (p.retired || ended_) return;
  const auto delay = p.backoff.next();
  trace_.record(loop_.now(), "reconnect_wait", {kv("peer", p.name), kv("delay_ms", delay)});
  loop_.schedule_after(from_ms(static_cast<double>(delay)), [this, pp = &p] { connect(*pp); });
}

void World::check_close(Peer& p) {
  if (!p.conn) return;
  if (p.retired && p.down->idle()) {
    disconnect(p, "fatal", false);
    return;
  }
  if (core_.is_open(*p.conn) && core_.wants_close(*p.conn) && !core_.has_outgoing(*p.conn) && p.down->idle())
    disconnect(p, "server");
}

void World::apply_event(const NetworkEvent& ev) {
  for (auto& p : peers_) {
    if (p->network != ev.link) continue;
    auto params = p->up->params();
    if (ev.latency_ms) params.latency_ms = *ev.latency_ms;
    if (ev.bandwidth_bps) params.bandwidth_bps = *ev.bandwidth_bps;
    if (ev.jitter_ms) params.jitter_ms = *ev.jitter_ms;
    p->up->set_params(params);
    p->down->set_params(params);
    if (ev.disconnect_ms) {
      p->cut = true;
      disconnect(*p, "network");
      loop_.schedule_after(from_ms(static_cast<double>(*ev.disconnect_ms)), [pp = p.get()] { pp->cut = false; });
    }
  }
  TraceLog::Fields f{kv("name", to_string(ev.link))};
  if (ev.latency_ms) f.push_back(kv("latency_ms", *ev.latency_ms));
  if (ev.bandwidth_bps) f.push_back(kv("bandwidth_bps", *ev.bandwidth_bps));
  if (ev.jitter_ms) f.push_back(kv("jitter_ms", *ev.jitter_ms));
  if (ev.disconnect_ms) f.push_back(kv("disconnect_ms", *ev.disconnect_ms));
  trace_.record(loop_.now(), "link", std::move(f));
}

void World::close_edge_stream() {
  if (!edge_stream_opened_) return;
  stream_time_ += loop_.now() - *edge_stream_opened_;
  edge_stream_opened_.reset();
}

DetectionLatency& World::latency(std::int64_t capture_ts_ms) {
  auto& l = latencies_[capture_ts_ms];
  l.capture_ts_ms = capture_ts_ms;
  return l;
}

void World::on_capture(const edge::Frame& f) {
  trace_.record(loop_.now(), "capture", {kv("node", s_.drone_id), kv("frame", f.id)});
  latency(kSimEpochMs + f.capture_offset_ms).capture = loop_.now();
}

void World::on_detect_done(const edge::Frame& f, const edge::DetectorOutput& out) {
  std::uint64_t tp = 0;
  for (const auto& r : out.reports) tp += r.true_positive ? 1 : 0;
  trace_.record(loop_.now(), "detect",
                {kv("node", s_.drone_id), kv("frame", f.id),
                 kv("reports", static_cast<std::uint64_t>(out.reports.size())), kv("tp", tp)});
  auto it = latencies_.find(kSimEpochMs + f.capture_offset_ms);
  if (it != latencies_.end()) it->second.detect_done = loop_.now();
}

void World::on_gate(edge::GateState from, edge::GateEvent event, edge::GateState to) {
  trace_.record(loop_.now(), "gate",
                {kv("node", s_.drone_id), kv("from", to_string(from)), kv("event", to_string(event)),
                 kv("to", to_string(to))});
  if (to == edge::GateState::kStreaming && from != edge::GateState::kStreaming) {
    ++streams_;
    edge_stream_opened_ = loop_.now();
  } else if (from == edge::GateState::kStreaming && to != edge::GateState::kStreaming) {
    close_edge_stream();
  }
}

void World::on_encode(const edge::Frame& f, bool admitted) {
  trace_.record(loop_.now(), "encode", {kv("node", s_.drone_id), kv("frame", f.id), kv("admitted", admitted)});
}

void World::on_drop(std::string_view stage, std::uint64_t frame_id) {
  trace_.record(loop_.now(), "drop", {kv("node", s_.drone_id), kv("stage", stage), kv("frame", frame_id)});
}

void World::on_upload(const std::string& drone_id, std::int64_t capture_ts_ms, bool verified,
                      const server::UploadBatch& batch) {
  for (std::size_t i = 0; i < batch.detections.size(); ++i) {
    const auto& d = batch.detections[i];
    trace_.record(loop_.now(), "detection",
                  {kv("id", d.detection_id), kv("drone", drone_id), kv("mission", d.mission_id),
                   kv("class", d.object.class_label), kv("confidence", d.object.confidence),
                   kv("capture_ts", capture_ts_ms)});
    if (i < batch.alerts.size())
      for (const auto& a : batch.alerts[i])
        trace_.record(loop_.now(), "alert",
                      {kv("id", a.alert_id), kv("detection", a.detection_id.value_or(0)),
                       kv("rule", a.rule_id.value_or(0)), kv("severity", to_string(a.severity))});
  }
  trace_.record(loop_.now(), "verify", {kv("drone", drone_id), kv("capture_ts", capture_ts_ms), kv("verified", verified)});
  auto& l = latency(capture_ts_ms);
  if (!l.upload_received) l.upload_received = loop_.now();
  if (!l.verified) l.verified = loop_.now();
}

void World::on_analysis_done(const std::string& drone_id, std::int64_t capture_ts_ms, Id detection_id) {
  trace_.record(loop_.now(), "analysis",
                {kv("drone", drone_id), kv("detection", detection_id), kv("capture_ts", capture_ts_ms)});
  auto& l = latency(capture_ts_ms);
  l.detection_id = detection_id;
  if (!l.analysis_done) l.analysis_done = loop_.now();
  detection_capture_[detection_id] = capture_ts_ms;
}

void World::on_fanout(const std::string& stream_id, std::uint64_t frame_seq, std::size_t delivered,
                      std::size_t consumers) {
  ++fanouts_;
  if (delivered == consumers) ++fanout_full_;
  trace_.record(loop_.now(), "fanout",
                {kv("stream", stream_id), kv("fseq", frame_seq), kv("delivered", static_cast<std::uint64_t>(delivered)),
                 kv("consumers", static_cast<std::uint64_t>(consumers))});
}

bool World::quiet() const {
  if (core_.analyses_pending() > 0 || operator_pending_ > 0) return false;
  if (edge_.has_outgoing() || (edge_.connected() && edge_.awaiting_server())) return false;
  for (const auto& p : peers_)
    if (!p->up->idle() || !p->down->idle() || !p->outbox.empty() || (p->conn && core_.has_outgoing(*p->conn)))
      return false;
  return true;
}

RunResult World::run() {
  trace_.record(loop_.now(), "config",
                {kv("scenario", s_.name), kv("seed", s_.seed), kv("duration_ms", s_.duration_ms),
                 kv("frame_period_ms", s_.frame_period_ms), kv("encoder_fps", edge_.encoder().profile().achievable_fps),
                 kv("stream_timeout_ms", s_.stream_timeout_ms), kv("uplink_latency_ms", s_.uplink.latency_ms),
                 kv("uplink_bandwidth_bps", s_.uplink.bandwidth_bps), kv("uplink_jitter_ms", s_.uplink.jitter_ms),
                 kv("downlink_latency_ms", s_.downlink.latency_ms),
                 kv("downlink_bandwidth_bps", s_.downlink.bandwidth_bps),
                 kv("downlink_jitter_ms", s_.downlink.jitter_ms), kv("consumers", s_.consumers),
                 kv("provider_latency_ms", s_.provider_latency_ms)});
  provision();
  for (const auto& ev : s_.events)
    loop_.schedule_at(from_ms(static_cast<double>(ev.t_ms)), [this, ev] { apply_event(ev); });
  for (auto& p : peers_) connect(*p);
  edge_.start();

  loop_.run_until(from_ms(static_cast<double>(s_.duration_ms)));
  const auto limit = from_ms(static_cast<double>(s_.duration_ms + options_.settle_limit_ms));
  while (loop_.now() < limit && !quiet()) loop_.run_until(std::min(limit, loop_.now() + Micros(100'000)));
  ended_ = true;
  close_edge_stream();
  for (auto& p : peers_)
    if (p->stream_opened) {
      consumer_stream_time_ += loop_.now() - *p->stream_opened;
      p->stream_opened.reset();
    }

  RunResult result;
  for (auto& [ts, l] : latencies_) {
    if (!l.upload_received) continue;
    result.latencies.push_back(l);
    if (!l.complete()) continue;
    TraceLog::Fields f{kv("drone", s_.drone_id), kv("capture_ts", ts), kv("detection", l.detection_id.value_or(0)),
                       kv("capture", static_cast<std::int64_t>(l.capture->count())),
                       kv("detect", static_cast<std::int64_t>(l.detect_done->count())),
                       kv("upload", static_cast<std::int64_t>(l.upload_received->count()))};
    if (l.verified) f.push_back(kv("verify", static_cast<std::int64_t>(l.verified->count())));
    if (l.verify_received) f.push_back(kv("verify_ack", static_cast<std::int64_t>(l.verify_received->count())));
    f.push_back(kv("analysis", static_cast<std::int64_t>(l.analysis_done->count())));
    f.push_back(kv("delivered", static_cast<std::int64_t>(l.delivered->count())));
    trace_.record(loop_.now(), "latency", std::move(f));
  }

  auto& r = result.report;
  r.scenario = s_.name;
  r.seed = s_.seed;
  r.duration_s = to_seconds(loop_.now());
  fill_budget(r, result.latencies);
  r.reference_total_ms = s_.reference_total_ms;

  const auto& es = edge_.stats();
  r.streams = streams_;
  r.stream_seconds = to_seconds(stream_time_);
  r.frames_encoded = es.frames_encoded;
  if (r.stream_seconds > 0) {
    r.encoded_fps = static_cast<double>(es.frames_encoded) / r.stream_seconds;
    r.encoded_bitrate_bps =
        static_cast<double>(es.frames_encoded * edge_.encoder().profile().payload_bytes()) * 8.0 / r.stream_seconds;
  }
  std::vector<double> g2g, display;
  if (s_.consumers > 0) {
    const auto& c0 = *peers_[1]->state;
    result.displayed = c0.displayed();
    for (const auto& d : c0.displayed()) {
      g2g.push_back(static_cast<double>(d.received_ts_ms - d.capture_ts_ms));
      display.push_back(static_cast<double>(d.glass_to_glass_ms()));
    }
    r.frames_delivered = c0.displayed().size();
    const auto secs = to_seconds(consumer_stream_time_);
    if (secs > 0) r.delivered_fps = static_cast<double>(r.frames_delivered) / secs;
  }
  r.glass_to_glass_ms = summarize(g2g);
  r.display_latency_ms = summarize(display);
  r.uplink_bytes_by_phase = uplink_by_phase_;
  for (const char* phase : {"idle", "awaiting_verification", "streaming"}) r.uplink_bytes_by_phase.try_emplace(phase, 0);
  r.uplink_bytes_by_type = uplink_by_type_;
  r.downlink_bytes = downlink_bytes_;

  const auto& ss = core_.stats();
  result.store = store_.counts();
  std::uint64_t lost = 0, corrupt = 0, missed = 0, consumer_frames = 0;
  for (const auto& p : peers_) {
    lost += p->up->stats().lost + p->down->stats().lost;
    if (p->state) {
      corrupt += p->state->stats().corrupt_frames;
      missed += p->state->stats().frames_missed;
      consumer_frames += p->state->stats().frames;
    }
  }
  auto i64 = [](auto v) { return static_cast<std::int64_t>(v); };
  r.counts = {{"frames_captured", i64(es.frames_captured)},
              {"frames_detected", i64(es.frames_detected)},
              {"detect_queue_drops", i64(es.detect_queue_drops)},
              {"uploads", i64(es.uploads)},
              {"verified", i64(es.verified)},
              {"rejected", i64(es.rejected)},
              {"streams_started", i64(es.streams_started)},
              {"frames_encoded", i64(es.frames_encoded)},
              {"frames_skipped", i64(es.frames_skipped)},
              {"send_queue_drops", i64(edge_.send_queue_drops())},
              {"edge_connections", i64(es.connections)},
              {"server_frames_relayed", i64(ss.frames_relayed)},
              {"server_consumer_frame_drops", i64(ss.consumer_frame_drops)},
              {"server_analyses", i64(ss.analyses_done)},
              {"server_analysis_failures", i64(ss.analysis_failures)},
              {"server_invalid_uploads", i64(ss.invalid_uploads)},
              {"server_protocol_violations", i64(ss.protocol_violations)},
              {"consumer_frames", i64(consumer_frames)},
              {"consumer_frames_missed", i64(missed)},
              {"consumer_corrupt_frames", i64(corrupt)},
              {"fanouts", i64(fanouts_)},
              {"fanouts_complete", i64(fanout_full_)},
              {"messages_lost", i64(lost)},
              {"decode_errors", i64(decode_errors_ + ss.decode_errors)},
              {"store_detections", result.store.detections},
              {"store_alerts", result.store.alerts}};

  result.integrity = store_.check_integrity();
  r.integrity_ok = result.integrity.ok();
  for (const auto& rec : store_.alerts_for_mission(mission_)) {
    auto prev = AlertStatus::kOpen;
    for (const auto& t : store_.alert_history(rec.alert.alert_id)) {
      if (t.from != prev || status_rank(t.to) <= status_rank(t.from)) r.history_monotone = false;
      prev = t.to;
    }
    if (prev != rec.alert.status) r.history_monotone = false;
  }

  r.invariants = check_trace(trace_);
  result.edge = es;
  result.server = ss;
  result.edge_error = edge_.fatal_error();
  result.trace = std::move(trace_);
  return result;
}

}  // namespace

bool RunResult::passed() const {
  return std::all_of(report.invariants.begin(), report.invariants.end(), [](const auto& i) { return i.passed; }) &&
         report.integrity_ok && report.history_monotone;
}

RunResult run_scenario(const Scenario& scenario, const RunOptions& options) {
  validate_scenario(scenario);
  World world(scenario, options);
  return world.run();
}

void write_run_outputs(const RunResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  result.trace.write_file(dir / "trace.log");
  std::ofstream(dir / "report.json") << to_json(result.report) << '\n';
  std::ofstream text(dir / "report.txt");
  write_text(text, result.report);
  std::ofstream lat(dir / "latency.tsv");
  write_latency_log(lat, result.latencies);
  std::ofstream disp(dir / "display.tsv");
  consumer::write_display_log(disp, result.displayed);
}

Scenario random_scenario(std::uint64_t seed) {
  std::mt19937_64 rng(mix_seed({seed, 0x5CE7}));
  auto uni = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  static const char* kClasses[] = {"person", "car", "truck", "boat"};

  Scenario s;
  s.name = "random-" + std::to_string(seed);
  s.seed = seed;
  s.duration_ms = pick(30, 80) * 1'000;
  s.frame_period_ms = std::array{200, 250, 500, 1000}[pick(0, 3)];
  s.detector.latency_min_ms = uni(50, 300);
  s.detector.latency_max_ms = s.detector.latency_min_ms + uni(0, 200);
  s.detector.precision = uni(0.5, 1.0);
  s.detector.recall = uni(0.5, 1.0);
  s.detector.fp_classes = {kClasses[pick(0, 3)]};
  s.preset = pick(0, 4) == 0 ? EncoderPreset::kMedium : EncoderPreset::kUltrafast;
  s.stream_timeout_ms = pick(3, 10) * 1'000;
  s.image_bytes = static_cast<std::size_t>(pick(20, 200)) * 1'000;
  auto link = [&] {
    LinkParams p;
    p.latency_ms = uni(0, 300);
    p.bandwidth_bps = std::array{0.0, 2e6, 5e6, 20e6}[pick(0, 3)];
    p.jitter_ms = pick(0, 1) ? uni(0, 50) : 0.0;
    return p;
  };
  s.uplink = link();
  s.downlink = link();
  s.provider_latency_ms = uni(100, 3'000);
  s.consumers = pick(0, 3);
  s.display_delay_ms = pick(0, 1) ? uni(0, 100) : 0.0;
  if (pick(0, 1)) s.operator_sim = OperatorParams{pick(100, 2'000), pick(200, 5'000)};

  const int rules = pick(1, 3);
  for (int i = 0; i < rules; ++i) {
    Rule r;
    r.target_classes.insert(kClasses[pick(0, 3)]);
    if (pick(0, 1)) r.target_classes.insert(kClasses[pick(0, 3)]);
    r.min_confidence = uni(0.2, 0.8);
    r.severity = static_cast<Severity>(pick(0, 2));
    r.prompt_template = "Describe the {class} ({confidence}).";
    r.enabled = pick(0, 5) != 0;
    s.rules.push_back(r);
  }
  const int objects = pick(2, 8);
  for (int i = 0; i < objects; ++i) {
    ScriptedObject o;
    o.t_ms = pick(0, static_cast<int>(s.duration_ms) - 1'000);
    o.duration_ms = pick(300, 8'000);
    o.object.class_label = kClasses[pick(0, 3)];
    o.object.confidence = 1.0;
    o.object.width = uni(0.05, 0.3);
    o.object.height = uni(0.05, 0.3);
    o.object.center_x = uni(o.object.width / 2, 1 - o.object.width / 2);
    o.object.center_y = uni(o.object.height / 2, 1 - o.object.height / 2);
    o.object.orientation_deg = uni(0, 359);
    s.objects.push_back(o);
  }
  const int events = pick(0, 4);
  for (int i = 0; i < events; ++i) {
    NetworkEvent e;
    e.t_ms = pick(1'000, static_cast<int>(s.duration_ms));
    e.link = pick(0, 1) ? LinkName::kUplink : LinkName::kDownlink;
    switch (pick(0, 3)) {
      case 0: e.disconnect_ms = pick(200, 6'000); break;
      case 1: e.latency_ms = uni(0, 400); break;
      case 2: e.bandwidth_bps = std::array{0.0, 2e6, 5e6, 20e6}[pick(0, 3)]; break;
      default: e.jitter_ms = uni(0, 80); break;
    }
    s.events.push_back(e);
  }
  std::sort(s.events.begin(), s.events.end(), [](const auto& a, const auto& b) { return a.t_ms < b.t_ms; });
  return s;
}

}  // namespace uavlink::sim
