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

#include "uavlink/server/server_core.hpp"

#include <algorithm>

#include "json.hpp"
#include "uavlink/domain/rules.hpp"
#include "uavlink/server/auth.hpp"

namespace uavlink::server {

using namespace protocol;

std::string_view to_string(Endpoint e) {
  switch (e) {
    case Endpoint::kEdge: return "edge";
    case Endpoint::kConsumer: return "consumer";
    case Endpoint::kDashboard: return "dashboard";
  }
  return "?";
}

std::optional<Endpoint> endpoint_for_path(std::string_view path) {
  if (const auto q = path.find('?'); q != std::string_view::npos) path = path.substr(0, q);
  if (path == "/edge") return Endpoint::kEdge;
  if (path == "/consume") return Endpoint::kConsumer;
  if (path == "/dashboard") return Endpoint::kDashboard;
  return std::nullopt;
}

namespace {

Role role_for(Endpoint e) {
  switch (e) {
    case Endpoint::kEdge: return Role::kEdge;
    case Endpoint::kConsumer: return Role::kConsumer;
    case Endpoint::kDashboard: return Role::kDashboard;
  }
  return Role::kEdge;
}

}  // namespace

ServerCore::ServerCore(ServerConfig config, Store& store, ObjectStore& objects, AnalysisDispatcher& analysis,
                       const Clock& clock)
    : config_(std::move(config)),
      store_(store),
      objects_(objects),
      analysis_(analysis),
      clock_(clock),
      started_ms_(clock.now_ms()) {}

ServerCore::~ServerCore() { *alive_ = false; }

ServerCore::Queued ServerCore::prepare(Payload payload) {
  auto env = std::make_shared<Envelope>(make_envelope(std::move(payload)));
  auto json = std::make_shared<const std::string>(encode_payload(env->payload));
  return Queued{std::move(env), std::move(json)};
}

void ServerCore::notify(ConnId id) {
  if (listener_) listener_(id);
}

void ServerCore::send(ConnId id, Conn& c, Queued q, bool frame) {
  if (frame) {
    if (c.queue.push_frame(std::move(q))) ++stats_.consumer_frame_drops;
  } else {
    c.queue.push_control(std::move(q));
  }
  notify(id);
}

void ServerCore::send(ConnId id, Payload payload) {
  auto it = conns_.find(id);
  if (it != conns_.end()) send(id, it->second, prepare(std::move(payload)));
}

void ServerCore::reject(ConnId id, Conn& c, const std::string& reason) {
  ++stats_.rejected_handshakes;
  send(id, c, prepare(HelloAck{false, reason}));
  c.close_after_flush = true;
  notify(id);
}

ConnId ServerCore::open(Endpoint endpoint) {
  const ConnId id = next_id_++;
  auto [it, _] = conns_.emplace(
      id, Conn{endpoint, false, false, {}, std::nullopt, {},
               OutboundQueue<Queued>(endpoint == Endpoint::kConsumer ? config_.consumer_frame_capacity : 0),
               Sequencer(config_.server_id), SeqTracker{}});
  if (shutting_down_ && analyses_pending_ == 0) {
    it->second.close_after_flush = true;
    notify(id);
  }
  return id;
}

std::optional<ServerOutgoing> ServerCore::pop_outgoing(ConnId id) {
  auto it = conns_.find(id);
  if (it == conns_.end()) return std::nullopt;
  auto& c = it->second;
  auto q = c.queue.pop();
  if (!q) return std::nullopt;
  const auto stamp = c.sequencer.next(clock_.now_ms());
  ServerOutgoing out{q->envelope->msg_type, stamp.seq, stamp.timestamp_ms, q->envelope, {}};
  out.wire = assemble_envelope(out.type, *q->payload_json, config_.server_id, stamp.seq, stamp.timestamp_ms);
  return out;
}

bool ServerCore::has_outgoing(ConnId id) const {
  auto it = conns_.find(id);
  return it != conns_.end() && !it->second.queue.empty();
}

bool ServerCore::wants_close(ConnId id) const {
  auto it = conns_.find(id);
  return it != conns_.end() && it->second.close_after_flush;
}

std::size_t ServerCore::connection_count(Endpoint e) const {
  return static_cast<std::size_t>(
      std::count_if(conns_.begin(), conns_.end(), [e](const auto& kv) { return kv.second.endpoint == e; }));
}

std::optional<std::string> ServerCore::active_stream(const std::string& drone_id) const {
  auto it = streams_.find(drone_id);
  if (it == streams_.end()) return std::nullopt;
  return it->second;
}

std::optional<Id> ServerCore::drone_mission(const std::string& drone_id) const {
  auto it = edge_missions_.find(drone_id);
  if (it == edge_missions_.end()) return std::nullopt;
  return it->second;
}

void ServerCore::close(ConnId id) {
  auto it = conns_.find(id);
  if (it == conns_.end()) return;
  const Conn c = std::move(it->second);
  conns_.erase(it);
  if (c.endpoint != Endpoint::kEdge || !c.authenticated) return;
  auto e = edges_.find(c.principal);
  if (e == edges_.end() || e->second != id) return;
  edges_.erase(e);
  if (auto s = streams_.find(c.principal); s != streams_.end()) {
    to_consumers(drone_mission(c.principal), prepare(StreamStop{s->second}));
    streams_.erase(s);
  }
  edge_missions_.erase(c.principal);
}

void ServerCore::receive(ConnId id, std::string_view wire) {
  auto it = conns_.find(id);
  if (it == conns_.end()) return;
  auto& c = it->second;
  auto decoded = decode_envelope(wire);
  if (auto* err = std::get_if<DecodeError>(&decoded)) {
    ++stats_.decode_errors;
    if (observer_) observer_->on_decode_error(id, *err);
    return;
  }
  auto& env = std::get<Envelope>(decoded);
  if (!c.inbound.accept(env.seq, env.timestamp_ms)) {
    ++stats_.seq_regressions;
    return;
  }
  if (observer_) observer_->on_received(id, env);

  if (const auto* h = std::get_if<Hello>(&env.payload)) {
    on_hello(id, c, env, *h);
    return;
  }
  if (!c.authenticated) {
    ++stats_.protocol_violations;
    return;
  }
  switch (c.endpoint) {
    case Endpoint::kEdge: on_edge_message(id, c, env); break;
    case Endpoint::kDashboard: on_dashboard_message(id, c, env); break;
    case Endpoint::kConsumer: ++stats_.protocol_violations; break;
  }
}

void ServerCore::on_hello(ConnId id, Conn& c, const Envelope& env, const Hello& h) {
  if (c.authenticated) {
    ++stats_.protocol_violations;
    return;
  }
  if (shutting_down_) return reject(id, c, "server shutting down");
  if (h.role != role_for(c.endpoint))
    return reject(id, c, "role " + std::string(to_string(h.role)) + " not served on this endpoint");

  switch (c.endpoint) {
    case Endpoint::kEdge: {
      const auto drone = store_.drone(env.sender_id);
      // Compare against a dummy when the drone is unknown so both paths cost the same.
      const bool ok = constant_time_equal(drone ? drone->secret_token : std::string(h.token.size(), '\0'), h.token) &&
                      drone.has_value();
      if (!ok) return reject(id, c, "unknown drone or bad token");
      if (auto prev = edges_.find(drone->drone_id); prev != edges_.end() && prev->second != id) {
        // A reconnecting drone supersedes its stale connection.
        const ConnId old = prev->second;
        close(old);
        conns_.emplace(old, Conn{Endpoint::kEdge, false, true, {}, std::nullopt, {}, OutboundQueue<Queued>(0),
                                 Sequencer(config_.server_id), SeqTracker{}});
        notify(old);
      }
      c.authenticated = true;
      c.principal = drone->drone_id;
      edges_[c.principal] = id;
      if (drone->mission_id) edge_missions_[c.principal] = *drone->mission_id;
      send(id, c, prepare(HelloAck{true, ""}));
      return;
    }
    case Endpoint::kConsumer: {
      c.authenticated = true;
      c.principal = env.sender_id;
      c.mission_filter = h.mission_id;
      send(id, c, prepare(HelloAck{true, ""}));
      // Late joiners learn about streams already running.
      for (const auto& [drone, stream] : streams_) {
        if (c.mission_filter && drone_mission(drone) != c.mission_filter) continue;
        send(id, c, prepare(StreamStart{stream}));
      }
      return;
    }
    case Endpoint::kDashboard: {
      const auto user = h.token.empty() ? std::nullopt : store_.user_by_token_hash(sha256_hex(h.token));
      if (!user) return reject(id, c, "invalid bearer token");
      std::set<Id> missions(user->mission_ids.begin(), user->mission_ids.end());
      if (h.mission_id) {
        if (!missions.count(*h.mission_id))
          return reject(id, c, "user " + user->user_id + " is not assigned to mission " + std::to_string(*h.mission_id));
        missions = {*h.mission_id};
      }
      c.authenticated = true;
      c.principal = user->user_id;
      c.missions = std::move(missions);
      send(id, c, prepare(HelloAck{true, ""}));
      for (Id m : c.missions)
        for (auto& rec : store_.alerts_for_mission(m))
          send(id, c, prepare(AlertEvent{std::move(rec.alert), rec.drone_id, rec.mission_id, std::nullopt}));
      return;
    }
  }
}

void ServerCore::on_edge_message(ConnId id, Conn& c, const Envelope& env) {
  if (env.sender_id != c.principal) {
    ++stats_.protocol_violations;
    return;
  }
  switch (env.msg_type) {
    case MsgType::kImageUpload: on_image_upload(id, c, std::get<ImageUpload>(env.payload)); break;
    case MsgType::kStreamStart:
    case MsgType::kVideoFrame:
    case MsgType::kStreamStop: on_stream_message(c, env); break;
    case MsgType::kMetricsSnapshot: {
      const auto& m = std::get<MetricsSnapshot>(env.payload);
      metrics_[c.principal] = m;
      if (auto mission = drone_mission(c.principal)) to_dashboards(*mission, prepare(m));
      break;
    }
    default: ++stats_.protocol_violations; break;
  }
}

void ServerCore::on_image_upload(ConnId id, Conn& c, const ImageUpload& up) {
  ++stats_.uploads;
  VerifyResult vr;
  vr.capture_ts_ms = up.capture_ts_ms;
  auto refuse = [&](std::string error) {
    ++stats_.invalid_uploads;
    vr.verified = false;
    vr.error = std::move(error);
    send(id, c, prepare(vr));
  };

  if (shutting_down_) return refuse("server shutting down");
  const auto drone = store_.drone(c.principal);
  if (!drone || !drone->mission_id) return refuse("drone " + c.principal + " is not assigned to a mission");
  const auto mission = store_.mission(*drone->mission_id);
  if (!mission || mission->status != MissionStatus::kActive)
    return refuse("mission " + std::to_string(*drone->mission_id) + " is not active");
  edge_missions_[c.principal] = mission->mission_id;
  for (std::size_t i = 0; i < up.detections.size(); ++i)
    if (auto err = check_observation(up.detections[i])) return refuse("detection " + std::to_string(i) + ": " + *err);

  const auto rules = store_.rules_for_mission(mission->mission_id);
  const auto now = clock_.now_ms();
  UploadBatch batch;
  std::shared_ptr<const Bytes> image;
  std::string image_ref;
  try {
    image = std::make_shared<const Bytes>(up.image_data);
    image_ref = objects_.put(c.principal + "/" + std::to_string(up.capture_ts_ms) + ".jpg", *image);
  } catch (const std::exception& e) {
    return refuse(std::string("image storage failed: ") + e.what());
  }
  for (const auto& obs : up.detections) {
    Detection d;
    d.drone_id = c.principal;
    d.mission_id = mission->mission_id;
    d.object = obs;
    d.capture_ts_ms = up.capture_ts_ms;
    d.image_ref = image_ref;
    batch.alerts.push_back(generate_alerts(d, rules, now));
    batch.detections.push_back(std::move(d));
  }
  try {
    store_.record_upload(batch);
  } catch (const std::exception& e) {
    return refuse(std::string("persistence failed: ") + e.what());
  }

  // One analysis per upload, driven by the most severe matched rule.
  std::vector<Rule> matched;
  std::vector<Id> alert_ids;
  for (const auto& list : batch.alerts)
    for (const auto& a : list) {
      alert_ids.push_back(a.alert_id);
      if (std::none_of(matched.begin(), matched.end(), [&](const Rule& r) { return r.rule_id == *a.rule_id; }))
        matched.push_back(*std::find_if(rules.begin(), rules.end(), [&](const Rule& r) { return r.rule_id == *a.rule_id; }));
    }
  vr.verified = !matched.empty();
  if (observer_) observer_->on_upload(c.principal, up.capture_ts_ms, vr.verified, batch);
  if (!vr.verified) {
    ++stats_.unverified;
    send(id, c, prepare(vr));
    return;
  }
  ++stats_.verified;
  const Rule& lead = analysis_rule(matched);
  const Detection* prompt_det = nullptr;
  for (std::size_t i = 0; i < batch.detections.size() && !prompt_det; ++i)
    for (const auto& a : batch.alerts[i])
      if (a.rule_id == lead.rule_id) {
        prompt_det = &batch.detections[i];
        vr.alert_id = a.alert_id;
        break;
      }
  vr.matched_rule_id = lead.rule_id;
  send(id, c, prepare(vr));

  for (std::size_t i = 0; i < batch.detections.size(); ++i)
    for (const auto& a : batch.alerts[i])
      to_dashboards(mission->mission_id, prepare(AlertEvent{a, c.principal, mission->mission_id, std::nullopt}));

  AnalysisRequest req;
  req.detection_id = prompt_det->detection_id;
  req.drone_id = c.principal;
  req.object = prompt_det->object;
  req.prompt = render_prompt(lead, *prompt_det).text;
  req.image = std::move(image);
  ++analyses_pending_;
  std::weak_ptr<bool> alive = alive_;
  analysis_.submit(std::move(req), [this, alive, drone_id = c.principal, mission_id = mission->mission_id,
                                    ts = up.capture_ts_ms, det = prompt_det->detection_id,
                                    alert_ids = std::move(alert_ids)](AnalysisOutcome out) mutable {
    auto guard = alive.lock();
    if (!guard || !*guard) return;
    finish_analysis(drone_id, mission_id, ts, det, std::move(alert_ids), std::move(out));
  });
}

void ServerCore::finish_analysis(const std::string& drone_id, Id mission_id, std::int64_t capture_ts_ms,
                                 Id detection_id, std::vector<Id> alert_ids, AnalysisOutcome outcome) {
  --analyses_pending_;
  struct CloseWhenDrained {
    ServerCore& core;
    ~CloseWhenDrained() {
      if (core.shutting_down_ && core.analyses_pending_ == 0) core.close_all();
    }
  } drained{*this};
  if (outcome.error) {
    ++stats_.analysis_failures;
    return;
  }
  try {
    store_.set_analysis(alert_ids, outcome.text);
  } catch (const std::exception&) {
    ++stats_.analysis_failures;
    return;
  }
  ++stats_.analyses_done;
  if (observer_) observer_->on_analysis_done(drone_id, capture_ts_ms, detection_id);
  const auto q = prepare(Analysis{detection_id, std::move(outcome.text)});
  if (auto e = edges_.find(drone_id); e != edges_.end()) send(e->second, conns_.at(e->second), q);
  to_dashboards(mission_id, q);
  to_consumers(mission_id, q);
}

void ServerCore::on_stream_message(Conn& c, const Envelope& env) {
  const auto mission = drone_mission(c.principal);
  if (const auto* s = std::get_if<StreamStart>(&env.payload)) {
    if (auto old = streams_.find(c.principal); old != streams_.end() && old->second != s->stream_id)
      to_consumers(mission, prepare(StreamStop{old->second}));
    streams_[c.principal] = s->stream_id;
    to_consumers(mission, prepare(*s));
  } else if (const auto* s = std::get_if<StreamStop>(&env.payload)) {
    auto it = streams_.find(c.principal);
    if (it == streams_.end() || it->second != s->stream_id) {
      ++stats_.protocol_violations;
      return;
    }
    streams_.erase(it);
    to_consumers(mission, prepare(*s));
  } else if (const auto* f = std::get_if<VideoFrame>(&env.payload)) {
    auto it = streams_.find(c.principal);
    if (it == streams_.end() || it->second != f->stream_id) {
      ++stats_.protocol_violations;
      return;
    }
    fanout_stream(c.principal, *f);
  }
}

std::size_t ServerCore::fanout_stream(const std::string& drone_id, Payload payload) {
  const auto mission = drone_mission(drone_id);
  const auto* f = std::get_if<VideoFrame>(&payload);
  const std::string stream_id = f ? f->stream_id : std::string();
  const std::uint64_t frame_seq = f ? f->frame_seq : 0;
  const bool frame = f != nullptr;
  const auto q = prepare(std::move(payload));
  std::size_t delivered = 0, consumers = 0;
  for (auto& [id, c] : conns_) {
    if (c.endpoint != Endpoint::kConsumer || !c.authenticated || c.close_after_flush) continue;
    if (c.mission_filter && c.mission_filter != mission) continue;
    ++consumers;
    const bool full = frame && c.queue.frames_full();
    send(id, c, q, frame);
    if (!full) ++delivered;
  }
  if (frame) {
    ++stats_.frames_relayed;
    if (observer_) observer_->on_fanout(stream_id, frame_seq, delivered, consumers);
  }
  return delivered;
}

void ServerCore::to_dashboards(Id mission_id, const Queued& q) {
  for (auto& [id, c] : conns_)
    if (c.endpoint == Endpoint::kDashboard && c.authenticated && c.missions.count(mission_id)) send(id, c, q);
}

void ServerCore::to_consumers(std::optional<Id> mission_id, const Queued& q) {
  for (auto& [id, c] : conns_) {
    if (c.endpoint != Endpoint::kConsumer || !c.authenticated) continue;
    if (c.mission_filter && c.mission_filter != mission_id) continue;
    send(id, c, q);
  }
}

void ServerCore::on_dashboard_message(ConnId id, Conn& c, const Envelope& env) {
  if (const auto* ack = std::get_if<AlertAck>(&env.payload)) return on_alert_ack(id, c, *ack);
  if (const auto* ru = std::get_if<RuleUpdate>(&env.payload)) return on_rule_update(id, c, *ru);
  ++stats_.protocol_violations;
}

void ServerCore::on_alert_ack(ConnId id, Conn& c, const AlertAck& ack) {
  auto fail = [&](std::string error, std::optional<AlertRecord> rec) {
    AlertEvent ev;
    if (rec) {
      ev.alert = rec->alert;
      ev.drone_id = rec->drone_id;
      ev.mission_id = rec->mission_id;
    } else {
      ev.alert.alert_id = ack.alert_id;
    }
    ev.error = std::move(error);
    send(id, c, prepare(std::move(ev)));
  };
  auto rec = store_.alert(ack.alert_id);
  if (!rec || !rec->mission_id || !c.missions.count(*rec->mission_id))
    return fail("alert " + std::to_string(ack.alert_id) + " not found", std::nullopt);
  try {
    auto updated = store_.transition_alert(ack.alert_id, ack.action, c.principal, clock_.now_ms());
    to_dashboards(*updated.mission_id,
                  prepare(AlertEvent{updated.alert, updated.drone_id, updated.mission_id, std::nullopt}));
  } catch (const IllegalTransition& e) {
    fail(e.what(), store_.alert(ack.alert_id));
  } catch (const StoreError& e) {
    fail(e.what(), rec);
  }
}

void ServerCore::on_rule_update(ConnId id, Conn& c, const RuleUpdate& ru) {
  auto fail = [&](std::string error) { send(id, c, prepare(RuleUpdate{ru.rule, std::move(error)})); };
  if (!c.missions.count(ru.rule.mission_id))
    return fail("user " + c.principal + " is not assigned to mission " + std::to_string(ru.rule.mission_id));
  if (ru.rule.rule_id != 0) {
    auto existing = store_.rule(ru.rule.rule_id);
    if (!existing || !c.missions.count(existing->mission_id))
      return fail("rule " + std::to_string(ru.rule.rule_id) + " not found");
  }
  try {
    const Rule saved = store_.upsert_rule(ru.rule);
    to_dashboards(saved.mission_id, prepare(RuleUpdate{saved, std::nullopt}));
  } catch (const std::exception& e) {
    fail(e.what());
  }
}

void ServerCore::begin_shutdown() {
  shutting_down_ = true;
  if (analyses_pending_ == 0) close_all();
}

void ServerCore::close_all() {
  for (auto& [id, c] : conns_) {
    c.close_after_flush = true;
    notify(id);
  }
}

std::string ServerCore::status_json() {
  using nlohmann::json;
  json conns{{"edge", connection_count(Endpoint::kEdge)},
             {"consumer", connection_count(Endpoint::kConsumer)},
             {"dashboard", connection_count(Endpoint::kDashboard)}};
  json drones = json::array();
  for (const auto& [d, _] : edges_) drones.push_back(d);
  json metrics = json::object();
  for (const auto& [d, m] : metrics_) metrics[d] = m.values;
  const auto counts = store_.counts();
  json j{
      {"status", shutting_down_ ? "shutting_down" : "ok"},
      {"server_id", config_.server_id},
      {"uptime_ms", clock_.now_ms() - started_ms_},
      {"connections", conns},
      {"drones_online", drones},
      {"streams", streams_},
      {"analyses_pending", analyses_pending_},
      {"store",
       {{"users", counts.users},
        {"drones", counts.drones},
        {"missions", counts.missions},
        {"rules", counts.rules},
        {"detections", counts.detections},
        {"alerts", counts.alerts}}},
      {"stats",
       {{"uploads", stats_.uploads},
        {"verified", stats_.verified},
        {"unverified", stats_.unverified},
        {"invalid_uploads", stats_.invalid_uploads},
        {"analyses_done", stats_.analyses_done},
        {"analysis_failures", stats_.analysis_failures},
        {"frames_relayed", stats_.frames_relayed},
        {"consumer_frame_drops", stats_.consumer_frame_drops},
        {"decode_errors", stats_.decode_errors},
        {"seq_regressions", stats_.seq_regressions},
        {"protocol_violations", stats_.protocol_violations},
        {"rejected_handshakes", stats_.rejected_handshakes}}},
      {"edge_metrics", metrics},
  };
  return j.dump();
}

}  // namespace uavlink::server
