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

#include "uavlink/protocol/codec.hpp"

#include <cmath>

#include "json.hpp"

namespace uavlink::protocol {
namespace {

using json = nlohmann::json;

constexpr std::string_view kMsgTypes[] = {
    "HELLO",       "HELLO_ACK",   "IMAGE_UPLOAD", "VERIFY_RESULT", "ANALYSIS",  "STREAM_START",
    "VIDEO_FRAME", "STREAM_STOP", "ALERT_EVENT",  "ALERT_ACK",     "RULE_UPDATE", "METRICS_SNAPSHOT",
};
constexpr std::string_view kRoles[] = {"edge", "consumer", "dashboard"};

struct Failure {
  DecodeErrc code;
  std::string detail;
};

[[noreturn]] void fail(DecodeErrc code, std::string detail) { throw Failure{code, std::move(detail)}; }

// ---- encoding ----------------------------------------------------------------

double finite(double v, const char* field) {
  if (!std::isfinite(v)) throw EncodeError(std::string("non-finite value in ") + field);
  return v;
}

json bytes_to_json(const Bytes& b, const char* field) {
  if (b.empty()) throw EncodeError(std::string(field) + " must be non-empty");
  return base64::encode(b);
}

json observation_to_json(const ObjectObservation& o) {
  if (auto bad = check_observation(o)) throw EncodeError("detection: " + *bad);
  return json{{"class", o.class_label},
              {"confidence", o.confidence},
              {"position", {{"x", o.center_x}, {"y", o.center_y}}},
              {"size", {{"w", o.width}, {"h", o.height}}},
              {"orientation_deg", o.orientation_deg}};
}

json rule_to_json(const Rule& r) {
  finite(r.min_confidence, "min_confidence");
  return json{{"rule_id", r.rule_id},
              {"mission_id", r.mission_id},
              {"target_classes", r.target_classes},
              {"min_confidence", r.min_confidence},
              {"severity", to_string(r.severity)},
              {"prompt_template", r.prompt_template},
              {"enabled", r.enabled}};
}

json alert_to_json(const Alert& a) {
  json j{{"alert_id", a.alert_id},   {"alert_type", to_string(a.alert_type)}, {"severity", to_string(a.severity)},
         {"message", a.message},     {"timestamp_ms", a.timestamp_ms},        {"status", to_string(a.status)}};
  if (a.detection_id) j["detection_id"] = *a.detection_id;
  if (a.rule_id) j["rule_id"] = *a.rule_id;
  if (a.analysis_text) j["analysis_text"] = *a.analysis_text;
  return j;
}

struct PayloadEncoder {
  json operator()(const Hello& m) const {
    json j{{"role", to_string(m.role)}, {"token", m.token}};
    if (m.mission_id) j["mission_id"] = *m.mission_id;
    return j;
  }
  json operator()(const HelloAck& m) const { return json{{"accepted", m.accepted}, {"reason", m.reason}}; }
  json operator()(const ImageUpload& m) const {
    json dets = json::array();
    for (const auto& d : m.detections) dets.push_back(observation_to_json(d));
    return json{{"image_data", bytes_to_json(m.image_data, "image_data")},
                {"detections", std::move(dets)},
                {"capture_ts_ms", m.capture_ts_ms}};
  }
  json operator()(const VerifyResult& m) const {
    json j{{"verified", m.verified}, {"capture_ts_ms", m.capture_ts_ms}};
    if (m.matched_rule_id) j["matched_rule_id"] = *m.matched_rule_id;
    if (m.alert_id) j["alert_id"] = *m.alert_id;
    if (m.error) j["error"] = *m.error;
    return j;
  }
  json operator()(const Analysis& m) const { return json{{"detection_id", m.detection_id}, {"text", m.text}}; }
  json operator()(const StreamStart& m) const {
    if (m.stream_id.empty()) throw EncodeError("stream_id must be non-empty");
    return json{{"stream_id", m.stream_id}};
  }
  json operator()(const VideoFrame& m) const {
    if (m.stream_id.empty()) throw EncodeError("stream_id must be non-empty");
    return json{{"stream_id", m.stream_id},
                {"frame_seq", m.frame_seq},
                {"frame_data", bytes_to_json(m.frame_data, "frame_data")},
                {"encode_ts_ms", m.encode_ts_ms},
                {"capture_ts_ms", m.capture_ts_ms}};
  }
  json operator()(const StreamStop& m) const {
    if (m.stream_id.empty()) throw EncodeError("stream_id must be non-empty");
    return json{{"stream_id", m.stream_id}};
  }
  json operator()(const AlertEvent& m) const {
    json j{{"alert", alert_to_json(m.alert)}, {"drone_id", m.drone_id}};
    if (m.mission_id) j["mission_id"] = *m.mission_id;
    if (m.error) j["error"] = *m.error;
    return j;
  }
  json operator()(const AlertAck& m) const {
    return json{{"alert_id", m.alert_id}, {"action", to_string(m.action)}};
  }
  json operator()(const RuleUpdate& m) const {
    json j{{"rule", rule_to_json(m.rule)}};
    if (m.error) j["error"] = *m.error;
    return j;
  }
  json operator()(const MetricsSnapshot& m) const {
    json values = json::object();
    for (const auto& [k, v] : m.values) values[k] = finite(v, "metrics");
    return json{{"values", std::move(values)}};
  }
};

// ---- decoding ----------------------------------------------------------------

const json& field(const json& obj, const char* name) {
  if (!obj.is_object()) fail(DecodeErrc::kStructural, std::string("expected object around ") + name);
  auto it = obj.find(name);
  if (it == obj.end()) fail(DecodeErrc::kStructural, std::string("missing field ") + name);
  return *it;
}

const json* optional_field(const json& obj, const char* name) {
  auto it = obj.find(name);
  if (it == obj.end() || it->is_null()) return nullptr;
  return &*it;
}

std::string get_string(const json& obj, const char* name) {
  const auto& v = field(obj, name);
  if (!v.is_string()) fail(DecodeErrc::kStructural, std::string(name) + " must be a string");
  return v.get<std::string>();
}

std::int64_t as_int(const json& v, const char* name) {
  if (v.is_number_unsigned()) {
    const auto u = v.get<std::uint64_t>();
    if (u > static_cast<std::uint64_t>(INT64_MAX)) fail(DecodeErrc::kStructural, std::string(name) + " out of range");
    return static_cast<std::int64_t>(u);
  }
  if (!v.is_number_integer()) fail(DecodeErrc::kStructural, std::string(name) + " must be an integer");
  return v.get<std::int64_t>();
}

std::int64_t get_int(const json& obj, const char* name) { return as_int(field(obj, name), name); }

std::uint64_t get_uint(const json& obj, const char* name) {
  const auto& v = field(obj, name);
  if (!v.is_number_unsigned()) fail(DecodeErrc::kStructural, std::string(name) + " must be a non-negative integer");
  return v.get<std::uint64_t>();
}

double get_double(const json& obj, const char* name) {
  const auto& v = field(obj, name);
  if (!v.is_number()) fail(DecodeErrc::kStructural, std::string(name) + " must be a number");
  return v.get<double>();
}

bool get_bool(const json& obj, const char* name) {
  const auto& v = field(obj, name);
  if (!v.is_boolean()) fail(DecodeErrc::kStructural, std::string(name) + " must be a boolean");
  return v.get<bool>();
}

std::optional<std::int64_t> get_opt_int(const json& obj, const char* name) {
  if (const auto* v = optional_field(obj, name)) return as_int(*v, name);
  return std::nullopt;
}

std::optional<std::string> get_opt_string(const json& obj, const char* name) {
  if (const auto* v = optional_field(obj, name)) {
    if (!v->is_string()) fail(DecodeErrc::kStructural, std::string(name) + " must be a string");
    return v->get<std::string>();
  }
  return std::nullopt;
}

Bytes get_bytes(const json& obj, const char* name) {
  const auto text = get_string(obj, name);
  auto bytes = base64::decode(text);
  if (!bytes) fail(DecodeErrc::kInvalidBase64, std::string(name) + " is not valid base64");
  if (bytes->empty()) fail(DecodeErrc::kStructural, std::string(name) + " decodes to an empty payload");
  return std::move(*bytes);
}

template <typename E>
E get_enum(const json& obj, const char* name, std::optional<E> (*parse)(std::string_view)) {
  const auto text = get_string(obj, name);
  auto v = parse(text);
  if (!v) fail(DecodeErrc::kStructural, std::string(name) + " has unknown value '" + text + "'");
  return *v;
}

std::optional<Role> parse_role_fn(std::string_view s) { return parse_role(s); }

ObjectObservation observation_from_json(const json& j) {
  ObjectObservation o;
  o.class_label = get_string(j, "class");
  o.confidence = get_double(j, "confidence");
  const auto& pos = field(j, "position");
  o.center_x = get_double(pos, "x");
  o.center_y = get_double(pos, "y");
  const auto& size = field(j, "size");
  o.width = get_double(size, "w");
  o.height = get_double(size, "h");
  o.orientation_deg = get_double(j, "orientation_deg");
  // Range checks belong to the receiver, which answers with a typed error.
  return o;
}

Rule rule_from_json(const json& j) {
  Rule r;
  r.rule_id = get_int(j, "rule_id");
  r.mission_id = get_int(j, "mission_id");
  const auto& targets = field(j, "target_classes");
  if (!targets.is_array()) fail(DecodeErrc::kStructural, "target_classes must be an array");
  for (const auto& t : targets) {
    if (!t.is_string()) fail(DecodeErrc::kStructural, "target_classes entries must be strings");
    r.target_classes.insert(t.get<std::string>());
  }
  r.min_confidence = get_double(j, "min_confidence");
  r.severity = get_enum<Severity>(j, "severity", &parse_severity);
  r.prompt_template = get_string(j, "prompt_template");
  r.enabled = get_bool(j, "enabled");
  return r;
}

Alert alert_from_json(const json& j) {
  Alert a;
  a.alert_id = get_int(j, "alert_id");
  a.alert_type = get_enum<AlertType>(j, "alert_type", &parse_alert_type);
  a.severity = get_enum<Severity>(j, "severity", &parse_severity);
  a.message = get_string(j, "message");
  a.timestamp_ms = get_int(j, "timestamp_ms");
  a.status = get_enum<AlertStatus>(j, "status", &parse_alert_status);
  a.detection_id = get_opt_int(j, "detection_id");
  a.rule_id = get_opt_int(j, "rule_id");
  a.analysis_text = get_opt_string(j, "analysis_text");
  return a;
}

Payload payload_from_json(MsgType type, const json& p) {
  if (!p.is_object()) fail(DecodeErrc::kStructural, "payload must be an object");
  switch (type) {
    case MsgType::kHello: {
      Hello m;
      m.role = get_enum<Role>(p, "role", &parse_role_fn);
      m.token = get_string(p, "token");
      m.mission_id = get_opt_int(p, "mission_id");
      return m;
    }
    case MsgType::kHelloAck:
      return HelloAck{get_bool(p, "accepted"), get_string(p, "reason")};
    case MsgType::kImageUpload: {
      ImageUpload m;
      m.image_data = get_bytes(p, "image_data");
      const auto& dets = field(p, "detections");
      if (!dets.is_array()) fail(DecodeErrc::kStructural, "detections must be an array");
      for (const auto& d : dets) m.detections.push_back(observation_from_json(d));
      m.capture_ts_ms = get_int(p, "capture_ts_ms");
      return m;
    }
    case MsgType::kVerifyResult: {
      VerifyResult m;
      m.verified = get_bool(p, "verified");
      m.capture_ts_ms = get_int(p, "capture_ts_ms");
      m.matched_rule_id = get_opt_int(p, "matched_rule_id");
      m.alert_id = get_opt_int(p, "alert_id");
      m.error = get_opt_string(p, "error");
      return m;
    }
    case MsgType::kAnalysis:
      return Analysis{get_int(p, "detection_id"), get_string(p, "text")};
    case MsgType::kStreamStart: {
      StreamStart m{get_string(p, "stream_id")};
      if (m.stream_id.empty()) fail(DecodeErrc::kStructural, "stream_id is empty");
      return m;
    }
    case MsgType::kVideoFrame: {
      VideoFrame m;
      m.stream_id = get_string(p, "stream_id");
      if (m.stream_id.empty()) fail(DecodeErrc::kStructural, "stream_id is empty");
      m.frame_seq = get_uint(p, "frame_seq");
      m.frame_data = get_bytes(p, "frame_data");
      m.encode_ts_ms = get_int(p, "encode_ts_ms");
      m.capture_ts_ms = get_int(p, "capture_ts_ms");
      return m;
    }
    case MsgType::kStreamStop: {
      StreamStop m{get_string(p, "stream_id")};
      if (m.stream_id.empty()) fail(DecodeErrc::kStructural, "stream_id is empty");
      return m;
    }
    case MsgType::kAlertEvent: {
      AlertEvent m;
      m.alert = alert_from_json(field(p, "alert"));
      m.drone_id = get_string(p, "drone_id");
      m.mission_id = get_opt_int(p, "mission_id");
      m.error = get_opt_string(p, "error");
      return m;
    }
    case MsgType::kAlertAck:
      return AlertAck{get_int(p, "alert_id"), get_enum<AlertAction>(p, "action", &parse_alert_action)};
    case MsgType::kRuleUpdate: {
      RuleUpdate m;
      m.rule = rule_from_json(field(p, "rule"));
      m.error = get_opt_string(p, "error");
      return m;
    }
    case MsgType::kMetricsSnapshot: {
      MetricsSnapshot m;
      const auto& values = field(p, "values");
      if (!values.is_object()) fail(DecodeErrc::kStructural, "values must be an object");
      for (const auto& [k, v] : values.items()) {
        if (!v.is_number()) fail(DecodeErrc::kStructural, "metric " + k + " must be a number");
        m.values.emplace(k, v.get<double>());
      }
      return m;
    }
  }
  fail(DecodeErrc::kUnknownType, "unhandled message type");
}

}  // namespace

std::string_view to_string(MsgType t) { return kMsgTypes[static_cast<int>(t)]; }

std::optional<MsgType> parse_msg_type(std::string_view s) {
  for (std::size_t i = 0; i < std::size(kMsgTypes); ++i)
    if (kMsgTypes[i] == s) return static_cast<MsgType>(i);
  return std::nullopt;
}

std::string_view to_string(Role r) { return kRoles[static_cast<int>(r)]; }

std::optional<Role> parse_role(std::string_view s) {
  for (std::size_t i = 0; i < std::size(kRoles); ++i)
    if (kRoles[i] == s) return static_cast<Role>(i);
  return std::nullopt;
}

std::string_view to_string(DecodeErrc e) {
  switch (e) {
    case DecodeErrc::kTruncated: return "truncated";
    case DecodeErrc::kMalformed: return "malformed";
    case DecodeErrc::kUnknownType: return "unknown_type";
    case DecodeErrc::kInvalidBase64: return "invalid_base64";
    case DecodeErrc::kStructural: return "structural";
  }
  return "unknown";
}

std::string encode_payload(const Payload& payload) {
  try {
    return std::visit(PayloadEncoder{}, payload).dump();
  } catch (const json::exception& e) {
    throw EncodeError(std::string("unserializable payload: ") + e.what());
  }
}

std::string assemble_envelope(MsgType type, std::string_view payload_json, std::string_view sender_id,
                              std::uint64_t seq, std::int64_t timestamp_ms) {
  // Keys in sorted order, matching the dump of a full json object.
  std::string out;
  out.reserve(payload_json.size() + sender_id.size() + 96);
  out += R"({"msg_type":")";
  out += to_string(type);
  out += R"(","payload":)";
  out += payload_json;
  out += R"(,"sender_id":)";
  out += json(std::string(sender_id)).dump();
  out += R"(,"seq":)";
  out += std::to_string(seq);
  out += R"(,"timestamp_ms":)";
  out += std::to_string(timestamp_ms);
  out += '}';
  return out;
}

std::string encode_envelope(const Envelope& env) {
  if (payload_type(env.payload) != env.msg_type)
    throw EncodeError("msg_type " + std::string(to_string(env.msg_type)) + " does not match payload " +
                      std::string(to_string(payload_type(env.payload))));
  try {
    return assemble_envelope(env.msg_type, encode_payload(env.payload), env.sender_id, env.seq, env.timestamp_ms);
  } catch (const json::exception& e) {
    throw EncodeError(std::string("unserializable envelope: ") + e.what());
  }
}

std::variant<Envelope, DecodeError> decode_envelope(std::string_view data) {
  if (data.empty()) return DecodeError{DecodeErrc::kTruncated, "empty input"};
  try {
    json j;
    try {
      j = json::parse(data.begin(), data.end());
    } catch (const json::parse_error& e) {
      // The parser reports the offending byte; running off the end means the
      // document was cut short rather than corrupted.
      if (e.byte >= data.size()) return DecodeError{DecodeErrc::kTruncated, e.what()};
      return DecodeError{DecodeErrc::kMalformed, e.what()};
    }
    if (!j.is_object()) return DecodeError{DecodeErrc::kMalformed, "top level is not an object"};
    const auto type_name = get_string(j, "msg_type");
    const auto type = parse_msg_type(type_name);
    if (!type) return DecodeError{DecodeErrc::kUnknownType, "unknown msg_type '" + type_name + "'"};
    Envelope env;
    env.msg_type = *type;
    env.sender_id = get_string(j, "sender_id");
    env.seq = get_uint(j, "seq");
    env.timestamp_ms = get_int(j, "timestamp_ms");
    env.payload = payload_from_json(*type, field(j, "payload"));
    return env;
  } catch (const Failure& f) {
    return DecodeError{f.code, f.detail};
  } catch (const std::exception& e) {
    return DecodeError{DecodeErrc::kStructural, e.what()};
  }
}

bool SeqTracker::accept(std::uint64_t seq, std::int64_t timestamp_ms) {
  if (any_ && seq <= last_seq_) {
    ++regressions_;
    return false;
  }
  if (any_ && timestamp_ms < last_ts_) ++ts_regressions_;
  any_ = true;
  last_seq_ = seq;
  last_ts_ = std::max(last_ts_, timestamp_ms);
  return true;
}

}  // namespace uavlink::protocol
