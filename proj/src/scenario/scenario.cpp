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

#include "uavlink/scenario/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

namespace uavlink {
namespace {

constexpr std::string_view kResolution[] = {"4k360", "1080p"};
constexpr std::string_view kPreset[] = {"ultrafast", "medium", "slow"};
constexpr std::string_view kLink[] = {"uplink", "downlink"};

int line_of(const YAML::Node& n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : 0; }

[[noreturn]] void bad(const YAML::Node& n, const std::string& path, const std::string& msg) {
  throw ScenarioError(line_of(n), path, msg);
}

/// Walks a mapping and rejects keys that the schema does not know.
class Section {
 public:
  Section(const YAML::Node& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.IsMap()) bad(node_, path_, "expected a mapping");
  }

  void allow_only(std::initializer_list<const char*> keys) const {
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!allowed.contains(key)) bad(kv.first, child(key), "unknown field");
    }
  }

  bool has(const char* key) const { return static_cast<bool>(node_[key]); }
  YAML::Node raw(const char* key) const { return node_[key]; }
  std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  template <typename T>
  T get(const char* key, T fallback) const {
    const auto n = node_[key];
    if (!n) return fallback;
    return convert<T>(n, child(key));
  }

  template <typename T>
  T require(const char* key) const {
    const auto n = node_[key];
    if (!n) bad(node_, child(key), "missing required field");
    return convert<T>(n, child(key));
  }

  template <typename T>
  std::optional<T> optional(const char* key) const {
    const auto n = node_[key];
    if (!n) return std::nullopt;
    return convert<T>(n, child(key));
  }

  template <typename T>
  static T convert(const YAML::Node& n, const std::string& path) {
    if (!n.IsScalar()) bad(n, path, "expected a scalar");
    try {
      return n.as<T>();
    } catch (const YAML::Exception&) {
      bad(n, path, "cannot convert '" + n.Scalar() + "'");
    }
  }

  const YAML::Node& node() const { return node_; }

 private:
  YAML::Node node_;
  std::string path_;
};

template <typename E, std::size_t N>
E enum_field(const Section& s, const char* key, E fallback, const std::string_view (&names)[N]) {
  if (!s.has(key)) return fallback;
  const auto text = Section::convert<std::string>(s.raw(key), s.child(key));
  for (std::size_t i = 0; i < N; ++i)
    if (names[i] == text) return static_cast<E>(i);
  bad(s.raw(key), s.child(key), "unknown value '" + text + "'");
}

void check(bool ok, const YAML::Node& n, const std::string& path, const std::string& msg) {
  if (!ok) bad(n, path, msg);
}

LinkParams parse_link(const Section& s) {
  s.allow_only({"latency_ms", "bandwidth_bps", "jitter_ms"});
  LinkParams p;
  p.latency_ms = s.get("latency_ms", 0.0);
  p.bandwidth_bps = s.get("bandwidth_bps", 0.0);
  p.jitter_ms = s.get("jitter_ms", 0.0);
  check(p.latency_ms >= 0, s.raw("latency_ms"), s.child("latency_ms"), "must be >= 0");
  check(p.bandwidth_bps >= 0, s.raw("bandwidth_bps"), s.child("bandwidth_bps"), "must be >= 0 (0 = unlimited)");
  check(p.jitter_ms >= 0, s.raw("jitter_ms"), s.child("jitter_ms"), "must be >= 0");
  return p;
}

std::vector<std::string> string_list(const YAML::Node& n, const std::string& path) {
  if (!n.IsSequence()) bad(n, path, "expected a list");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n.size(); ++i)
    out.push_back(Section::convert<std::string>(n[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

std::pair<double, double> range(const YAML::Node& n, const std::string& path) {
  if (!n.IsSequence() || n.size() != 2) bad(n, path, "expected [min, max]");
  const auto lo = Section::convert<double>(n[0], path + "[0]");
  const auto hi = Section::convert<double>(n[1], path + "[1]");
  if (lo > hi) bad(n, path, "min exceeds max");
  return {lo, hi};
}

ObjectObservation parse_box(const Section& s) {
  ObjectObservation o;
  o.class_label = s.require<std::string>("class");
  const auto pos = s.raw("position");
  if (!pos || !pos.IsSequence() || pos.size() != 2) bad(pos ? pos : s.node(), s.child("position"), "expected [x, y]");
  o.center_x = Section::convert<double>(pos[0], s.child("position[0]"));
  o.center_y = Section::convert<double>(pos[1], s.child("position[1]"));
  const auto size = s.raw("size");
  if (!size || !size.IsSequence() || size.size() != 2) bad(size ? size : s.node(), s.child("size"), "expected [w, h]");
  o.width = Section::convert<double>(size[0], s.child("size[0]"));
  o.height = Section::convert<double>(size[1], s.child("size[1]"));
  o.orientation_deg = s.get("orientation_deg", 0.0);
  o.confidence = 1.0;
  if (auto why = check_observation(o)) bad(s.node(), s.child("position"), *why);
  return o;
}

}  // namespace

std::string_view to_string(ResolutionProfile r) { return kResolution[static_cast<int>(r)]; }
std::string_view to_string(EncoderPreset p) { return kPreset[static_cast<int>(p)]; }
std::string_view to_string(LinkName l) { return kLink[static_cast<int>(l)]; }

std::optional<ResolutionProfile> parse_resolution(std::string_view s) {
  for (int i = 0; i < 2; ++i)
    if (kResolution[i] == s) return static_cast<ResolutionProfile>(i);
  return std::nullopt;
}

std::optional<EncoderPreset> parse_preset(std::string_view s) {
  for (int i = 0; i < 3; ++i)
    if (kPreset[i] == s) return static_cast<EncoderPreset>(i);
  return std::nullopt;
}

ScenarioError::ScenarioError(int line, std::string field, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + field + ": " + message),
      line_(line),
      field_(std::move(field)) {}

Scenario parse_scenario(std::string_view yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(yaml_text));
  } catch (const YAML::ParserException& e) {
    throw ScenarioError(e.mark.line + 1, "<document>", e.msg);
  }
  Section top(root, "");
  top.allow_only({"schema", "name", "duration_ms", "seed", "drone", "source", "detector", "encoder", "gate", "upload",
                  "metrics_period_ms", "network", "provider", "consumer", "operator", "reference_total_ms", "rules",
                  "objects", "events"});

  Scenario s;
  s.schema = top.require<int>("schema");
  check(s.schema == 1, top.raw("schema"), "schema", "unsupported schema version (expected 1)");
  s.name = top.get<std::string>("name", s.name);
  s.duration_ms = top.get<std::int64_t>("duration_ms", s.duration_ms);
  check(s.duration_ms > 0, top.raw("duration_ms"), "duration_ms", "must be > 0");
  s.seed = top.get<std::uint64_t>("seed", s.seed);
  s.metrics_period_ms = top.get<std::int64_t>("metrics_period_ms", s.metrics_period_ms);
  check(s.metrics_period_ms > 0, top.raw("metrics_period_ms"), "metrics_period_ms", "must be > 0");

  if (top.has("drone")) {
    Section d(top.raw("drone"), "drone");
    d.allow_only({"id", "token"});
    s.drone_id = d.get<std::string>("id", s.drone_id);
    s.drone_token = d.get<std::string>("token", s.drone_token);
    check(!s.drone_id.empty(), d.raw("id"), "drone.id", "must be non-empty");
    check(!s.drone_token.empty(), d.raw("token"), "drone.token", "must be non-empty");
  }
  if (top.has("source")) {
    Section src(top.raw("source"), "source");
    src.allow_only({"frame_period_ms", "resolution"});
    s.frame_period_ms = src.get<std::int64_t>("frame_period_ms", s.frame_period_ms);
    check(s.frame_period_ms > 0, src.raw("frame_period_ms"), "source.frame_period_ms", "must be > 0");
    s.resolution = enum_field(src, "resolution", s.resolution, kResolution);
  }
  if (top.has("detector")) {
    Section det(top.raw("detector"), "detector");
    det.allow_only({"latency_ms", "precision", "recall", "tp_confidence", "fp_confidence", "fp_classes"});
    auto& p = s.detector;
    if (det.has("latency_ms")) {
      std::tie(p.latency_min_ms, p.latency_max_ms) = range(det.raw("latency_ms"), "detector.latency_ms");
      check(p.latency_min_ms >= 0, det.raw("latency_ms"), "detector.latency_ms", "must be >= 0");
    }
    p.precision = det.get("precision", p.precision);
    check(p.precision >= 0 && p.precision <= 1, det.raw("precision"), "detector.precision", "must be in [0,1]");
    p.recall = det.get("recall", p.recall);
    check(p.recall >= 0 && p.recall <= 1, det.raw("recall"), "detector.recall", "must be in [0,1]");
    if (det.has("tp_confidence"))
      std::tie(p.tp_confidence_min, p.tp_confidence_max) = range(det.raw("tp_confidence"), "detector.tp_confidence");
    if (det.has("fp_confidence"))
      std::tie(p.fp_confidence_min, p.fp_confidence_max) = range(det.raw("fp_confidence"), "detector.fp_confidence");
    for (auto [lo, hi, key] : {std::tuple{p.tp_confidence_min, p.tp_confidence_max, "tp_confidence"},
                               std::tuple{p.fp_confidence_min, p.fp_confidence_max, "fp_confidence"}})
      check(lo >= 0 && hi <= 1, det.raw(key), std::string("detector.") + key, "must lie within [0,1]");
    if (det.has("fp_classes")) {
      p.fp_classes = string_list(det.raw("fp_classes"), "detector.fp_classes");
      check(!p.fp_classes.empty(), det.raw("fp_classes"), "detector.fp_classes", "must be non-empty");
    }
  }
  if (top.has("encoder")) {
    Section enc(top.raw("encoder"), "encoder");
    enc.allow_only({"preset"});
    s.preset = enum_field(enc, "preset", s.preset, kPreset);
  }
  if (top.has("gate")) {
    Section g(top.raw("gate"), "gate");
    g.allow_only({"stream_timeout_ms"});
    s.stream_timeout_ms = g.get<std::int64_t>("stream_timeout_ms", s.stream_timeout_ms);
    check(s.stream_timeout_ms > 0, g.raw("stream_timeout_ms"), "gate.stream_timeout_ms", "must be > 0");
  }
  if (top.has("upload")) {
    Section u(top.raw("upload"), "upload");
    u.allow_only({"image_bytes"});
    s.image_bytes = u.get<std::size_t>("image_bytes", s.image_bytes);
    check(s.image_bytes > 0, u.raw("image_bytes"), "upload.image_bytes", "must be > 0");
  }
  if (top.has("network")) {
    Section net(top.raw("network"), "network");
    net.allow_only({"uplink", "downlink"});
    if (net.has("uplink")) s.uplink = parse_link(Section(net.raw("uplink"), "network.uplink"));
    if (net.has("downlink")) s.downlink = parse_link(Section(net.raw("downlink"), "network.downlink"));
  }
  if (top.has("provider")) {
    Section p(top.raw("provider"), "provider");
    p.allow_only({"latency_ms"});
    s.provider_latency_ms = p.get("latency_ms", s.provider_latency_ms);
    check(s.provider_latency_ms >= 0, p.raw("latency_ms"), "provider.latency_ms", "must be >= 0");
  }
  if (top.has("consumer")) {
    Section c(top.raw("consumer"), "consumer");
    c.allow_only({"count", "display_delay_ms"});
    s.consumers = c.get("count", s.consumers);
    check(s.consumers >= 0, c.raw("count"), "consumer.count", "must be >= 0");
    s.display_delay_ms = c.get("display_delay_ms", s.display_delay_ms);
    check(s.display_delay_ms >= 0, c.raw("display_delay_ms"), "consumer.display_delay_ms", "must be >= 0");
  }
  if (top.has("operator")) {
    Section op(top.raw("operator"), "operator");
    op.allow_only({"ack_after_ms", "resolve_after_ms"});
    OperatorParams p;
    p.ack_after_ms = op.get("ack_after_ms", p.ack_after_ms);
    p.resolve_after_ms = op.get("resolve_after_ms", p.resolve_after_ms);
    check(p.ack_after_ms >= 0, op.raw("ack_after_ms"), "operator.ack_after_ms", "must be >= 0");
    check(p.resolve_after_ms >= 0, op.raw("resolve_after_ms"), "operator.resolve_after_ms", "must be >= 0");
    s.operator_sim = p;
  }
  s.reference_total_ms = top.optional<double>("reference_total_ms");
  if (s.reference_total_ms)
    check(*s.reference_total_ms > 0, top.raw("reference_total_ms"), "reference_total_ms", "must be > 0");
  if (top.has("rules")) {
    const auto list = top.raw("rules");
    check(list.IsSequence(), list, "rules", "expected a list");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string path = "rules[" + std::to_string(i) + "]";
      Section r(list[i], path);
      r.allow_only({"targets", "min_confidence", "severity", "prompt", "enabled"});
      Rule rule;
      const auto targets = r.raw("targets");
      if (!targets) bad(list[i], path + ".targets", "missing required field");
      for (auto& t : string_list(targets, path + ".targets")) rule.target_classes.insert(t);
      rule.min_confidence = r.get("min_confidence", 0.5);
      rule.severity = enum_field(r, "severity", Severity::kWarning, {"info", "warning", "critical"});
      rule.prompt_template = r.get<std::string>("prompt", "Describe the {class} seen with confidence {confidence}.");
      rule.enabled = r.get("enabled", true);
      if (auto why = check_rule(rule)) bad(list[i], path, *why);
      s.rules.push_back(std::move(rule));
    }
  }
  if (top.has("objects")) {
    const auto list = top.raw("objects");
    check(list.IsSequence(), list, "objects", "expected a list");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string path = "objects[" + std::to_string(i) + "]";
      Section o(list[i], path);
      o.allow_only({"t_ms", "duration_ms", "class", "position", "size", "orientation_deg"});
      ScriptedObject obj;
      obj.t_ms = o.require<std::int64_t>("t_ms");
      check(obj.t_ms >= 0, o.raw("t_ms"), path + ".t_ms", "must be >= 0");
      obj.duration_ms = o.get<std::int64_t>("duration_ms", s.frame_period_ms);
      check(obj.duration_ms > 0, o.raw("duration_ms"), path + ".duration_ms", "must be > 0");
      obj.object = parse_box(o);
      s.objects.push_back(std::move(obj));
    }
  }
  if (top.has("events")) {
    const auto list = top.raw("events");
    check(list.IsSequence(), list, "events", "expected a list");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string path = "events[" + std::to_string(i) + "]";
      Section e(list[i], path);
      e.allow_only({"t_ms", "link", "latency_ms", "bandwidth_bps", "jitter_ms", "disconnect_ms"});
      NetworkEvent ev;
      ev.t_ms = e.require<std::int64_t>("t_ms");
      check(ev.t_ms >= 0, e.raw("t_ms"), path + ".t_ms", "must be >= 0");
      if (!e.has("link")) bad(list[i], path + ".link", "missing required field");
      ev.link = enum_field(e, "link", LinkName::kUplink, kLink);
      ev.latency_ms = e.optional<double>("latency_ms");
      ev.bandwidth_bps = e.optional<double>("bandwidth_bps");
      ev.jitter_ms = e.optional<double>("jitter_ms");
      ev.disconnect_ms = e.optional<std::int64_t>("disconnect_ms");
      for (auto [v, key] : {std::pair{ev.latency_ms, "latency_ms"}, std::pair{ev.bandwidth_bps, "bandwidth_bps"},
                            std::pair{ev.jitter_ms, "jitter_ms"}})
        if (v) check(*v >= 0, e.raw(key), path + "." + key, "must be >= 0");
      if (ev.disconnect_ms) check(*ev.disconnect_ms > 0, e.raw("disconnect_ms"), path + ".disconnect_ms", "must be > 0");
      s.events.push_back(ev);
    }
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(0, "<file>", "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

void validate_scenario(const Scenario& s) {
  auto fail = [](const std::string& field, const std::string& msg) { throw ScenarioError(0, field, msg); };
  if (s.schema != 1) fail("schema", "unsupported schema version");
  if (s.duration_ms <= 0) fail("duration_ms", "must be > 0");
  if (s.frame_period_ms <= 0) fail("source.frame_period_ms", "must be > 0");
  if (s.detector.latency_min_ms < 0 || s.detector.latency_min_ms > s.detector.latency_max_ms)
    fail("detector.latency_ms", "invalid range");
  if (s.detector.precision < 0 || s.detector.precision > 1) fail("detector.precision", "must be in [0,1]");
  if (s.detector.recall < 0 || s.detector.recall > 1) fail("detector.recall", "must be in [0,1]");
  if (s.detector.fp_classes.empty()) fail("detector.fp_classes", "must be non-empty");
  if (s.stream_timeout_ms <= 0) fail("gate.stream_timeout_ms", "must be > 0");
  if (s.image_bytes == 0) fail("upload.image_bytes", "must be > 0");
  for (const auto& r : s.rules)
    if (auto why = check_rule(r)) fail("rules", *why);
  for (const auto& o : s.objects)
    if (auto why = check_observation(o.object)) fail("objects", *why);
}

std::vector<ObjectObservation> objects_at(const Scenario& s, std::int64_t t_ms) {
  std::vector<ObjectObservation> out;
  for (const auto& o : s.objects)
    if (t_ms >= o.t_ms && t_ms < o.t_ms + o.duration_ms) out.push_back(o.object);
  return out;
}

}  // namespace uavlink
