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

// Random value generators shared by the property-style tests.

#include <random>
#include <string>
#include <vector>

#include "uavlink/domain/types.hpp"
#include "uavlink/protocol/messages.hpp"

namespace uavlink::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  std::mt19937_64& rng() { return rng_; }

  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  std::int64_t i64(std::int64_t lo, std::int64_t hi) { return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng_); }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }

  template <typename T>
  const T& pick(const std::vector<T>& v) { return v[static_cast<std::size_t>(integer(0, static_cast<int>(v.size()) - 1))]; }

  std::string text(int max_len = 24) {
    static const std::vector<std::string> pieces = {"a", "b", "z", "0", "9", " ", "_", "-", "\"", "\\", "/",
                                                    "{", "}", "\n", "\t", "\xC3\xA9", "\xE2\x82\xAC", "\xF0\x9F\x9A\x81"};
    std::string s;
    const int n = integer(0, max_len);
    for (int i = 0; i < n; ++i) s += pick(pieces);
    return s;
  }

  Bytes bytes(std::size_t min_len, std::size_t max_len) {
    Bytes b(static_cast<std::size_t>(i64(static_cast<std::int64_t>(min_len), static_cast<std::int64_t>(max_len))));
    for (auto& x : b) x = static_cast<std::uint8_t>(integer(0, 255));
    return b;
  }

  ObjectObservation observation(const std::vector<std::string>& classes = {"person", "car", "dog", "boat"}) {
    ObjectObservation o;
    o.class_label = pick(classes);
    o.confidence = coin(0.1) ? (coin() ? 0.0 : 1.0) : real(0.0, 1.0);
    o.width = real(0.01, 1.0);
    o.height = real(0.01, 1.0);
    o.center_x = real(o.width / 2, 1.0 - o.width / 2);
    o.center_y = real(o.height / 2, 1.0 - o.height / 2);
    o.orientation_deg = real(0.0, 359.999);
    return o;
  }

  Detection detection(Id mission_id, const std::vector<std::string>& classes = {"person", "car", "dog", "boat"}) {
    Detection d;
    d.detection_id = i64(1, 1'000'000);
    d.drone_id = "drone-" + std::to_string(integer(1, 9));
    d.mission_id = mission_id;
    d.object = observation(classes);
    d.capture_ts_ms = i64(0, 4'000'000'000'000);
    d.image_ref = "img/" + std::to_string(integer(1, 100000));
    return d;
  }

  Rule rule(Id rule_id, Id mission_id, const std::vector<std::string>& classes = {"person", "car", "dog", "boat"}) {
    Rule r;
    r.rule_id = rule_id;
    r.mission_id = mission_id;
    const int n = integer(1, static_cast<int>(classes.size()));
    for (int i = 0; i < n; ++i) r.target_classes.insert(pick(classes));
    r.min_confidence = coin(0.1) ? (coin() ? 0.0 : 1.0) : real(0.0, 1.0);
    r.severity = static_cast<Severity>(integer(0, 2));
    r.prompt_template = "Describe the {class} at {confidence}";
    r.enabled = coin(0.8);
    return r;
  }

  Alert alert() {
    Alert a;
    a.alert_id = i64(1, 1'000'000);
    a.alert_type = static_cast<AlertType>(integer(0, 1));
    a.severity = static_cast<Severity>(integer(0, 2));
    a.message = text();
    a.timestamp_ms = i64(0, 4'000'000'000'000);
    a.status = static_cast<AlertStatus>(integer(0, 2));
    if (coin()) a.detection_id = i64(1, 1000);
    if (coin()) a.rule_id = i64(1, 1000);
    if (coin()) a.analysis_text = text(80);
    return a;
  }

  protocol::Payload payload(protocol::MsgType type) {
    using namespace protocol;
    switch (type) {
      case MsgType::kHello: {
        Hello m{static_cast<Role>(integer(0, 2)), text(), std::nullopt};
        if (coin()) m.mission_id = i64(1, 100);
        return m;
      }
      case MsgType::kHelloAck: return HelloAck{coin(), text()};
      case MsgType::kImageUpload: {
        ImageUpload m;
        m.image_data = bytes(1, 2048);
        const int n = integer(0, 4);
        for (int i = 0; i < n; ++i) m.detections.push_back(observation());
        m.capture_ts_ms = i64(0, 4'000'000'000'000);
        return m;
      }
      case MsgType::kVerifyResult: {
        VerifyResult m;
        m.verified = coin();
        if (coin()) m.matched_rule_id = i64(1, 100);
        if (coin()) m.alert_id = i64(1, 100);
        m.capture_ts_ms = i64(0, 4'000'000'000'000);
        if (coin(0.2)) m.error = text();
        return m;
      }
      case MsgType::kAnalysis: return Analysis{i64(1, 1000), text(120)};
      case MsgType::kStreamStart: return StreamStart{"s-" + std::to_string(integer(1, 999))};
      case MsgType::kVideoFrame: {
        VideoFrame m;
        m.stream_id = "s-" + std::to_string(integer(1, 999));
        m.frame_seq = static_cast<std::uint64_t>(i64(0, 1'000'000));
        m.frame_data = bytes(1, 4096);
        m.encode_ts_ms = i64(0, 4'000'000'000'000);
        m.capture_ts_ms = i64(0, 4'000'000'000'000);
        return m;
      }
      case MsgType::kStreamStop: return StreamStop{"s-" + std::to_string(integer(1, 999))};
      case MsgType::kAlertEvent: {
        AlertEvent m{alert(), "drone-" + std::to_string(integer(1, 9)), std::nullopt, std::nullopt};
        if (coin()) m.mission_id = i64(1, 50);
        if (coin(0.2)) m.error = text();
        return m;
      }
      case MsgType::kAlertAck: return AlertAck{i64(1, 1000), static_cast<AlertAction>(integer(0, 1))};
      case MsgType::kRuleUpdate: {
        RuleUpdate m{rule(i64(0, 100), i64(1, 10)), std::nullopt};
        m.rule.prompt_template = text(40);
        if (coin(0.2)) m.error = text();
        return m;
      }
      case MsgType::kMetricsSnapshot: {
        MetricsSnapshot m;
        const int n = integer(0, 6);
        for (int i = 0; i < n; ++i) m.values[text(8)] = real(-1e6, 1e6);
        return m;
      }
    }
    return Hello{};
  }

  protocol::Envelope envelope() {
    const auto type = static_cast<protocol::MsgType>(integer(0, 11));
    return protocol::make_envelope(payload(type), text(12), static_cast<std::uint64_t>(i64(0, INT64_MAX)),
                                   i64(0, 4'000'000'000'000));
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace uavlink::testing
