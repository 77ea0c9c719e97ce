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

// Brute-force reference implementations used by the unit and acceptance
// tests. They share no code with the library beyond the data types.

#include <cstdio>
#include <cstdlib>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "uavlink/domain/types.hpp"

namespace uavlink::testing {

inline std::vector<Id> oracle_match_ids(const Detection& d, const std::vector<Rule>& rules) {
  std::map<Id, const Rule*> by_id;
  for (const auto& r : rules) by_id[r.rule_id] = &r;
  std::vector<Id> ids;
  for (const auto& [id, r] : by_id) {
    if (!r->enabled) continue;
    bool class_ok = false;
    for (const auto& c : r->target_classes) class_ok = class_ok || c == d.object.class_label;
    if (!class_ok) continue;
    if (!(d.object.confidence >= r->min_confidence)) continue;
    ids.push_back(id);
  }
  return ids;
}

// Shortest %.Ng rendering that parses back to the same double.
inline std::string oracle_shortest(double v) {
  char buf[64];
  for (int p = 1; p <= 17; ++p) {
    std::snprintf(buf, sizeof buf, "%.*g", p, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  return buf;
}

inline const char* oracle_severity(Severity s) {
  switch (s) {
    case Severity::kInfo: return "info";
    case Severity::kWarning: return "warning";
    case Severity::kCritical: return "critical";
  }
  return "?";
}

// Returns a description of the first mismatch, or nullopt when `a` is the
// alert rule `r` must raise for `d` at `now_ms`. The confidence inside the
// message is checked by value, not by spelling.
inline std::optional<std::string> oracle_check_alert(const Alert& a, const Detection& d, const Rule& r,
                                                     std::int64_t now_ms) {
  if (a.alert_type != AlertType::kDetection) return "alert_type";
  if (a.severity != r.severity) return "severity";
  if (a.status != AlertStatus::kOpen) return "status";
  if (a.timestamp_ms != now_ms) return "timestamp";
  if (a.detection_id != d.detection_id) return "detection_id";
  if (a.rule_id != r.rule_id) return "rule_id";
  if (a.analysis_text) return "analysis_text";
  const std::string head = std::string(oracle_severity(r.severity)) + ": " + d.object.class_label + " detected by " +
                           d.drone_id + " (confidence ";
  const std::string tail = ", rule " + std::to_string(r.rule_id) + ")";
  const auto& m = a.message;
  if (m.size() <= head.size() + tail.size() || m.compare(0, head.size(), head) != 0 ||
      m.compare(m.size() - tail.size(), tail.size(), tail) != 0)
    return "message: " + m;
  const auto conf = m.substr(head.size(), m.size() - head.size() - tail.size());
  if (std::strtod(conf.c_str(), nullptr) != d.object.confidence) return "confidence: " + conf;
  return std::nullopt;
}

}  // namespace uavlink::testing
