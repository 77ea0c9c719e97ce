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

#include "uavlink/domain/rules.hpp"

#include <algorithm>
#include <array>
#include <charconv>

namespace uavlink {
namespace {

bool matches(const Detection& d, const Rule& r) {
  return r.enabled && r.target_classes.contains(d.object.class_label) && d.object.confidence >= r.min_confidence;
}

}  // namespace

std::vector<Rule> match_rules(const Detection& d, std::span<const Rule> rules) {
  std::vector<Rule> out;
  for (const auto& r : rules) {
    if (r.mission_id != d.mission_id)
      throw ContractError("rule " + std::to_string(r.rule_id) + " does not belong to mission " +
                          std::to_string(d.mission_id));
    if (matches(d, r)) out.push_back(r);
  }
  std::sort(out.begin(), out.end(), [](const Rule& a, const Rule& b) { return a.rule_id < b.rule_id; });
  return out;
}

std::string format_confidence(double value) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) return "nan";
  return std::string(buf.data(), end);
}

Alert generate_alert(const Detection& d, const Rule& r, std::int64_t now_ms) {
  if (r.mission_id != d.mission_id || !matches(d, r))
    throw ContractError("rule " + std::to_string(r.rule_id) + " does not match detection " +
                        std::to_string(d.detection_id));
  Alert a;
  a.alert_type = AlertType::kDetection;
  a.severity = r.severity;
  a.status = AlertStatus::kOpen;
  a.timestamp_ms = now_ms;
  a.detection_id = d.detection_id;
  a.rule_id = r.rule_id;
  a.message = std::string(to_string(r.severity)) + ": " + d.object.class_label + " detected by " + d.drone_id +
              " (confidence " + format_confidence(d.object.confidence) + ", rule " + std::to_string(r.rule_id) + ")";
  return a;
}

std::vector<Alert> generate_alerts(const Detection& d, std::span<const Rule> rules, std::int64_t now_ms) {
  std::vector<Alert> out;
  for (const auto& r : match_rules(d, rules)) out.push_back(generate_alert(d, r, now_ms));
  return out;
}

RenderedPrompt render_prompt(const Rule& r, const Detection& d) {
  RenderedPrompt out;
  const std::string& t = r.prompt_template;
  std::size_t i = 0;
  while (i < t.size()) {
    if (t[i] == '{') {
      const auto close = t.find('}', i + 1);
      if (close != std::string::npos) {
        const std::string_view name(t.data() + i + 1, close - i - 1);
        if (name == "class") {
          out.text += d.object.class_label;
          i = close + 1;
          continue;
        }
        if (name == "confidence") {
          out.text += format_confidence(d.object.confidence);
          i = close + 1;
          continue;
        }
        out.unknown_placeholders.emplace_back(t.substr(i, close - i + 1));
        out.text.append(t, i, close - i + 1);
        i = close + 1;
        continue;
      }
    }
    out.text.push_back(t[i]);
    ++i;
  }
  return out;
}

Alert transition_alert(const Alert& a, AlertAction action) {
  Alert next = a;
  if (a.status == AlertStatus::kOpen && action == AlertAction::kAcknowledge) {
    next.status = AlertStatus::kAcknowledged;
  } else if (a.status == AlertStatus::kAcknowledged && action == AlertAction::kResolve) {
    next.status = AlertStatus::kResolved;
  } else {
    throw IllegalTransition(a.status, action);
  }
  return next;
}

const Rule& analysis_rule(std::span<const Rule> rules) {
  if (rules.empty()) throw ContractError("analysis_rule needs at least one rule");
  const Rule* best = &rules.front();
  for (const auto& r : rules) {
    if (rank(r.severity) > rank(best->severity) ||
        (rank(r.severity) == rank(best->severity) && r.rule_id < best->rule_id))
      best = &r;
  }
  return *best;
}

}  // namespace uavlink
