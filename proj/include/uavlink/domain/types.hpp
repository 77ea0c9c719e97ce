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
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace uavlink {

using Id = std::int64_t;

enum class Severity { kInfo, kWarning, kCritical };
enum class AlertType { kDetection, kSystem };
enum class AlertStatus { kOpen, kAcknowledged, kResolved };
enum class AlertAction { kAcknowledge, kResolve };
enum class MissionStatus { kPlanned, kActive, kComplete };

std::string_view to_string(Severity s);
std::string_view to_string(AlertType t);
std::string_view to_string(AlertStatus s);
std::string_view to_string(AlertAction a);
std::string_view to_string(MissionStatus s);

std::optional<Severity> parse_severity(std::string_view s);
std::optional<AlertType> parse_alert_type(std::string_view s);
std::optional<AlertStatus> parse_alert_status(std::string_view s);
std::optional<AlertAction> parse_alert_action(std::string_view s);
std::optional<MissionStatus> parse_mission_status(std::string_view s);

/// Higher is more severe.
constexpr int rank(Severity s) { return static_cast<int>(s); }

/// A precondition of a domain operation was violated by the caller.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class IllegalTransition : public std::logic_error {
 public:
  IllegalTransition(AlertStatus current, AlertAction action);
  AlertStatus current() const { return current_; }
  AlertAction action() const { return action_; }

 private:
  AlertStatus current_;
  AlertAction action_;
};

struct User {
  std::string user_id;
  std::string display_name;
  std::string auth_token_hash;
  std::vector<Id> mission_ids;

  bool operator==(const User&) const = default;
};

struct Drone {
  std::string drone_id;
  std::string secret_token;
  std::string label;
  std::optional<Id> mission_id;

  bool operator==(const Drone&) const = default;
};

struct Mission {
  Id mission_id = 0;
  std::string name;
  std::vector<std::string> drone_ids;
  std::vector<std::string> user_ids;
  std::vector<Id> rule_ids;
  MissionStatus status = MissionStatus::kPlanned;

  bool operator==(const Mission&) const = default;
};

struct Rule {
  Id rule_id = 0;
  Id mission_id = 0;
  std::set<std::string> target_classes;
  double min_confidence = 0.0;
  Severity severity = Severity::kInfo;
  /// `{class}` and `{confidence}` are substituted by render_prompt.
  std::string prompt_template;
  bool enabled = true;

  bool operator==(const Rule&) const = default;
};

/// What the detector reports about one object. Coordinates are normalized to
/// the frame: center (x, y) in [0,1]^2, size (w, h) in (0,1]^2.
struct ObjectObservation {
  std::string class_label;
  double confidence = 0.0;
  double center_x = 0.5;
  double center_y = 0.5;
  double width = 0.1;
  double height = 0.1;
  double orientation_deg = 0.0;

  bool operator==(const ObjectObservation&) const = default;
};

struct Detection {
  Id detection_id = 0;
  std::string drone_id;
  Id mission_id = 0;
  ObjectObservation object;
  std::int64_t capture_ts_ms = 0;
  std::string image_ref;

  bool operator==(const Detection&) const = default;
};

struct Alert {
  Id alert_id = 0;
  AlertType alert_type = AlertType::kDetection;
  Severity severity = Severity::kInfo;
  std::string message;
  std::int64_t timestamp_ms = 0;
  AlertStatus status = AlertStatus::kOpen;
  std::optional<Id> detection_id;
  std::optional<Id> rule_id;
  std::optional<std::string> analysis_text;

  bool operator==(const Alert&) const = default;
};

/// Returns a description of the first violated invariant, if any.
std::optional<std::string> check_observation(const ObjectObservation& o);
std::optional<std::string> check_rule(const Rule& r);

}  // namespace uavlink
