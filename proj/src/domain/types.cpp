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

#include "uavlink/domain/types.hpp"

#include <cmath>

namespace uavlink {
namespace {

template <typename E, std::size_t N>
std::optional<E> lookup(std::string_view s, const std::string_view (&names)[N]) {
  for (std::size_t i = 0; i < N; ++i)
    if (names[i] == s) return static_cast<E>(i);
  return std::nullopt;
}

constexpr std::string_view kSeverity[] = {"info", "warning", "critical"};
constexpr std::string_view kAlertType[] = {"detection", "system"};
constexpr std::string_view kAlertStatus[] = {"open", "acknowledged", "resolved"};
constexpr std::string_view kAlertAction[] = {"acknowledge", "resolve"};
constexpr std::string_view kMissionStatus[] = {"planned", "active", "complete"};

bool in_unit(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

}  // namespace

std::string_view to_string(Severity s) { return kSeverity[static_cast<int>(s)]; }
std::string_view to_string(AlertType t) { return kAlertType[static_cast<int>(t)]; }
std::string_view to_string(AlertStatus s) { return kAlertStatus[static_cast<int>(s)]; }
std::string_view to_string(AlertAction a) { return kAlertAction[static_cast<int>(a)]; }
std::string_view to_string(MissionStatus s) { return kMissionStatus[static_cast<int>(s)]; }

std::optional<Severity> parse_severity(std::string_view s) { return lookup<Severity>(s, kSeverity); }
std::optional<AlertType> parse_alert_type(std::string_view s) { return lookup<AlertType>(s, kAlertType); }
std::optional<AlertStatus> parse_alert_status(std::string_view s) { return lookup<AlertStatus>(s, kAlertStatus); }
std::optional<AlertAction> parse_alert_action(std::string_view s) { return lookup<AlertAction>(s, kAlertAction); }
std::optional<MissionStatus> parse_mission_status(std::string_view s) {
  return lookup<MissionStatus>(s, kMissionStatus);
}

IllegalTransition::IllegalTransition(AlertStatus current, AlertAction action)
    : std::logic_error("illegal alert transition: cannot " + std::string(to_string(action)) + " an alert that is " +
                       std::string(to_string(current))),
      current_(current),
      action_(action) {}

std::optional<std::string> check_observation(const ObjectObservation& o) {
  if (o.class_label.empty()) return "class_label is empty";
  if (!in_unit(o.confidence)) return "confidence outside [0,1]";
  if (!in_unit(o.center_x) || !in_unit(o.center_y)) return "position outside [0,1]^2";
  if (!std::isfinite(o.width) || !std::isfinite(o.height) || o.width <= 0.0 || o.height <= 0.0 || o.width > 1.0 ||
      o.height > 1.0)
    return "size outside (0,1]^2";
  if (!std::isfinite(o.orientation_deg) || o.orientation_deg < 0.0 || o.orientation_deg >= 360.0)
    return "orientation_deg outside [0,360)";
  // Small slack so boxes touching the frame edge survive rounding.
  constexpr double kEps = 1e-9;
  if (o.center_x - o.width / 2 < -kEps || o.center_x + o.width / 2 > 1.0 + kEps ||
      o.center_y - o.height / 2 < -kEps || o.center_y + o.height / 2 > 1.0 + kEps)
    return "bounding box leaves the unit frame";
  return std::nullopt;
}

std::optional<std::string> check_rule(const Rule& r) {
  if (!in_unit(r.min_confidence)) return "min_confidence outside [0,1]";
  if (r.target_classes.empty()) return "target_classes is empty";
  for (const auto& c : r.target_classes)
    if (c.empty()) return "target_classes contains an empty label";
  return std::nullopt;
}

}  // namespace uavlink
