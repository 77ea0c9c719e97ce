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
#include <stdexcept>
#include <string>
#include <vector>

#include "uavlink/domain/types.hpp"

namespace uavlink::server {

class StoreError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A write referenced an entity that does not exist.
class NotFound : public StoreError {
 public:
  using StoreError::StoreError;
};

/// An alert together with the drone and mission it came from.
struct AlertRecord {
  Alert alert;
  std::string drone_id;
  std::optional<Id> mission_id;
};

struct AlertTransitionRecord {
  Id alert_id = 0;
  AlertStatus from = AlertStatus::kOpen;
  AlertStatus to = AlertStatus::kOpen;
  std::string actor;
  std::int64_t timestamp_ms = 0;
};

struct StoreCounts {
  std::int64_t users = 0;
  std::int64_t drones = 0;
  std::int64_t missions = 0;
  std::int64_t rules = 0;
  std::int64_t detections = 0;
  std::int64_t alerts = 0;
};

/// Dangling references found by a full sweep; all zero on a healthy store.
struct IntegrityReport {
  std::int64_t detections_without_drone = 0;
  std::int64_t detections_without_mission = 0;
  std::int64_t alerts_without_detection = 0;
  std::int64_t alerts_without_rule = 0;
  std::int64_t rules_without_mission = 0;
  std::int64_t drones_without_mission = 0;
  std::int64_t memberships_dangling = 0;
  std::vector<std::string> foreign_key_violations;

  bool ok() const {
    return detections_without_drone == 0 && detections_without_mission == 0 && alerts_without_detection == 0 &&
           alerts_without_rule == 0 && rules_without_mission == 0 && drones_without_mission == 0 &&
           memberships_dangling == 0 && foreign_key_violations.empty();
  }
};

/// Detections of one upload with the alerts each of them raised.
struct UploadBatch {
  std::vector<Detection> detections;
  std::vector<std::vector<Alert>> alerts;
};

/// Persistence boundary for the server. Implementations are safe to call from
/// several threads.
class Store {
 public:
  virtual ~Store() = default;

  virtual void put_user(const User& u) = 0;
  virtual std::optional<User> user(const std::string& user_id) = 0;
  virtual std::optional<User> user_by_token_hash(const std::string& hash) = 0;

  virtual void put_drone(const Drone& d) = 0;
  virtual std::optional<Drone> drone(const std::string& drone_id) = 0;

  /// Assigns mission_id when it is 0. Attaches listed drones and users.
  virtual Id put_mission(const Mission& m) = 0;
  virtual std::optional<Mission> mission(Id mission_id) = 0;
  virtual void set_mission_status(Id mission_id, MissionStatus status) = 0;

  /// rule_id 0 creates; anything else replaces an existing rule.
  virtual Rule upsert_rule(const Rule& r) = 0;
  virtual std::optional<Rule> rule(Id rule_id) = 0;
  virtual std::vector<Rule> rules_for_mission(Id mission_id) = 0;

  /// Inserts everything in one transaction, filling in detection_id,
  /// alert_id and alert.detection_id. Nothing is written on failure.
  virtual void record_upload(UploadBatch& batch) = 0;
  virtual std::optional<Detection> detection(Id detection_id) = 0;

  virtual void set_analysis(const std::vector<Id>& alert_ids, const std::string& text) = 0;
  /// Atomic read-check-write; throws IllegalTransition or NotFound.
  virtual AlertRecord transition_alert(Id alert_id, AlertAction action, const std::string& actor,
                                       std::int64_t now_ms) = 0;
  virtual std::optional<AlertRecord> alert(Id alert_id) = 0;
  virtual std::vector<AlertRecord> alerts_for_mission(Id mission_id) = 0;
  virtual std::vector<AlertTransitionRecord> alert_history(Id alert_id) = 0;

  virtual StoreCounts counts() = 0;
  virtual IntegrityReport check_integrity() = 0;
};

}  // namespace uavlink::server
