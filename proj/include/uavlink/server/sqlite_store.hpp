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

#include <filesystem>
#include <memory>
#include <mutex>

#include "uavlink/server/store.hpp"

struct sqlite3;

namespace uavlink::server {

/// SQLite-backed Store. ":memory:" gives a private in-memory database; file
/// databases run in WAL mode and may be shared by several SqliteStore
/// instances (one connection each).
class SqliteStore final : public Store {
 public:
  explicit SqliteStore(const std::string& path);
  ~SqliteStore() override;
  SqliteStore(const SqliteStore&) = delete;
  SqliteStore& operator=(const SqliteStore&) = delete;

  void put_user(const User& u) override;
  std::optional<User> user(const std::string& user_id) override;
  std::optional<User> user_by_token_hash(const std::string& hash) override;
  void put_drone(const Drone& d) override;
  std::optional<Drone> drone(const std::string& drone_id) override;
  Id put_mission(const Mission& m) override;
  std::optional<Mission> mission(Id mission_id) override;
  void set_mission_status(Id mission_id, MissionStatus status) override;
  Rule upsert_rule(const Rule& r) override;
  std::optional<Rule> rule(Id rule_id) override;
  std::vector<Rule> rules_for_mission(Id mission_id) override;
  void record_upload(UploadBatch& batch) override;
  std::optional<Detection> detection(Id detection_id) override;
  void set_analysis(const std::vector<Id>& alert_ids, const std::string& text) override;
  AlertRecord transition_alert(Id alert_id, AlertAction action, const std::string& actor,
                               std::int64_t now_ms) override;
  std::optional<AlertRecord> alert(Id alert_id) override;
  std::vector<AlertRecord> alerts_for_mission(Id mission_id) override;
  std::vector<AlertTransitionRecord> alert_history(Id alert_id) override;
  StoreCounts counts() override;
  IntegrityReport check_integrity() override;

  /// Escape hatch for tests that need to corrupt or inspect the database.
  void exec(const std::string& sql);

 private:
  class Stmt;
  class Tx;
  void migrate();
  std::optional<AlertRecord> alert_locked(Id alert_id);
  std::vector<Id> user_missions_locked(const std::string& user_id);
  std::optional<Mission> mission_locked(Id mission_id);

  sqlite3* db_ = nullptr;
  std::mutex mu_;
};

}  // namespace uavlink::server
