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

#include "uavlink/server/sqlite_store.hpp"

#include <sqlite3.h>

#include "json.hpp"

#include "uavlink/domain/rules.hpp"

namespace uavlink::server {

namespace {

constexpr const char* kSchema = R"sql(
CREATE TABLE IF NOT EXISTS missions (
  mission_id INTEGER PRIMARY KEY,
  name TEXT NOT NULL,
  status TEXT NOT NULL CHECK (status IN ('planned', 'active', 'complete'))
);
CREATE TABLE IF NOT EXISTS users (
  user_id TEXT PRIMARY KEY,
  display_name TEXT NOT NULL,
  auth_token_hash TEXT NOT NULL UNIQUE
);
CREATE TABLE IF NOT EXISTS user_missions (
  user_id TEXT NOT NULL REFERENCES users(user_id) ON DELETE CASCADE,
  mission_id INTEGER NOT NULL REFERENCES missions(mission_id) ON DELETE CASCADE,
  PRIMARY KEY (user_id, mission_id)
);
CREATE TABLE IF NOT EXISTS drones (
  drone_id TEXT PRIMARY KEY,
  secret_token TEXT NOT NULL,
  label TEXT NOT NULL,
  mission_id INTEGER REFERENCES missions(mission_id)
);
CREATE TABLE IF NOT EXISTS rules (
  rule_id INTEGER PRIMARY KEY,
  mission_id INTEGER NOT NULL REFERENCES missions(mission_id),
  target_classes TEXT NOT NULL,
  min_confidence REAL NOT NULL CHECK (min_confidence >= 0 AND min_confidence <= 1),
  severity TEXT NOT NULL CHECK (severity IN ('info', 'warning', 'critical')),
  prompt_template TEXT NOT NULL,
  enabled INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS detections (
  detection_id INTEGER PRIMARY KEY,
  drone_id TEXT NOT NULL REFERENCES drones(drone_id),
  mission_id INTEGER NOT NULL REFERENCES missions(mission_id),
  class_label TEXT NOT NULL,
  confidence REAL NOT NULL CHECK (confidence >= 0 AND confidence <= 1),
  center_x REAL NOT NULL,
  center_y REAL NOT NULL,
  width REAL NOT NULL,
  height REAL NOT NULL,
  orientation_deg REAL NOT NULL,
  capture_ts_ms INTEGER NOT NULL,
  image_ref TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS alerts (
  alert_id INTEGER PRIMARY KEY,
  alert_type TEXT NOT NULL CHECK (alert_type IN ('detection', 'system')),
  severity TEXT NOT NULL CHECK (severity IN ('info', 'warning', 'critical')),
  message TEXT NOT NULL,
  timestamp_ms INTEGER NOT NULL,
  status TEXT NOT NULL CHECK (status IN ('open', 'acknowledged', 'resolved')),
  detection_id INTEGER REFERENCES detections(detection_id),
  rule_id INTEGER REFERENCES rules(rule_id),
  analysis_text TEXT,
  CHECK (alert_type = 'system' OR (detection_id IS NOT NULL AND rule_id IS NOT NULL))
);
CREATE TABLE IF NOT EXISTS alert_transitions (
  id INTEGER PRIMARY KEY,
  alert_id INTEGER NOT NULL REFERENCES alerts(alert_id),
  from_status TEXT NOT NULL,
  to_status TEXT NOT NULL,
  actor TEXT NOT NULL,
  timestamp_ms INTEGER NOT NULL
);
CREATE INDEX IF NOT EXISTS detections_by_mission ON detections(mission_id);
CREATE INDEX IF NOT EXISTS alerts_by_detection ON alerts(detection_id);
CREATE INDEX IF NOT EXISTS rules_by_mission ON rules(mission_id);
)sql";

[[noreturn]] void fail(sqlite3* db, int rc, const std::string& what) {
  const std::string msg = what + ": " + (db ? sqlite3_errmsg(db) : sqlite3_errstr(rc));
  if ((rc & 0xff) == SQLITE_CONSTRAINT && sqlite3_extended_errcode(db) == SQLITE_CONSTRAINT_FOREIGNKEY)
    throw NotFound(msg);
  throw StoreError(msg);
}

template <typename E>
E parse_or_throw(std::optional<E> v, const char* what) {
  if (!v) throw StoreError(std::string("corrupt ") + what + " column");
  return *v;
}

}  // namespace

class SqliteStore::Stmt {
 public:
  Stmt(sqlite3* db, const char* sql) : db_(db) {
    const int rc = sqlite3_prepare_v2(db, sql, -1, &stmt_, nullptr);
    if (rc != SQLITE_OK) fail(db, rc, std::string("prepare ") + sql);
  }
  ~Stmt() { sqlite3_finalize(stmt_); }
  Stmt(const Stmt&) = delete;
  Stmt& operator=(const Stmt&) = delete;

  Stmt& bind(int i, std::int64_t v) { return check(sqlite3_bind_int64(stmt_, i, v)); }
  Stmt& bind(int i, int v) { return bind(i, static_cast<std::int64_t>(v)); }
  Stmt& bind(int i, bool v) { return bind(i, static_cast<std::int64_t>(v ? 1 : 0)); }
  Stmt& bind(int i, double v) { return check(sqlite3_bind_double(stmt_, i, v)); }
  Stmt& bind(int i, std::string_view v) {
    return check(sqlite3_bind_text(stmt_, i, v.data(), static_cast<int>(v.size()), SQLITE_TRANSIENT));
  }
  Stmt& bind(int i, const std::string& v) { return bind(i, std::string_view(v)); }
  Stmt& bind(int i, const char* v) { return bind(i, std::string_view(v)); }
  template <typename T>
  Stmt& bind(int i, const std::optional<T>& v) {
    if (!v) return check(sqlite3_bind_null(stmt_, i));
    return bind(i, *v);
  }

  /// True while a row is available.
  bool step() {
    const int rc = sqlite3_step(stmt_);
    if (rc == SQLITE_ROW) return true;
    if (rc == SQLITE_DONE) return false;
    fail(db_, rc, sqlite3_sql(stmt_));
  }
  void run() {
    while (step()) {
    }
  }

  std::int64_t i64(int c) const { return sqlite3_column_int64(stmt_, c); }
  double f64(int c) const { return sqlite3_column_double(stmt_, c); }
  bool is_null(int c) const { return sqlite3_column_type(stmt_, c) == SQLITE_NULL; }
  std::string text(int c) const {
    const auto* p = sqlite3_column_text(stmt_, c);
    return p ? std::string(reinterpret_cast<const char*>(p), static_cast<std::size_t>(sqlite3_column_bytes(stmt_, c)))
             : std::string();
  }
  std::optional<std::int64_t> opt_i64(int c) const {
    if (is_null(c)) return std::nullopt;
    return i64(c);
  }
  std::optional<std::string> opt_text(int c) const {
    if (is_null(c)) return std::nullopt;
    return text(c);
  }

 private:
  Stmt& check(int rc) {
    if (rc != SQLITE_OK) fail(db_, rc, "bind");
    return *this;
  }
  sqlite3* db_;
  sqlite3_stmt* stmt_ = nullptr;
};

/// Rolls back unless committed.
class SqliteStore::Tx {
 public:
  Tx(sqlite3* db, bool immediate) : db_(db) { exec(immediate ? "BEGIN IMMEDIATE" : "BEGIN"); }
  ~Tx() {
    if (!done_) sqlite3_exec(db_, "ROLLBACK", nullptr, nullptr, nullptr);
  }
  void commit() {
    exec("COMMIT");
    done_ = true;
  }

 private:
  void exec(const char* sql) {
    const int rc = sqlite3_exec(db_, sql, nullptr, nullptr, nullptr);
    if (rc != SQLITE_OK) fail(db_, rc, sql);
  }
  sqlite3* db_;
  bool done_ = false;
};

SqliteStore::SqliteStore(const std::string& path) {
  const int rc = sqlite3_open_v2(path.c_str(), &db_, SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE | SQLITE_OPEN_NOMUTEX,
                                 nullptr);
  if (rc != SQLITE_OK) {
    std::string msg = "cannot open store " + path + ": " + (db_ ? sqlite3_errmsg(db_) : sqlite3_errstr(rc));
    sqlite3_close(db_);
    throw StoreError(msg);
  }
  sqlite3_busy_timeout(db_, 10'000);
  exec("PRAGMA foreign_keys = ON");
  if (path != ":memory:") exec("PRAGMA journal_mode = WAL");
  exec("PRAGMA synchronous = NORMAL");
  migrate();
}

SqliteStore::~SqliteStore() { sqlite3_close(db_); }

void SqliteStore::exec(const std::string& sql) {
  char* err = nullptr;
  const int rc = sqlite3_exec(db_, sql.c_str(), nullptr, nullptr, &err);
  if (rc != SQLITE_OK) {
    std::string msg = err ? err : sqlite3_errstr(rc);
    sqlite3_free(err);
    throw StoreError(sql.substr(0, 60) + ": " + msg);
  }
}

void SqliteStore::migrate() {
  std::lock_guard lock(mu_);
  Tx tx(db_, true);
  exec(kSchema);
  tx.commit();
}

void SqliteStore::put_user(const User& u) {
  std::lock_guard lock(mu_);
  Tx tx(db_, true);
  Stmt(db_,
       "INSERT INTO users(user_id, display_name, auth_token_hash) VALUES (?1, ?2, ?3) "
       "ON CONFLICT(user_id) DO UPDATE SET display_name = excluded.display_name, "
       "auth_token_hash = excluded.auth_token_hash")
      .bind(1, u.user_id)
      .bind(2, u.display_name)
      .bind(3, u.auth_token_hash)
      .run();
  Stmt(db_, "DELETE FROM user_missions WHERE user_id = ?1").bind(1, u.user_id).run();
  for (Id m : u.mission_ids)
    Stmt(db_, "INSERT OR IGNORE INTO user_missions(user_id, mission_id) VALUES (?1, ?2)")
        .bind(1, u.user_id)
        .bind(2, m)
        .run();
  tx.commit();
}

std::vector<Id> SqliteStore::user_missions_locked(const std::string& user_id) {
  std::vector<Id> ids;
  Stmt s(db_, "SELECT mission_id FROM user_missions WHERE user_id = ?1 ORDER BY mission_id");
  s.bind(1, user_id);
  while (s.step()) ids.push_back(s.i64(0));
  return ids;
}

std::optional<User> SqliteStore::user(const std::string& user_id) {
  std::lock_guard lock(mu_);
  Stmt s(db_, "SELECT user_id, display_name, auth_token_hash FROM users WHERE user_id = ?1");
  s.bind(1, user_id);
  if (!s.step()) return std::nullopt;
  User u{s.text(0), s.text(1), s.text(2), {}};
  u.mission_ids = user_missions_locked(u.user_id);
  return u;
}

std::optional<User> SqliteStore::user_by_token_hash(const std::string& hash) {
  std::string id;
  {
    std::lock_guard lock(mu_);
    Stmt s(db_, "SELECT user_id FROM users WHERE auth_token_hash = ?1");
    s.bind(1, hash);
    if (!s.step()) return std::nullopt;
    id = s.text(0);
  }
  return user(id);
}

void SqliteStore::put_drone(const Drone& d) {
  std::lock_guard lock(mu_);
  Stmt(db_,
       "INSERT INTO drones(drone_id, secret_token, label, mission_id) VALUES (?1, ?2, ?3, ?4) "
       "ON CONFLICT(drone_id) DO UPDATE SET secret_token = excluded.secret_token, label = excluded.label, "
       "mission_id = excluded.mission_id")
      .bind(1, d.drone_id)
      .bind(2, d.secret_token)
      .bind(3, d.label)
      .bind(4, d.mission_id)
      .run();
}

std::optional<Drone> SqliteStore::drone(const std::string& drone_id) {
  std::lock_guard lock(mu_);
  Stmt s(db_, "SELECT drone_id, secret_token, label, mission_id FROM drones WHERE drone_id = ?1");
  s.bind(1, drone_id);
  if (!s.step()) return std::nullopt;
  return Drone{s.text(0), s.text(1), s.text(2), s.opt_i64(3)};
}

Id SqliteStore::put_mission(const Mission& m) {
  std::lock_guard lock(mu_);
  Tx tx(db_, true);
  Id id = m.mission_id;
  if (id == 0) {
    Stmt(db_, "INSERT INTO missions(name, status) VALUES (?1, ?2)")
        .bind(1, m.name)
        .bind(2, to_string(m.status))
        .run();
    id = sqlite3_last_insert_rowid(db_);
  } else {
    Stmt(db_,
         "INSERT INTO missions(mission_id, name, status) VALUES (?1, ?2, ?3) "
         "ON CONFLICT(mission_id) DO UPDATE SET name = excluded.name, status = excluded.status")
        .bind(1, id)
        .bind(2, m.name)
        .bind(3, to_string(m.status))
        .run();
  }
  for (const auto& d : m.drone_ids) {
    Stmt s(db_, "UPDATE drones SET mission_id = ?1 WHERE drone_id = ?2");
    s.bind(1, id).bind(2, d).run();
    if (sqlite3_changes(db_) == 0) throw NotFound("unknown drone " + d);
  }
  for (const auto& u : m.user_ids)
    Stmt(db_, "INSERT OR IGNORE INTO user_missions(user_id, mission_id) VALUES (?1, ?2)").bind(1, u).bind(2, id).run();
  tx.commit();
  return id;
}

std::optional<Mission> SqliteStore::mission_locked(Id mission_id) {
  Stmt s(db_, "SELECT mission_id, name, status FROM missions WHERE mission_id = ?1");
  s.bind(1, mission_id);
  if (!s.step()) return std::nullopt;
  Mission m;
  m.mission_id = s.i64(0);
  m.name = s.text(1);
  m.status = parse_or_throw(parse_mission_status(s.text(2)), "mission status");
  Stmt d(db_, "SELECT drone_id FROM drones WHERE mission_id = ?1 ORDER BY drone_id");
  d.bind(1, mission_id);
  while (d.step()) m.drone_ids.push_back(d.text(0));
  Stmt u(db_, "SELECT user_id FROM user_missions WHERE mission_id = ?1 ORDER BY user_id");
  u.bind(1, mission_id);
  while (u.step()) m.user_ids.push_back(u.text(0));
  Stmt r(db_, "SELECT rule_id FROM rules WHERE mission_id = ?1 ORDER BY rule_id");
  r.bind(1, mission_id);
  while (r.step()) m.rule_ids.push_back(r.i64(0));
  return m;
}

std::optional<Mission> SqliteStore::mission(Id mission_id) {
  std::lock_guard lock(mu_);
  return mission_locked(mission_id);
}

void SqliteStore::set_mission_status(Id mission_id, MissionStatus status) {
  std::lock_guard lock(mu_);
  Stmt(db_, "UPDATE missions SET status = ?1 WHERE mission_id = ?2").bind(1, to_string(status)).bind(2, mission_id).run();
  if (sqlite3_changes(db_) == 0) throw NotFound("unknown mission " + std::to_string(mission_id));
}

Rule SqliteStore::upsert_rule(const Rule& r) {
  if (auto err = check_rule(r)) throw ContractError(*err);
  const std::string classes = nlohmann::json(r.target_classes).dump();
  std::lock_guard lock(mu_);
  Tx tx(db_, true);
  Rule out = r;
  if (r.rule_id == 0) {
    Stmt(db_,
         "INSERT INTO rules(mission_id, target_classes, min_confidence, severity, prompt_template, enabled) "
         "VALUES (?1, ?2, ?3, ?4, ?5, ?6)")
        .bind(1, r.mission_id)
        .bind(2, classes)
        .bind(3, r.min_confidence)
        .bind(4, to_string(r.severity))
        .bind(5, r.prompt_template)
        .bind(6, r.enabled)
        .run();
    out.rule_id = sqlite3_last_insert_rowid(db_);
  } else {
    Stmt s(db_, "SELECT mission_id FROM rules WHERE rule_id = ?1");
    s.bind(1, r.rule_id);
    if (!s.step()) throw NotFound("unknown rule " + std::to_string(r.rule_id));
    if (s.i64(0) != r.mission_id) throw ContractError("rule " + std::to_string(r.rule_id) + " cannot change mission");
    Stmt(db_,
         "UPDATE rules SET target_classes = ?2, min_confidence = ?3, severity = ?4, prompt_template = ?5, "
         "enabled = ?6 WHERE rule_id = ?1")
        .bind(1, r.rule_id)
        .bind(2, classes)
        .bind(3, r.min_confidence)
        .bind(4, to_string(r.severity))
        .bind(5, r.prompt_template)
        .bind(6, r.enabled)
        .run();
  }
  tx.commit();
  return out;
}

namespace {

constexpr const char* kRuleColumns =
    "rule_id, mission_id, target_classes, min_confidence, severity, prompt_template, enabled";

Rule read_rule_row(const auto& s) {
  Rule r;
  r.rule_id = s.i64(0);
  r.mission_id = s.i64(1);
  r.target_classes = nlohmann::json::parse(s.text(2)).template get<std::set<std::string>>();
  r.min_confidence = s.f64(3);
  r.severity = parse_or_throw(parse_severity(s.text(4)), "severity");
  r.prompt_template = s.text(5);
  r.enabled = s.i64(6) != 0;
  return r;
}

}  // namespace

std::optional<Rule> SqliteStore::rule(Id rule_id) {
  std::lock_guard lock(mu_);
  Stmt s(db_, (std::string("SELECT ") + kRuleColumns + " FROM rules WHERE rule_id = ?1").c_str());
  s.bind(1, rule_id);
  if (!s.step()) return std::nullopt;
  return read_rule_row(s);
}

std::vector<Rule> SqliteStore::rules_for_mission(Id mission_id) {
  std::lock_guard lock(mu_);
  Stmt s(db_, (std::string("SELECT ") + kRuleColumns + " FROM rules WHERE mission_id = ?1 ORDER BY rule_id").c_str());
  s.bind(1, mission_id);
  std::vector<Rule> out;
  while (s.step()) out.push_back(read_rule_row(s));
  return out;
}

void SqliteStore::record_upload(UploadBatch& batch) {
  if (batch.alerts.size() != batch.detections.size())
    throw ContractError("record_upload needs one alert list per detection");
  std::lock_guard lock(mu_);
  Tx tx(db_, true);
  for (std::size_t i = 0; i < batch.detections.size(); ++i) {
    auto& d = batch.detections[i];
    const auto& o = d.object;
    Stmt(db_,
         "INSERT INTO detections(drone_id, mission_id, class_label, confidence, center_x, center_y, width, height, "
         "orientation_deg, capture_ts_ms, image_ref) VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7, ?8, ?9, ?10, ?11)")
        .bind(1, d.drone_id)
        .bind(2, d.mission_id)
        .bind(3, o.class_label)
        .bind(4, o.confidence)
        .bind(5, o.center_x)
        .bind(6, o.center_y)
        .bind(7, o.width)
        .bind(8, o.height)
        .bind(9, o.orientation_deg)
        .bind(10, d.capture_ts_ms)
        .bind(11, d.image_ref)
        .run();
    d.detection_id = sqlite3_last_insert_rowid(db_);
    for (auto& a : batch.alerts[i]) {
      a.detection_id = d.detection_id;
      Stmt(db_,
           "INSERT INTO alerts(alert_type, severity, message, timestamp_ms, status, detection_id, rule_id, "
           "analysis_text) VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7, ?8)")
          .bind(1, to_string(a.alert_type))
          .bind(2, to_string(a.severity))
          .bind(3, a.message)
          .bind(4, a.timestamp_ms)
          .bind(5, to_string(a.status))
          .bind(6, a.detection_id)
          .bind(7, a.rule_id)
          .bind(8, a.analysis_text)
          .run();
      a.alert_id = sqlite3_last_insert_rowid(db_);
    }
  }
  tx.commit();
}

std::optional<Detection> SqliteStore::detection(Id detection_id) {
  std::lock_guard lock(mu_);
  Stmt s(db_,
         "SELECT detection_id, drone_id, mission_id, class_label, confidence, center_x, center_y, width, height, "
         "orientation_deg, capture_ts_ms, image_ref FROM detections WHERE detection_id = ?1");
  s.bind(1, detection_id);
  if (!s.step()) return std::nullopt;
  Detection d;
  d.detection_id = s.i64(0);
  d.drone_id = s.text(1);
  d.mission_id = s.i64(2);
  d.object = ObjectObservation{s.text(3), s.f64(4), s.f64(5), s.f64(6), s.f64(7), s.f64(8), s.f64(9)};
  d.capture_ts_ms = s.i64(10);
  d.image_ref = s.text(11);
  return d;
}

void SqliteStore::set_analysis(const std::vector<Id>& alert_ids, const std::string& text) {
  std::lock_guard lock(mu_);
  Tx tx(db_, true);
  for (Id id : alert_ids) Stmt(db_, "UPDATE alerts SET analysis_text = ?1 WHERE alert_id = ?2").bind(1, text).bind(2, id).run();
  tx.commit();
}

namespace {

constexpr const char* kAlertSelect =
    "SELECT a.alert_id, a.alert_type, a.severity, a.message, a.timestamp_ms, a.status, a.detection_id, a.rule_id, "
    "a.analysis_text, d.drone_id, d.mission_id FROM alerts a LEFT JOIN detections d "
    "ON a.detection_id = d.detection_id ";

AlertRecord read_alert_row(const auto& s) {
  AlertRecord r;
  auto& a = r.alert;
  a.alert_id = s.i64(0);
  a.alert_type = parse_or_throw(parse_alert_type(s.text(1)), "alert type");
  a.severity = parse_or_throw(parse_severity(s.text(2)), "severity");
  a.message = s.text(3);
  a.timestamp_ms = s.i64(4);
  a.status = parse_or_throw(parse_alert_status(s.text(5)), "alert status");
  a.detection_id = s.opt_i64(6);
  a.rule_id = s.opt_i64(7);
  a.analysis_text = s.opt_text(8);
  r.drone_id = s.text(9);
  r.mission_id = s.opt_i64(10);
  return r;
}

}  // namespace

std::optional<AlertRecord> SqliteStore::alert_locked(Id alert_id) {
  Stmt s(db_, (std::string(kAlertSelect) + "WHERE a.alert_id = ?1").c_str());
  s.bind(1, alert_id);
  if (!s.step()) return std::nullopt;
  return read_alert_row(s);
}

std::optional<AlertRecord> SqliteStore::alert(Id alert_id) {
  std::lock_guard lock(mu_);
  return alert_locked(alert_id);
}

AlertRecord SqliteStore::transition_alert(Id alert_id, AlertAction action, const std::string& actor,
                                          std::int64_t now_ms) {
  std::lock_guard lock(mu_);
  // IMMEDIATE takes the write lock before the read, so two connections can
  // never both see "open" and both acknowledge.
  Tx tx(db_, true);
  auto current = alert_locked(alert_id);
  if (!current) throw NotFound("unknown alert " + std::to_string(alert_id));
  const Alert next = uavlink::transition_alert(current->alert, action);
  Stmt(db_, "UPDATE alerts SET status = ?1 WHERE alert_id = ?2").bind(1, to_string(next.status)).bind(2, alert_id).run();
  Stmt(db_,
       "INSERT INTO alert_transitions(alert_id, from_status, to_status, actor, timestamp_ms) "
       "VALUES (?1, ?2, ?3, ?4, ?5)")
      .bind(1, alert_id)
      .bind(2, to_string(current->alert.status))
      .bind(3, to_string(next.status))
      .bind(4, actor)
      .bind(5, now_ms)
      .run();
  tx.commit();
  current->alert = next;
  return *current;
}

std::vector<AlertRecord> SqliteStore::alerts_for_mission(Id mission_id) {
  std::lock_guard lock(mu_);
  Stmt s(db_, (std::string(kAlertSelect) + "WHERE d.mission_id = ?1 ORDER BY a.alert_id").c_str());
  s.bind(1, mission_id);
  std::vector<AlertRecord> out;
  while (s.step()) out.push_back(read_alert_row(s));
  return out;
}

std::vector<AlertTransitionRecord> SqliteStore::alert_history(Id alert_id) {
  std::lock_guard lock(mu_);
  Stmt s(db_,
         "SELECT alert_id, from_status, to_status, actor, timestamp_ms FROM alert_transitions "
         "WHERE alert_id = ?1 ORDER BY id");
  s.bind(1, alert_id);
  std::vector<AlertTransitionRecord> out;
  while (s.step())
    out.push_back({s.i64(0), parse_or_throw(parse_alert_status(s.text(1)), "status"),
                   parse_or_throw(parse_alert_status(s.text(2)), "status"), s.text(3), s.i64(4)});
  return out;
}

StoreCounts SqliteStore::counts() {
  std::lock_guard lock(mu_);
  auto count = [&](const char* table) {
    Stmt s(db_, (std::string("SELECT COUNT(*) FROM ") + table).c_str());
    s.step();
    return s.i64(0);
  };
  return StoreCounts{count("users"), count("drones"), count("missions"), count("rules"), count("detections"),
                     count("alerts")};
}

IntegrityReport SqliteStore::check_integrity() {
  std::lock_guard lock(mu_);
  auto scalar = [&](const char* sql) {
    Stmt s(db_, sql);
    s.step();
    return s.i64(0);
  };
  IntegrityReport r;
  r.detections_without_drone =
      scalar("SELECT COUNT(*) FROM detections d LEFT JOIN drones x ON d.drone_id = x.drone_id WHERE x.drone_id IS NULL");
  r.detections_without_mission = scalar(
      "SELECT COUNT(*) FROM detections d LEFT JOIN missions m ON d.mission_id = m.mission_id "
      "WHERE m.mission_id IS NULL");
  r.alerts_without_detection = scalar(
      "SELECT COUNT(*) FROM alerts a LEFT JOIN detections d ON a.detection_id = d.detection_id "
      "WHERE a.alert_type = 'detection' AND d.detection_id IS NULL");
  r.alerts_without_rule = scalar(
      "SELECT COUNT(*) FROM alerts a LEFT JOIN rules x ON a.rule_id = x.rule_id "
      "WHERE a.alert_type = 'detection' AND x.rule_id IS NULL");
  r.rules_without_mission = scalar(
      "SELECT COUNT(*) FROM rules x LEFT JOIN missions m ON x.mission_id = m.mission_id WHERE m.mission_id IS NULL");
  r.drones_without_mission = scalar(
      "SELECT COUNT(*) FROM drones x LEFT JOIN missions m ON x.mission_id = m.mission_id "
      "WHERE x.mission_id IS NOT NULL AND m.mission_id IS NULL");
  r.memberships_dangling = scalar(
      "SELECT COUNT(*) FROM user_missions um LEFT JOIN users u ON um.user_id = u.user_id "
      "LEFT JOIN missions m ON um.mission_id = m.mission_id WHERE u.user_id IS NULL OR m.mission_id IS NULL");
  Stmt fk(db_, "PRAGMA foreign_key_check");
  while (fk.step()) r.foreign_key_violations.push_back(fk.text(0) + " row " + std::to_string(fk.i64(1)) + " -> " + fk.text(2));
  return r;
}

}  // namespace uavlink::server
