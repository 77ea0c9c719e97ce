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

#include <gtest/gtest.h>

#include <atomic>
#include <filesystem>
#include <thread>

#include <unistd.h>

#include "support/generators.hpp"
#include "uavlink/server/auth.hpp"
#include "uavlink/server/bootstrap.hpp"
#include "uavlink/server/object_store.hpp"
#include "uavlink/server/sqlite_store.hpp"

namespace uavlink::server {
namespace {

namespace fs = std::filesystem;

fs::path temp_dir(const std::string& name) {
  auto p = fs::temp_directory_path() / ("uavlink-" + name + "-" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

struct Seeded {
  Id mission = 0;
  Rule person;
  Rule car;
};

Seeded seed(Store& s) {
  Seeded out;
  s.put_drone(Drone{"drone-1", "secret", "alpha", std::nullopt});
  out.mission = s.put_mission(Mission{0, "m", {"drone-1"}, {}, {}, MissionStatus::kActive});
  s.put_user(User{"op", "Operator", "hash-op", {out.mission}});
  out.person = s.upsert_rule(Rule{0, out.mission, {"person"}, 0.5, Severity::kWarning, "p {class}", true});
  out.car = s.upsert_rule(Rule{0, out.mission, {"car", "person"}, 0.7, Severity::kCritical, "c {confidence}", true});
  return out;
}

Detection detection(Id mission, const std::string& cls, double conf) {
  Detection d;
  d.drone_id = "drone-1";
  d.mission_id = mission;
  d.object.class_label = cls;
  d.object.confidence = conf;
  d.capture_ts_ms = 1000;
  d.image_ref = "mem://x";
  return d;
}

TEST(SqliteStore, RoundTripsEntities) {
  SqliteStore s(":memory:");
  const auto seeded = seed(s);
  const auto m = s.mission(seeded.mission);
  ASSERT_TRUE(m);
  EXPECT_EQ(m->drone_ids, std::vector<std::string>{"drone-1"});
  EXPECT_EQ(m->user_ids, std::vector<std::string>{"op"});
  EXPECT_EQ(m->rule_ids, (std::vector<Id>{seeded.person.rule_id, seeded.car.rule_id}));
  EXPECT_EQ(s.drone("drone-1")->mission_id, seeded.mission);
  EXPECT_EQ(s.user_by_token_hash("hash-op")->user_id, "op");
  EXPECT_EQ(s.rule(seeded.car.rule_id), seeded.car);
  EXPECT_EQ(s.rules_for_mission(seeded.mission), (std::vector<Rule>{seeded.person, seeded.car}));

  auto updated = seeded.person;
  updated.min_confidence = 0.9;
  updated.enabled = false;
  EXPECT_EQ(s.upsert_rule(updated), updated);
  EXPECT_EQ(s.rule(updated.rule_id), updated);
}

TEST(SqliteStore, ForeignKeysRejectDanglingWrites) {
  SqliteStore s(":memory:");
  const auto seeded = seed(s);
  const auto before = s.counts();

  UploadBatch bad;
  bad.detections.push_back(detection(seeded.mission, "person", 0.9));
  bad.detections.push_back(detection(seeded.mission, "person", 0.9));
  bad.detections.back().drone_id = "ghost";
  bad.alerts.resize(2);
  EXPECT_THROW(s.record_upload(bad), NotFound);

  UploadBatch bad_rule;
  bad_rule.detections.push_back(detection(seeded.mission, "person", 0.9));
  Alert a;
  a.rule_id = 9999;
  bad_rule.alerts.push_back({a});
  EXPECT_THROW(s.record_upload(bad_rule), NotFound);

  EXPECT_THROW(s.upsert_rule(Rule{0, 4242, {"x"}, 0.1, Severity::kInfo, "", true}), NotFound);
  EXPECT_THROW(s.put_user(User{"u2", "U", "h2", {4242}}), NotFound);
  EXPECT_THROW(s.put_drone(Drone{"d2", "t", "l", 4242}), NotFound);
  EXPECT_THROW(s.put_mission(Mission{0, "m2", {"ghost"}, {}, {}, MissionStatus::kPlanned}), NotFound);

  const auto after = s.counts();
  EXPECT_EQ(after.detections, before.detections);
  EXPECT_EQ(after.alerts, before.alerts);
  EXPECT_EQ(after.users, before.users);
  EXPECT_EQ(after.missions, before.missions);
  EXPECT_TRUE(s.check_integrity().ok());
}

TEST(SqliteStore, RecordUploadAssignsIds) {
  SqliteStore s(":memory:");
  const auto seeded = seed(s);
  UploadBatch b;
  for (int i = 0; i < 3; ++i) {
    b.detections.push_back(detection(seeded.mission, "person", 0.8));
    Alert a1, a2;
    a1.rule_id = seeded.person.rule_id;
    a2.rule_id = seeded.car.rule_id;
    b.alerts.push_back({a1, a2});
  }
  s.record_upload(b);
  std::set<Id> ids;
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_GT(b.detections[i].detection_id, 0);
    for (const auto& a : b.alerts[i]) {
      EXPECT_EQ(a.detection_id, b.detections[i].detection_id);
      ids.insert(a.alert_id);
    }
  }
  EXPECT_EQ(ids.size(), 6u);
  EXPECT_EQ(s.alerts_for_mission(seeded.mission).size(), 6u);
  EXPECT_EQ(s.detection(b.detections[1].detection_id), b.detections[1]);
  s.set_analysis(std::vector<Id>(ids.begin(), ids.end()), "looks like a hiker");
  for (const auto& r : s.alerts_for_mission(seeded.mission)) EXPECT_EQ(r.alert.analysis_text, "looks like a hiker");
}

TEST(SqliteStore, TransitionsFollowLifecycleAndRecordHistory) {
  SqliteStore s(":memory:");
  const auto seeded = seed(s);
  UploadBatch b;
  b.detections.push_back(detection(seeded.mission, "person", 0.8));
  Alert a;
  a.rule_id = seeded.person.rule_id;
  b.alerts.push_back({a});
  s.record_upload(b);
  const Id id = b.alerts[0][0].alert_id;

  EXPECT_THROW(s.transition_alert(id, AlertAction::kResolve, "op", 1), IllegalTransition);
  EXPECT_EQ(s.transition_alert(id, AlertAction::kAcknowledge, "op", 2).alert.status, AlertStatus::kAcknowledged);
  EXPECT_THROW(s.transition_alert(id, AlertAction::kAcknowledge, "op", 3), IllegalTransition);
  EXPECT_EQ(s.transition_alert(id, AlertAction::kResolve, "op", 4).alert.status, AlertStatus::kResolved);
  EXPECT_THROW(s.transition_alert(id, AlertAction::kResolve, "op", 5), IllegalTransition);
  EXPECT_THROW(s.transition_alert(777, AlertAction::kAcknowledge, "op", 6), NotFound);

  const auto h = s.alert_history(id);
  ASSERT_EQ(h.size(), 2u);
  EXPECT_EQ(h[0].from, AlertStatus::kOpen);
  EXPECT_EQ(h[0].to, AlertStatus::kAcknowledged);
  EXPECT_EQ(h[1].to, AlertStatus::kResolved);
  EXPECT_EQ(h[1].timestamp_ms, 4);
}

TEST(SqliteStore, ConcurrentAcknowledgeSucceedsExactlyOnce) {
  const auto dir = temp_dir("concurrent");
  const auto path = (dir / "store.db").string();
  Id alert_id = 0;
  {
    SqliteStore s(path);
    const auto seeded = seed(s);
    UploadBatch b;
    b.detections.push_back(detection(seeded.mission, "person", 0.8));
    Alert a;
    a.rule_id = seeded.person.rule_id;
    b.alerts.push_back({a});
    s.record_upload(b);
    alert_id = b.alerts[0][0].alert_id;
  }

  constexpr int kThreads = 100;
  std::atomic<int> ok{0}, illegal{0}, other{0};
  std::atomic<bool> go{false};
  std::vector<std::unique_ptr<SqliteStore>> conns;
  for (int i = 0; i < 10; ++i) conns.push_back(std::make_unique<SqliteStore>(path));
  std::vector<std::thread> threads;
  for (int i = 0; i < kThreads; ++i) {
    threads.emplace_back([&, i] {
      while (!go) std::this_thread::yield();
      try {
        conns[static_cast<std::size_t>(i % 10)]->transition_alert(alert_id, AlertAction::kAcknowledge,
                                                                  "op" + std::to_string(i), i);
        ++ok;
      } catch (const IllegalTransition&) {
        ++illegal;
      } catch (...) {
        ++other;
      }
    });
  }
  go = true;
  for (auto& t : threads) t.join();
  EXPECT_EQ(ok, 1);
  EXPECT_EQ(illegal, kThreads - 1);
  EXPECT_EQ(other, 0);
  EXPECT_EQ(conns[0]->alert_history(alert_id).size(), 1u);
  EXPECT_EQ(conns[3]->alert(alert_id)->alert.status, AlertStatus::kAcknowledged);
  conns.clear();
  fs::remove_all(dir);
}

TEST(SqliteStore, IntegritySweepFindsDanglingRows) {
  SqliteStore s(":memory:");
  const auto seeded = seed(s);
  EXPECT_TRUE(s.check_integrity().ok());
  s.exec("PRAGMA foreign_keys = OFF");
  s.exec("INSERT INTO detections(drone_id, mission_id, class_label, confidence, center_x, center_y, width, height, "
         "orientation_deg, capture_ts_ms, image_ref) VALUES ('ghost', " +
         std::to_string(seeded.mission) + ", 'person', 0.5, 0.5, 0.5, 0.1, 0.1, 0, 0, 'x')");
  s.exec("INSERT INTO alerts(alert_type, severity, message, timestamp_ms, status, detection_id, rule_id) "
         "VALUES ('detection', 'info', 'm', 0, 'open', 999, 998)");
  const auto r = s.check_integrity();
  EXPECT_FALSE(r.ok());
  EXPECT_EQ(r.detections_without_drone, 1);
  EXPECT_EQ(r.alerts_without_detection, 1);
  EXPECT_EQ(r.alerts_without_rule, 1);
  EXPECT_EQ(r.foreign_key_violations.size(), 3u);
}

TEST(SqliteStore, RejectsInvalidRules) {
  SqliteStore s(":memory:");
  const auto seeded = seed(s);
  EXPECT_THROW(s.upsert_rule(Rule{0, seeded.mission, {"x"}, 1.5, Severity::kInfo, "", true}), ContractError);
  EXPECT_THROW(s.upsert_rule(Rule{0, seeded.mission, {}, 0.5, Severity::kInfo, "", true}), ContractError);
  EXPECT_THROW(s.upsert_rule(Rule{12345, seeded.mission, {"x"}, 0.5, Severity::kInfo, "", true}), NotFound);
}

TEST(ObjectStore, MemoryAndLocalRoundTrip) {
  testing::Gen g(5);
  const Bytes data = g.bytes(1, 100'000);
  MemoryObjectStore mem;
  const auto ref = mem.put("drone-1/1.jpg", data);
  EXPECT_EQ(mem.get(ref), data);
  EXPECT_FALSE(mem.get("mem://nope"));

  const auto dir = temp_dir("objects");
  LocalObjectStore local(dir);
  const auto lref = local.put("drone-1/2.jpg", data);
  EXPECT_EQ(local.get(lref), data);
  EXPECT_THROW(local.put("../escape", data), std::invalid_argument);
  fs::remove_all(dir);
}

TEST(Bootstrap, ProvisionsOnceAndReusesMission) {
  const auto dir = temp_dir("bootstrap");
  const auto scenario = parse_scenario(R"(
schema: 1
name: patrol
drone: {id: hawk-7, token: hawk-secret}
rules:
  - {targets: [person], min_confidence: 0.5, severity: critical}
  - {targets: [car, truck], min_confidence: 0.7, severity: warning}
)");
  Id mission = 0;
  {
    SqliteStore s((dir / "db.sqlite").string());
    const auto p = provision_from_scenario(s, scenario, "op", "op-token");
    EXPECT_TRUE(p.created);
    ASSERT_EQ(p.rules.size(), 2u);
    mission = p.mission_id;
    EXPECT_EQ(s.drone("hawk-7")->mission_id, mission);
    EXPECT_EQ(s.mission(mission)->status, MissionStatus::kActive);
    EXPECT_EQ(s.user_by_token_hash(sha256_hex("op-token"))->user_id, "op");
  }
  SqliteStore s((dir / "db.sqlite").string());
  const auto again = provision_from_scenario(s, scenario, "op", "op-token");
  EXPECT_FALSE(again.created);
  EXPECT_EQ(again.mission_id, mission);
  EXPECT_EQ(s.rules_for_mission(mission).size(), 2u);
  EXPECT_EQ(s.counts().missions, 1);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace uavlink::server
