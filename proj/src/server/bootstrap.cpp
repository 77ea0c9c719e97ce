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

#include "uavlink/server/bootstrap.hpp"

#include <algorithm>

#include "uavlink/server/auth.hpp"

namespace uavlink::server {

Provisioned provision_from_scenario(Store& store, const Scenario& scenario, const std::string& operator_id,
                                    const std::string& operator_token) {
  Provisioned out;
  auto existing = store.drone(scenario.drone_id);
  if (existing && existing->mission_id) {
    existing->secret_token = scenario.drone_token;
    store.put_drone(*existing);
    out.mission_id = *existing->mission_id;
    out.rules = store.rules_for_mission(out.mission_id);
  } else {
    store.put_drone(Drone{scenario.drone_id, scenario.drone_token, scenario.drone_id, std::nullopt});
    out.mission_id = store.put_mission(Mission{0, scenario.name, {scenario.drone_id}, {}, {}, MissionStatus::kActive});
    for (auto rule : scenario.rules) {
      rule.rule_id = 0;
      rule.mission_id = out.mission_id;
      out.rules.push_back(store.upsert_rule(rule));
    }
    out.created = true;
  }
  auto user = store.user(operator_id).value_or(User{operator_id, operator_id, "", {}});
  user.auth_token_hash = sha256_hex(operator_token);
  if (std::find(user.mission_ids.begin(), user.mission_ids.end(), out.mission_id) == user.mission_ids.end())
    user.mission_ids.push_back(out.mission_id);
  store.put_user(user);
  return out;
}

}  // namespace uavlink::server
