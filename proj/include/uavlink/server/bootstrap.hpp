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

#include <string>
#include <vector>

#include "uavlink/scenario/scenario.hpp"
#include "uavlink/server/store.hpp"

namespace uavlink::server {

struct Provisioned {
  Id mission_id = 0;
  std::vector<Rule> rules;
  bool created = false;
};

/// Registers the scenario's drone, an active mission with its rules, and an
/// operator account. Safe to repeat against a persistent store: a drone that
/// already belongs to a mission keeps it and its rules.
Provisioned provision_from_scenario(Store& store, const Scenario& scenario, const std::string& operator_id,
                                    const std::string& operator_token);

}  // namespace uavlink::server
