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
#include <span>
#include <string>
#include <vector>

#include "uavlink/domain/types.hpp"

namespace uavlink {

/// Enabled rules whose target classes contain the detection's class and whose
/// threshold the confidence meets, sorted by ascending rule_id.
/// Throws ContractError if a rule belongs to a different mission.
std::vector<Rule> match_rules(const Detection& d, std::span<const Rule> rules);

/// One open detection alert for (d, r). Throws ContractError unless r matches d.
Alert generate_alert(const Detection& d, const Rule& r, std::int64_t now_ms);

/// Alerts for every rule matching d, in rule_id order.
std::vector<Alert> generate_alerts(const Detection& d, std::span<const Rule> rules, std::int64_t now_ms);

struct RenderedPrompt {
  std::string text;
  /// Placeholders that were left verbatim, e.g. "{altitude}".
  std::vector<std::string> unknown_placeholders;
};

RenderedPrompt render_prompt(const Rule& r, const Detection& d);

/// Shortest decimal that round-trips, e.g. 0.72 -> "0.72".
std::string format_confidence(double value);

/// open -> acknowledged -> resolved; anything else throws IllegalTransition.
Alert transition_alert(const Alert& a, AlertAction action);

/// The rule whose prompt drives contextual analysis: highest severity, then
/// lowest rule_id. `rules` must be non-empty.
const Rule& analysis_rule(std::span<const Rule> rules);

}  // namespace uavlink
