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
#include <filesystem>
#include <istream>
#include <optional>
#include <stdexcept>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "uavlink/core/time.hpp"

namespace uavlink::sim {

/// One line of trace.log:
///
///   id=<n> t=<microseconds> ev=<kind> (<key>=<value>)*
///
/// Values are percent-encoded for ' ', '=', '%' and control characters.
struct TraceEvent {
  std::uint64_t id = 0;
  std::int64_t t_us = 0;
  std::string kind;
  std::vector<std::pair<std::string, std::string>> fields;

  std::optional<std::string_view> get(std::string_view key) const;
  std::string str(std::string_view key, std::string_view fallback = {}) const;
  std::int64_t num(std::string_view key, std::int64_t fallback = 0) const;
  double real(std::string_view key, double fallback = 0.0) const;
  bool has(std::string_view key) const { return get(key).has_value(); }
};

class TraceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TraceLog {
 public:
  using Fields = std::vector<std::pair<std::string, std::string>>;

  void record(SimTime t, std::string kind, Fields fields);
  const std::vector<TraceEvent>& events() const { return events_; }
  std::vector<TraceEvent>& mutable_events() { return events_; }

  void write(std::ostream& out) const;
  void write_file(const std::filesystem::path& path) const;
  static TraceLog parse(std::istream& in);
  static TraceLog load(const std::filesystem::path& path);

 private:
  std::vector<TraceEvent> events_;
};

std::string format_event(const TraceEvent& e);

/// Helpers for building field lists.
std::pair<std::string, std::string> kv(std::string key, std::string value);
std::pair<std::string, std::string> kv(std::string key, std::string_view value);
std::pair<std::string, std::string> kv(std::string key, const char* value);
std::pair<std::string, std::string> kv(std::string key, std::int64_t value);
std::pair<std::string, std::string> kv(std::string key, std::uint64_t value);
std::pair<std::string, std::string> kv(std::string key, int value);
std::pair<std::string, std::string> kv(std::string key, double value);
std::pair<std::string, std::string> kv(std::string key, bool value);

struct InvariantResult {
  std::string name;
  bool passed = true;
  std::uint64_t checked = 0;
  /// "event <id>: <what>" for each violation, capped.
  std::vector<std::string> failures;
  std::uint64_t failure_count = 0;
};

enum class Invariant { kGating, kOrdering, kThroughput, kReferential };

/// Evaluates the invariant suite over a trace. Empty `only` runs everything.
std::vector<InvariantResult> check_trace(const TraceLog& trace, const std::vector<Invariant>& only = {});

}  // namespace uavlink::sim
