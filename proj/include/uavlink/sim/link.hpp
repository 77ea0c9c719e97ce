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
#include <deque>
#include <functional>
#include <optional>
#include <random>
#include <string>

#include "uavlink/core/event_loop.hpp"
#include "uavlink/scenario/scenario.hpp"
#include "uavlink/sim/trace.hpp"

namespace uavlink::sim {

/// A message on the wire plus the fields it contributes to trace events.
struct Packet {
  std::string wire;
  TraceLog::Fields fields;
  std::uint64_t seq = 0;
};

struct LinkStats {
  std::uint64_t messages = 0;
  std::uint64_t bytes = 0;
  std::uint64_t lost = 0;
};

/// One direction of a simulated connection.
///
/// Time on the link is bytes*8/bandwidth for serialization, then latency plus
/// uniform jitter in flight. Arrivals never overtake earlier packets. The link
/// pulls from its source whenever the transmitter is idle, so the sender's own
/// queue decides what is dropped under backpressure.
class SimLink {
 public:
  using Source = std::function<std::optional<Packet>()>;
  using Sink = std::function<void(Packet)>;

  SimLink(std::string name, EventLoop& loop, TraceLog& trace, LinkParams params, std::uint64_t seed);

  void set_source(Source s) { source_ = std::move(s); }
  void set_sink(Sink s) { sink_ = std::move(s); }
  void set_params(const LinkParams& p) { params_ = p; }
  const LinkParams& params() const { return params_; }

  /// Asks the link to pull if it is idle. Safe to call from inside callbacks;
  /// the pull happens on a fresh event.
  void kick();

  /// Drops everything in flight and stops pulling until brought up again.
  void down();
  void up();
  bool is_up() const { return up_; }

  const std::string& name() const { return name_; }
  const LinkStats& stats() const { return stats_; }
  bool idle() const { return !busy_ && in_flight_.empty(); }

 private:
  void pull();

  std::string name_;
  EventLoop& loop_;
  TraceLog& trace_;
  LinkParams params_;
  std::mt19937_64 rng_;
  Source source_;
  Sink sink_;
  bool up_ = false;
  bool busy_ = false;
  bool kick_pending_ = false;
  std::uint64_t epoch_ = 0;
  SimTime last_arrival_{0};
  std::deque<std::uint64_t> in_flight_;
  LinkStats stats_;
};

}  // namespace uavlink::sim
