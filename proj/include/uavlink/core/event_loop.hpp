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
#include <functional>
#include <optional>
#include <queue>
#include <vector>

#include "uavlink/core/time.hpp"

namespace uavlink {

/// Single-threaded discrete-event scheduler. Events with equal timestamps run
/// in the order they were scheduled, which keeps whole runs deterministic.
class EventLoop {
 public:
  using Task = std::function<void()>;

  SimTime now() const { return now_; }

  void schedule_at(SimTime at, Task task);
  void schedule_after(Micros delay, Task task) { schedule_at(now_ + delay, std::move(task)); }

  /// Runs the earliest pending event. Returns false when nothing is pending.
  bool run_next();

  /// Runs every event with timestamp <= limit, then parks the clock at limit.
  void run_until(SimTime limit);

  /// Moves the clock forward without running anything; used by live drivers
  /// that map wall time onto the loop.
  void advance_to(SimTime t);

  std::optional<SimTime> next_time() const;
  std::size_t pending() const { return queue_.size(); }

 private:
  struct Entry {
    SimTime at;
    std::uint64_t order;
    Task task;
  };
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const {
      return a.at != b.at ? a.at > b.at : a.order > b.order;
    }
  };

  SimTime now_{0};
  std::uint64_t next_order_ = 0;
  std::priority_queue<Entry, std::vector<Entry>, Later> queue_;
};

/// Exposes an EventLoop as a millisecond clock anchored at epoch_ms.
class LoopClock final : public Clock {
 public:
  LoopClock(const EventLoop& loop, std::int64_t epoch_ms) : loop_(loop), epoch_ms_(epoch_ms) {}
  std::int64_t now_ms() const override { return epoch_ms_ + to_ms(loop_.now()); }
  std::int64_t epoch_ms() const { return epoch_ms_; }

 private:
  const EventLoop& loop_;
  std::int64_t epoch_ms_;
};

}  // namespace uavlink
