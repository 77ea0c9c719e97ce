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

#include "uavlink/core/event_loop.hpp"

#include <stdexcept>

namespace uavlink {

void EventLoop::schedule_at(SimTime at, Task task) {
  if (at < now_) at = now_;
  queue_.push(Entry{at, next_order_++, std::move(task)});
}

bool EventLoop::run_next() {
  if (queue_.empty()) return false;
  // priority_queue::top is const; the task is moved out via a copy of the entry.
  Entry entry = queue_.top();
  queue_.pop();
  now_ = entry.at;
  entry.task();
  return true;
}

void EventLoop::run_until(SimTime limit) {
  while (!queue_.empty() && queue_.top().at <= limit) run_next();
  if (now_ < limit) now_ = limit;
}

void EventLoop::advance_to(SimTime t) {
  if (t < now_) throw std::logic_error("EventLoop::advance_to moves backwards");
  if (!queue_.empty() && queue_.top().at < t) throw std::logic_error("EventLoop::advance_to skips pending events");
  now_ = t;
}

std::optional<SimTime> EventLoop::next_time() const {
  if (queue_.empty()) return std::nullopt;
  return queue_.top().at;
}

}  // namespace uavlink
