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

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <utility>

namespace uavlink {

/// Per-connection send queue. Control messages are never dropped; frames are
/// capped at `frame_capacity` with drop-oldest eviction. Relative order of
/// everything that survives is preserved.
template <typename T>
class OutboundQueue {
 public:
  /// frame_capacity == 0 means frames are unbounded.
  explicit OutboundQueue(std::size_t frame_capacity = 0) : frame_capacity_(frame_capacity) {}

  void push_control(T item) { items_.push_back(Item{std::move(item), false}); }

  /// Returns true when an older frame had to be evicted to make room.
  bool push_frame(T item) {
    bool evicted = false;
    if (frame_capacity_ != 0 && frames_ >= frame_capacity_) {
      for (auto it = items_.begin(); it != items_.end(); ++it) {
        if (it->frame) {
          items_.erase(it);
          --frames_;
          ++dropped_;
          evicted = true;
          break;
        }
      }
    }
    items_.push_back(Item{std::move(item), true});
    ++frames_;
    return evicted;
  }

  std::optional<T> pop() {
    if (items_.empty()) return std::nullopt;
    Item item = std::move(items_.front());
    items_.pop_front();
    if (item.frame) --frames_;
    return std::move(item.value);
  }

  /// Removes queued frames matching pred; they count as dropped.
  template <typename Pred>
  std::size_t drop_frames_if(Pred pred) {
    std::size_t n = 0;
    for (auto it = items_.begin(); it != items_.end();) {
      if (it->frame && pred(it->value)) {
        it = items_.erase(it);
        --frames_;
        ++n;
      } else {
        ++it;
      }
    }
    dropped_ += n;
    return n;
  }

  void clear() {
    items_.clear();
    frames_ = 0;
  }

  bool empty() const { return items_.empty(); }
  std::size_t size() const { return items_.size(); }
  std::size_t frame_count() const { return frames_; }
  std::size_t frame_capacity() const { return frame_capacity_; }
  bool frames_full() const { return frame_capacity_ != 0 && frames_ >= frame_capacity_; }
  std::uint64_t dropped() const { return dropped_; }

 private:
  struct Item {
    T value;
    bool frame;
  };
  std::deque<Item> items_;
  std::size_t frame_capacity_;
  std::size_t frames_ = 0;
  std::uint64_t dropped_ = 0;
};

}  // namespace uavlink
