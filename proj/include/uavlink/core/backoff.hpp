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

#include <algorithm>
#include <cstdint>

namespace uavlink {

/// Reconnect delays: starts at `initial_ms`, doubles per failure, capped.
class Backoff {
 public:
  explicit Backoff(std::int64_t initial_ms = 500, std::int64_t max_ms = 8'000)
      : initial_ms_(initial_ms), max_ms_(max_ms), next_ms_(initial_ms) {}

  std::int64_t next() {
    const auto d = next_ms_;
    next_ms_ = std::min(next_ms_ * 2, max_ms_);
    return d;
  }
  void reset() { next_ms_ = initial_ms_; }

 private:
  std::int64_t initial_ms_;
  std::int64_t max_ms_;
  std::int64_t next_ms_;
};

}  // namespace uavlink
