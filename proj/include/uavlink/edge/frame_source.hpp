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
#include <vector>

#include "uavlink/domain/types.hpp"
#include "uavlink/scenario/scenario.hpp"

namespace uavlink::edge {

struct Resolution {
  std::uint32_t width;
  std::uint32_t height;
};

Resolution dimensions(ResolutionProfile p);

struct Frame {
  std::uint64_t id = 0;
  /// Capture time relative to the start of the run.
  std::int64_t capture_offset_ms = 0;
  ResolutionProfile resolution = ResolutionProfile::k4k360;
  std::vector<ObjectObservation> truth;
};

/// Scenario-driven camera: frame k is captured at k * frame_period_ms.
class FrameSource {
 public:
  explicit FrameSource(const Scenario& scenario) : scenario_(scenario) {}

  std::int64_t frame_period_ms() const { return scenario_.frame_period_ms; }
  Frame frame_at(std::uint64_t index) const;

 private:
  const Scenario& scenario_;
};

}  // namespace uavlink::edge
