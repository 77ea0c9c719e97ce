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

#include "uavlink/edge/frame_source.hpp"

namespace uavlink::edge {

Resolution dimensions(ResolutionProfile p) {
  switch (p) {
    case ResolutionProfile::k4k360: return {3840, 1920};
    case ResolutionProfile::k1080p: return {1920, 1080};
  }
  return {0, 0};
}

Frame FrameSource::frame_at(std::uint64_t index) const {
  Frame f;
  f.id = index + 1;
  f.capture_offset_ms = static_cast<std::int64_t>(index) * scenario_.frame_period_ms;
  f.resolution = scenario_.resolution;
  f.truth = objects_at(scenario_, f.capture_offset_ms);
  return f;
}

}  // namespace uavlink::edge
