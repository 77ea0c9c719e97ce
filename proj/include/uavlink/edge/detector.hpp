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

#include "uavlink/edge/frame_source.hpp"
#include "uavlink/scenario/scenario.hpp"

namespace uavlink::edge {

/// Synthetic stand-in for the onboard object detector.
///
/// Each ground-truth object is reported with probability `recall`. False
/// positives are drawn from a Poisson process whose rate is chosen so that,
/// in the long run, a fraction `precision` of all reports are true:
///   E[fp] = n_truth * recall * (1 - precision) / precision.
/// precision == 0 reports no true objects and one false positive per truth
/// object that would have been recalled.
struct DetectorModel {
  DetectorParams params;
  std::uint64_t seed = 1;
};

struct ReportedObject {
  ObjectObservation observation;
  bool true_positive = false;
};

struct DetectorOutput {
  std::vector<ReportedObject> reports;
  double latency_ms = 0.0;

  bool empty() const { return reports.empty(); }
  std::vector<ObjectObservation> observations() const;
};

/// Deterministic in (model.seed, frame.id): results do not depend on which
/// other frames were processed.
DetectorOutput detect(const Frame& frame, const DetectorModel& model);

}  // namespace uavlink::edge
