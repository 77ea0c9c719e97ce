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

#include "uavlink/edge/detector.hpp"

#include <random>

#include "uavlink/core/random.hpp"

namespace uavlink::edge {

std::vector<ObjectObservation> DetectorOutput::observations() const {
  std::vector<ObjectObservation> out;
  out.reserve(reports.size());
  for (const auto& r : reports) out.push_back(r.observation);
  return out;
}

DetectorOutput detect(const Frame& frame, const DetectorModel& model) {
  const auto& p = model.params;
  std::mt19937_64 rng(mix_seed({model.seed, frame.id, 0xDE7EC7ull}));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo == hi ? lo : std::uniform_real_distribution<double>(lo, hi)(rng); };

  DetectorOutput out;
  const bool report_truth = p.precision > 0.0;
  for (const auto& truth : frame.truth) {
    if (unit(rng) < p.recall) {
      if (!report_truth) continue;
      ReportedObject r{truth, true};
      r.observation.confidence = uniform(p.tp_confidence_min, p.tp_confidence_max);
      out.reports.push_back(std::move(r));
    }
  }

  const double expected_tp = static_cast<double>(frame.truth.size()) * p.recall;
  const double fp_rate = report_truth ? expected_tp * (1.0 - p.precision) / p.precision : expected_tp;
  if (fp_rate > 0.0) {
    const int n_fp = std::poisson_distribution<int>(fp_rate)(rng);
    std::uniform_int_distribution<std::size_t> cls(0, p.fp_classes.size() - 1);
    for (int i = 0; i < n_fp; ++i) {
      ObjectObservation o;
      o.class_label = p.fp_classes[cls(rng)];
      o.width = uniform(0.02, 0.3);
      o.height = uniform(0.02, 0.3);
      o.center_x = uniform(o.width / 2, 1.0 - o.width / 2);
      o.center_y = uniform(o.height / 2, 1.0 - o.height / 2);
      o.orientation_deg = uniform(0.0, 359.0);
      o.confidence = uniform(p.fp_confidence_min, p.fp_confidence_max);
      out.reports.push_back(ReportedObject{std::move(o), false});
    }
  }
  out.latency_ms = uniform(p.latency_min_ms, p.latency_max_ms);
  return out;
}

}  // namespace uavlink::edge
