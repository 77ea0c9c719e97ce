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

#include "uavlink/sim/report.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>

#include "json.hpp"

namespace uavlink::sim {

double nearest_rank(const std::vector<double>& sorted, double p) {
  const auto n = sorted.size();
  auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(n)));
  rank = std::clamp<std::size_t>(rank, 1, n);
  return sorted[rank - 1];
}

Summary summarize(std::vector<double> sample) {
  Summary s;
  s.n = sample.size();
  if (sample.empty()) return s;
  std::sort(sample.begin(), sample.end());
  s.mean = std::accumulate(sample.begin(), sample.end(), 0.0) / static_cast<double>(s.n);
  s.p50 = nearest_rank(sample, 50);
  s.p95 = nearest_rank(sample, 95);
  s.min = sample.front();
  s.max = sample.back();
  return s;
}

void fill_budget(RunReport& report, const std::vector<DetectionLatency>& latencies) {
  std::vector<double> inference, transmission, analysis, delivery, total;
  auto ms = [](SimTime a, SimTime b) { return static_cast<double>((b - a).count()) / 1000.0; };
  for (const auto& l : latencies) {
    if (!l.complete()) continue;
    inference.push_back(ms(*l.capture, *l.detect_done));
    transmission.push_back(ms(*l.detect_done, *l.upload_received));
    analysis.push_back(ms(*l.upload_received, *l.analysis_done));
    delivery.push_back(ms(*l.analysis_done, *l.delivered));
    total.push_back(ms(*l.capture, *l.delivered));
  }
  report.uploads_completed = total.size();
  report.total_ms = summarize(total);
  report.stages.clear();
  const std::pair<const char*, std::vector<double>*> named[] = {
      {"inference", &inference}, {"transmission", &transmission}, {"analysis", &analysis}, {"delivery", &delivery}};
  for (auto [name, sample] : named) {
    StageReport st{name, summarize(*sample), 0.0};
    if (report.total_ms.mean > 0) st.fraction = st.ms.mean / report.total_ms.mean;
    report.stages.push_back(st);
  }
  report.network_fraction = report.stages[1].fraction + report.stages[3].fraction;
}

namespace {

nlohmann::json summary_json(const Summary& s) {
  return {{"n", s.n}, {"mean", s.mean}, {"p50", s.p50}, {"p95", s.p95}, {"min", s.min}, {"max", s.max}};
}

void summary_line(std::ostream& out, const char* label, const Summary& s) {
  out << "  " << std::left << std::setw(16) << label << std::right << std::fixed << std::setprecision(1)
      << "mean " << std::setw(9) << s.mean << "  p50 " << std::setw(9) << s.p50 << "  p95 " << std::setw(9) << s.p95
      << "  n=" << s.n << '\n';
}

}  // namespace

void write_text(std::ostream& out, const RunReport& r) {
  out << "scenario " << r.scenario << " seed " << r.seed << " (" << std::fixed << std::setprecision(1)
      << r.duration_s << " s simulated)\n\n";
  out << "latency budget over " << r.uploads_completed << " verified uploads (ms)\n";
  for (const auto& st : r.stages) {
    summary_line(out, st.name.c_str(), st.ms);
    out << "  " << std::setw(16) << "" << "fraction " << std::setprecision(3) << st.fraction << '\n';
  }
  summary_line(out, "total", r.total_ms);
  out << "  network fraction " << std::setprecision(3) << r.network_fraction << '\n';
  if (r.reference_total_ms)
    out << "  reference total  " << std::setprecision(1) << *r.reference_total_ms << " ms (measured "
        << r.total_ms.mean << ")\n";

  out << "\nstreaming\n" << std::setprecision(3);
  out << "  streams " << r.streams << ", " << r.stream_seconds << " s open\n";
  out << "  encoded " << r.frames_encoded << " frames, " << r.encoded_fps << " fps, "
      << r.encoded_bitrate_bps / 1e6 << " Mbps\n";
  out << "  delivered " << r.frames_delivered << " frames to consumer 0, " << r.delivered_fps << " fps\n";
  summary_line(out, "glass-to-glass", r.glass_to_glass_ms);
  summary_line(out, "display", r.display_latency_ms);

  out << "\ntraffic (bytes)\n";
  for (const auto& [phase, b] : r.uplink_bytes_by_phase) out << "  uplink while " << phase << ": " << b << '\n';
  for (const auto& [type, b] : r.uplink_bytes_by_type) out << "  uplink " << type << ": " << b << '\n';
  out << "  downlink total: " << r.downlink_bytes << '\n';

  out << "\ncounts\n";
  for (const auto& [k, v] : r.counts) out << "  " << k << ": " << v << '\n';

  out << "\ninvariants\n";
  for (const auto& inv : r.invariants) {
    out << "  " << (inv.passed ? "PASS " : "FAIL ") << inv.name << " (" << inv.checked << " checks)\n";
    for (const auto& f : inv.failures) out << "    " << f << '\n';
  }
  out << "  " << (r.integrity_ok ? "PASS " : "FAIL ") << "store integrity\n";
  out << "  " << (r.history_monotone ? "PASS " : "FAIL ") << "alert history monotone\n";
}

std::string to_json(const RunReport& r) {
  nlohmann::json j;
  j["scenario"] = r.scenario;
  j["seed"] = r.seed;
  j["duration_s"] = r.duration_s;
  auto& budget = j["budget"];
  budget["uploads_completed"] = r.uploads_completed;
  for (const auto& st : r.stages) {
    auto s = summary_json(st.ms);
    s["fraction"] = st.fraction;
    budget["stages"][st.name] = s;
  }
  budget["total_ms"] = summary_json(r.total_ms);
  budget["network_fraction"] = r.network_fraction;
  if (r.reference_total_ms) budget["reference_total_ms"] = *r.reference_total_ms;
  auto& stream = j["streaming"];
  stream["streams"] = r.streams;
  stream["stream_seconds"] = r.stream_seconds;
  stream["frames_encoded"] = r.frames_encoded;
  stream["encoded_fps"] = r.encoded_fps;
  stream["encoded_bitrate_bps"] = r.encoded_bitrate_bps;
  stream["frames_delivered"] = r.frames_delivered;
  stream["delivered_fps"] = r.delivered_fps;
  stream["glass_to_glass_ms"] = summary_json(r.glass_to_glass_ms);
  stream["display_latency_ms"] = summary_json(r.display_latency_ms);
  j["traffic"] = {{"uplink_by_phase", r.uplink_bytes_by_phase},
                  {"uplink_by_type", r.uplink_bytes_by_type},
                  {"downlink", r.downlink_bytes}};
  j["counts"] = r.counts;
  for (const auto& inv : r.invariants)
    j["invariants"][inv.name] = {{"passed", inv.passed},
                                 {"checked", inv.checked},
                                 {"failure_count", inv.failure_count},
                                 {"failures", inv.failures}};
  j["integrity_ok"] = r.integrity_ok;
  j["history_monotone"] = r.history_monotone;
  return j.dump(2);
}

void write_latency_log(std::ostream& out, const std::vector<DetectionLatency>& latencies) {
  out << "capture_ts_ms\tdetection_id\tcapture_us\tdetect_us\tupload_us\tverified_us\tverify_ack_us\tanalysis_us\tdelivered_us\n";
  auto cell = [](const std::optional<SimTime>& t) { return t ? std::to_string(t->count()) : std::string("-"); };
  for (const auto& l : latencies) {
    out << l.capture_ts_ms << '\t' << (l.detection_id ? std::to_string(*l.detection_id) : "-") << '\t'
        << cell(l.capture) << '\t' << cell(l.detect_done) << '\t' << cell(l.upload_received) << '\t'
        << cell(l.verified) << '\t' << cell(l.verify_received) << '\t' << cell(l.analysis_done) << '\t' << cell(l.delivered) << '\n';
  }
}

}  // namespace uavlink::sim
