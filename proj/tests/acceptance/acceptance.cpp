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

// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 when any
// fails. Tolerances are fixed here, not taken from the command line.

#include <spdlog/spdlog.h>

#include <algorithm>
#include <boost/asio/executor_work_guard.hpp>
#include <boost/asio/io_context.hpp>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

#include "support/generators.hpp"
#include "support/oracles.hpp"
#include "uavlink/domain/rules.hpp"
#include "uavlink/edge/detector.hpp"
#include "uavlink/edge/encoder.hpp"
#include "uavlink/net/server_stack.hpp"
#include "uavlink/net/ws_client.hpp"
#include "uavlink/protocol/codec.hpp"
#include "uavlink/server/auth.hpp"
#include "uavlink/server/sqlite_store.hpp"
#include "uavlink/sim/world.hpp"

namespace {

using namespace uavlink;
using Clock = std::chrono::steady_clock;
namespace fs = std::filesystem;

struct Outcome {
  bool passed = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int precision = 3) {
  std::ostringstream o;
  o.setf(std::ios::fixed);
  o.precision(precision);
  o << v;
  return o.str();
}

std::vector<sim::RunResult> g_random_runs;

Outcome gating_soundness() {
  const auto t0 = Clock::now();
  std::uint64_t violations = 0, checks = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    auto result = sim::run_scenario(sim::random_scenario(seed));
    for (const auto& inv : sim::check_trace(result.trace, {sim::Invariant::kGating})) {
      violations += inv.failure_count;
      checks += inv.checked;
    }
    g_random_runs.push_back(std::move(result));
  }
  const double elapsed = seconds_since(t0);
  return {violations == 0 && elapsed < 60.0,
          std::to_string(violations) + " violations in " + std::to_string(checks) + " gating checks over 50 scenarios, " +
              fmt(elapsed, 1) + " s (want 0, < 60 s)"};
}

struct EncoderRun {
  double fps;
  double bitrate_bps;
};

EncoderRun encode_for(EncoderPreset preset, std::int64_t duration_ms) {
  edge::Encoder enc(preset);
  std::uint64_t frames = 0, bytes = 0;
  for (std::int64_t t = 0; t < duration_ms; t += 200) {
    edge::Frame f;
    f.id = static_cast<std::uint64_t>(t / 200 + 1);
    f.capture_offset_ms = t;
    auto r = enc.encode_frame(f, t, "acceptance", frames + 1, t);
    if (!r.frame) continue;
    ++frames;
    bytes += r.frame->frame_data.size();
  }
  const double s = static_cast<double>(duration_ms) / 1000.0;
  return {static_cast<double>(frames) / s, static_cast<double>(bytes) * 8.0 / s};
}

Outcome encoder_throughput() {
  const auto t0 = Clock::now();
  const auto ultra = encode_for(EncoderPreset::kUltrafast, 60'000);
  const auto medium = encode_for(EncoderPreset::kMedium, 60'000);
  const auto slow = encode_for(EncoderPreset::kSlow, 60'000);
  const double elapsed = seconds_since(t0);
  const bool ok = std::abs(ultra.fps - 0.5) <= 0.05 && std::abs(ultra.bitrate_bps - 5e6) <= 5e4 &&
                  std::abs(medium.fps - 0.05) <= 0.005 && std::abs(slow.fps - 0.05) <= 0.005 && elapsed < 5.0;
  return {ok, "ultrafast " + fmt(ultra.fps) + " fps " + fmt(ultra.bitrate_bps / 1e6, 4) + " Mbps, medium " +
                  fmt(medium.fps) + " fps, slow " + fmt(slow.fps) + " fps over 60 s, " + fmt(elapsed, 2) +
                  " s (want 0.5+-0.05, 5+-0.05 Mbps, 0.05+-0.005)"};
}

Outcome latency_budget() {
  const auto t0 = Clock::now();
  const auto result = sim::run_scenario(load_scenario(fs::path(UAVLINK_SCENARIO_DIR) / "budget.yaml"));
  const auto& r = result.report;
  double sum = 0;
  std::string stages;
  for (const auto& s : r.stages) {
    sum += s.fraction;
    stages += " " + s.name + "=" + fmt(s.ms.mean / 1000.0);
  }
  const double total_s = r.total_ms.mean / 1000.0;
  const double elapsed = seconds_since(t0);
  const bool ok = r.uploads_completed > 0 && std::abs(total_s - 3.6) <= 0.05 && std::abs(sum - 1.0) <= 0.001 &&
                  elapsed < 5.0;
  return {ok, "total " + fmt(total_s) + " s," + stages + ", fraction sum " + fmt(sum, 6) + ", reference " +
                  (r.reference_total_ms ? fmt(*r.reference_total_ms / 1000.0, 1) : std::string("none")) +
                  " s not asserted, n=" + std::to_string(r.uploads_completed) +
                  ", " + fmt(elapsed, 2) + " s (want 3.6+-0.05, 1+-0.001)"};
}

Outcome glass_to_glass() {
  const auto scenario = load_scenario(fs::path(UAVLINK_SCENARIO_DIR) / "glass_to_glass.yaml");
  const auto result = sim::run_scenario(scenario);
  const auto& g = result.report.glass_to_glass_ms;
  const double simulated_s = result.report.duration_s;
  const double mean_s = g.mean / 1000.0;
  const bool ok = g.n > 0 && mean_s >= 8.0 && mean_s <= 12.0 && simulated_s < 30.0;
  return {ok, "mean " + fmt(mean_s) + " s over " + std::to_string(g.n) + " frames at " +
                  fmt(1000.0 / static_cast<double>(scenario.frame_period_ms), 1) + " fps source, " +
                  fmt(simulated_s, 1) + " s simulated (want [8, 12] s, < 30 s)"};
}

Outcome rules_oracle() {
  const auto t0 = Clock::now();
  testing::Gen gen(2026);
  std::uint64_t mismatches = 0, alerts = 0;
  std::string first;
  for (int iter = 0; iter < 10'000; ++iter) {
    const auto d = gen.detection(1);
    std::vector<Rule> rules;
    const int n = gen.integer(0, 8);
    std::set<Id> used;
    for (int i = 0; i < n; ++i) {
      Id id;
      do id = gen.i64(1, 500);
      while (!used.insert(id).second);
      rules.push_back(gen.rule(id, 1));
    }
    const auto expected = testing::oracle_match_ids(d, rules);
    std::vector<Id> got;
    for (const auto& r : match_rules(d, rules)) got.push_back(r.rule_id);
    const std::int64_t now = gen.i64(0, 4'000'000'000'000);
    const auto generated = generate_alerts(d, rules, now);
    bool bad = got != expected || generated.size() != expected.size();
    for (std::size_t i = 0; !bad && i < generated.size(); ++i) {
      const auto rule = std::find_if(rules.begin(), rules.end(), [&](const Rule& r) { return r.rule_id == expected[i]; });
      if (auto why = testing::oracle_check_alert(generated[i], d, *rule, now)) {
        bad = true;
        if (first.empty()) first = *why;
      }
    }
    alerts += generated.size();
    if (bad) {
      ++mismatches;
      if (first.empty()) first = "iteration " + std::to_string(iter);
    }
  }
  const double elapsed = seconds_since(t0);
  return {mismatches == 0 && elapsed < 10.0,
          std::to_string(mismatches) + " mismatches in 10000 instances (" + std::to_string(alerts) + " alerts), " +
              fmt(elapsed, 2) + " s" + (first.empty() ? "" : ", first: " + first) + " (want 0, < 10 s)"};
}

Outcome detector_statistics() {
  const auto t0 = Clock::now();
  edge::DetectorModel m;
  m.params.precision = 0.72;
  m.params.recall = 0.9;
  m.seed = 72;
  std::uint64_t truth = 0, tp = 0, reported = 0;
  for (std::uint64_t id = 1; id <= 10'000; ++id) {
    edge::Frame f;
    f.id = id;
    ObjectObservation o;
    o.class_label = "person";
    o.center_x = 0.5;
    o.center_y = 0.5;
    o.width = 0.1;
    o.height = 0.2;
    f.truth.push_back(o);
    const auto out = edge::detect(f, m);
    truth += f.truth.size();
    reported += out.reports.size();
    for (const auto& r : out.reports) tp += r.true_positive ? 1 : 0;
  }
  const double precision = static_cast<double>(tp) / static_cast<double>(reported);
  const double recall = static_cast<double>(tp) / static_cast<double>(truth);
  const double elapsed = seconds_since(t0);
  return {std::abs(precision - 0.72) <= 0.02 && std::abs(recall - 0.9) <= 0.02 && elapsed < 10.0,
          "precision " + fmt(precision, 4) + " recall " + fmt(recall, 4) + " over " + std::to_string(truth) +
              " objects, " + fmt(elapsed, 2) + " s (want 0.72+-0.02, 0.9+-0.02)"};
}

Outcome persistence_integrity() {
  std::size_t runs = 0, bad_integrity = 0, bad_history = 0;
  auto judge = [&](const sim::RunResult& r) {
    ++runs;
    if (!r.integrity.ok()) ++bad_integrity;
    if (!r.report.history_monotone) ++bad_history;
  };
  for (const auto& entry : fs::directory_iterator(UAVLINK_SCENARIO_DIR)) {
    if (entry.path().extension() != ".yaml") continue;
    judge(sim::run_scenario(load_scenario(entry.path())));
  }
  for (const auto& r : g_random_runs) judge(r);
  return {runs > 0 && bad_integrity == 0 && bad_history == 0,
          std::to_string(bad_integrity) + " runs with dangling references, " + std::to_string(bad_history) +
              " with backward status transitions, over " + std::to_string(runs) + " runs (want 0, 0)"};
}

std::string read_golden(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  auto s = ss.str();
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
  return s;
}

Outcome protocol_robustness() {
  testing::Gen gen(4242);
  std::vector<std::string> seeds;
  for (int i = 0; i < 100; ++i) seeds.push_back(protocol::encode_envelope(gen.envelope()));
  std::uint64_t typed_errors = 0, decoded = 0, untyped = 0;
  for (int i = 0; i < 10'000; ++i) {
    std::string data;
    if (gen.coin(0.3)) {
      const auto b = gen.bytes(0, 400);
      data.assign(b.begin(), b.end());
    } else {
      data = gen.pick(seeds);
      const int edits = gen.integer(1, 8);
      for (int k = 0; k < edits && !data.empty(); ++k) {
        const auto pos = static_cast<std::size_t>(gen.i64(0, static_cast<std::int64_t>(data.size()) - 1));
        switch (gen.integer(0, 3)) {
          case 0: data[pos] = static_cast<char>(gen.integer(0, 255)); break;
          case 1: data.erase(pos, 1); break;
          case 2: data.insert(pos, 1, static_cast<char>(gen.integer(0, 255))); break;
          default: data.resize(pos); break;
        }
      }
    }
    try {
      auto r = protocol::decode_envelope(data);
      if (std::holds_alternative<protocol::DecodeError>(r)) {
        ++typed_errors;
      } else {
        ++decoded;
        protocol::encode_envelope(std::get<protocol::Envelope>(r));
      }
    } catch (...) {
      ++untyped;
    }
  }
  std::size_t goldens = 0, golden_mismatch = 0;
  for (const auto& entry : fs::directory_iterator(UAVLINK_GOLDEN_DIR)) {
    if (entry.path().extension() != ".json") continue;
    ++goldens;
    const auto text = read_golden(entry.path());
    auto r = protocol::decode_envelope(text);
    if (!std::holds_alternative<protocol::Envelope>(r) ||
        protocol::encode_envelope(std::get<protocol::Envelope>(r)) != text)
      ++golden_mismatch;
  }
  return {untyped == 0 && goldens >= 12 && golden_mismatch == 0,
          "10000 fuzz cases: " + std::to_string(typed_errors) + " typed errors, " + std::to_string(decoded) +
              " decoded, " + std::to_string(untyped) + " exceptions; " + std::to_string(goldens) + " goldens, " +
              std::to_string(golden_mismatch) + " not bit-exact (want 0 exceptions, 0 mismatches)"};
}

// Upload -> VERIFY_RESULT round trips measured by a live edge that streams
// frames between uploads while `stalled` consumers never read.
std::vector<double> verify_round_trips(int stalled, int samples) {
  server::SqliteStore store(":memory:");
  store.put_drone(Drone{"drone-1", "s3cret", "bench", std::nullopt});
  const auto mission = store.put_mission(Mission{0, "bench", {"drone-1"}, {}, {}, MissionStatus::kActive});
  store.upsert_rule(Rule{0, mission, {"person"}, 0.5, Severity::kWarning, "Describe the {class}", true});
  server::MemoryObjectStore objects;
  server::MockProvider provider(0);
  net::StackOptions options;
  options.listen.bind = "127.0.0.1";
  options.listen.port = 0;
  options.analysis_threads = 2;
  net::ServerStack stack(options, store, objects, provider);
  stack.start();

  boost::asio::io_context cio;
  auto guard = boost::asio::make_work_guard(cio);
  std::vector<std::shared_ptr<net::WsClient>> consumers;
  for (int i = 0; i < stalled; ++i) {
    net::WsClient::Handlers h;
    auto sent = std::make_shared<bool>(false);
    const std::string name = "stalled-" + std::to_string(i);
    h.source = [sent, name]() -> std::optional<std::string> {
      if (*sent) return std::nullopt;
      *sent = true;
      return protocol::encode_envelope(protocol::make_envelope(
          protocol::Hello{protocol::Role::kConsumer, "", std::nullopt}, name, 1, SystemClock().now_ms()));
    };
    auto c = net::WsClient::create(cio, net::WsTarget{"127.0.0.1", stack.port(), "/consume"}, std::move(h));
    c->pause_reading(true);
    c->connect();
    consumers.push_back(c);
  }
  std::thread cthread([&] { cio.run(); });
  const auto deadline = Clock::now() + std::chrono::seconds(10);
  while (stack.call([](server::ServerCore& c) { return c.connection_count(server::Endpoint::kConsumer); }) <
             static_cast<std::size_t>(stalled) &&
         Clock::now() < deadline)
    std::this_thread::sleep_for(std::chrono::milliseconds(5));

  net::SyncWsClient edge;
  edge.connect(net::WsTarget{"127.0.0.1", stack.port(), "/edge"});
  protocol::Sequencer seq("drone-1");
  auto send = [&](protocol::Payload p) {
    edge.send(protocol::encode_envelope(seq.stamp(protocol::make_envelope(std::move(p)), SystemClock().now_ms())));
  };
  auto await_verify = [&]() -> bool {
    while (auto text = edge.read(std::chrono::seconds(5))) {
      auto d = protocol::decode_envelope(*text);
      if (auto* env = std::get_if<protocol::Envelope>(&d))
        if (std::holds_alternative<protocol::VerifyResult>(env->payload)) return true;
    }
    return false;
  };
  ObjectObservation person;
  person.class_label = "person";
  person.confidence = 0.9;
  const Bytes image(60'000, 0x5A);
  const Bytes frame_bytes(250'000, 0x33);
  send(protocol::Hello{protocol::Role::kEdge, "s3cret", std::nullopt});
  send(protocol::ImageUpload{image, {person}, SystemClock().now_ms()});
  if (!await_verify()) throw std::runtime_error("no VERIFY_RESULT during warmup");
  send(protocol::StreamStart{"drone-1-bench"});

  std::uint64_t frame_seq = 0;
  auto send_frame = [&] {
    const auto now = SystemClock().now_ms();
    send(protocol::VideoFrame{"drone-1-bench", ++frame_seq, frame_bytes, now, now});
  };
  // Enough frames to fill every stalled socket before measuring.
  for (int i = 0; i < 60; ++i) send_frame();

  std::vector<double> rtt_ms;
  for (int i = 0; i < samples; ++i) {
    send_frame();
    send_frame();
    const auto t0 = Clock::now();
    send(protocol::ImageUpload{image, {person}, SystemClock().now_ms()});
    if (!await_verify()) throw std::runtime_error("VERIFY_RESULT timed out");
    rtt_ms.push_back(std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
  }
  edge.close();

  guard.reset();
  cio.stop();
  cthread.join();
  consumers.clear();
  stack.stop(std::chrono::milliseconds(200));
  return rtt_ms;
}

double p95(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(v.size())));
  return v[std::max<std::size_t>(rank, 1) - 1];
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

Outcome fanout_isolation() {
  const auto t0 = Clock::now();
  std::vector<double> base, loaded;
  for (int trial = 0; trial < 5; ++trial) {
    base.push_back(p95(verify_round_trips(0, 120)));
    loaded.push_back(p95(verify_round_trips(50, 120)));
  }
  const double b = median(base), l = median(loaded);
  const double ratio = l / b;
  return {ratio <= 1.10, "p95 " + fmt(l) + " ms with 50 stalled consumers vs " + fmt(b) + " ms baseline, ratio " +
                             fmt(ratio) + " (median of 5 trials, want <= 1.10), " + fmt(seconds_since(t0), 1) + " s"};
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::warn);
  const std::vector<std::pair<std::string, Outcome (*)()>> criteria = {
      {"gating_soundness", gating_soundness},     {"encoder_throughput", encoder_throughput},
      {"latency_budget", latency_budget},         {"glass_to_glass", glass_to_glass},
      {"rules_oracle", rules_oracle},             {"detector_statistics", detector_statistics},
      {"persistence_integrity", persistence_integrity}, {"protocol_robustness", protocol_robustness},
      {"fanout_isolation", fanout_isolation},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    std::cout << (o.passed ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
    failed += o.passed ? 0 : 1;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}
