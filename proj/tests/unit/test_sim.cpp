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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numeric>
#include <sstream>

#include "uavlink/sim/link.hpp"
#include "uavlink/sim/world.hpp"

namespace uavlink::sim {
namespace {

Scenario load(const std::string& name) {
  return load_scenario(std::filesystem::path(UAVLINK_SCENARIO_DIR) / (name + ".yaml"));
}

std::vector<const TraceEvent*> find(const TraceLog& t, std::string_view kind, std::string_view type = {},
                                    std::string_view link_prefix = {}) {
  std::vector<const TraceEvent*> out;
  for (const auto& e : t.events()) {
    if (e.kind != kind) continue;
    if (!type.empty() && e.str("type") != type) continue;
    if (!link_prefix.empty() && !e.str("link").starts_with(link_prefix)) continue;
    out.push_back(&e);
  }
  return out;
}

const InvariantResult& result_of(const std::vector<InvariantResult>& rs, std::string_view name) {
  for (const auto& r : rs)
    if (r.name == name) return r;
  throw std::runtime_error("no invariant " + std::string(name));
}

TraceLog parse_text(const std::string& text) {
  std::istringstream in(text);
  return TraceLog::parse(in);
}

TEST(TraceFormat, RoundTripsEscapedValues) {
  TraceLog log;
  log.record(Micros(12), "send", {kv("link", "up:drone 1"), kv("note", "a=b%c\nd"), kv("n", std::int64_t{-4})});
  log.record(Micros(40), "recv", {kv("x", 0.25), kv("ok", true)});
  std::ostringstream out;
  log.write(out);
  EXPECT_EQ(out.str().substr(0, 56), "id=1 t=12 ev=send link=up:drone%201 note=a%3Db%25c%0Ad n");
  auto back = parse_text(out.str());
  ASSERT_EQ(back.events().size(), 2u);
  const auto& e = back.events()[0];
  EXPECT_EQ(e.id, 1u);
  EXPECT_EQ(e.t_us, 12);
  EXPECT_EQ(e.str("link"), "up:drone 1");
  EXPECT_EQ(e.str("note"), "a=b%c\nd");
  EXPECT_EQ(e.num("n"), -4);
  EXPECT_DOUBLE_EQ(back.events()[1].real("x"), 0.25);
  EXPECT_EQ(back.events()[1].num("ok"), 1);
}

TEST(TraceFormat, RejectsMalformedLines) {
  EXPECT_THROW(parse_text("id=1 t=5 ev=x key\n"), TraceError);
  EXPECT_THROW(parse_text("id=1 ev=x\n"), TraceError);
  EXPECT_THROW(parse_text("id=1 t=5 ev=x k=%G1\n"), TraceError);
  EXPECT_THROW(parse_text("id=1 t=5 ev=x k=%4\n"), TraceError);
  EXPECT_NO_THROW(parse_text("# comment\n\nid=1 t=5 ev=x\n"));
}

TEST(Summary, NearestRankPercentiles) {
  std::vector<double> v(20);
  std::iota(v.begin(), v.end(), 1.0);
  const auto s = summarize(v);
  EXPECT_EQ(s.n, 20u);
  EXPECT_DOUBLE_EQ(s.mean, 10.5);
  EXPECT_DOUBLE_EQ(s.p50, 10.0);
  EXPECT_DOUBLE_EQ(s.p95, 19.0);
  EXPECT_DOUBLE_EQ(s.min, 1.0);
  EXPECT_DOUBLE_EQ(s.max, 20.0);
  EXPECT_DOUBLE_EQ(summarize({7.0}).p95, 7.0);
  EXPECT_EQ(summarize({}).n, 0u);
}

struct LinkRig {
  EventLoop loop;
  TraceLog trace;
  SimLink link;
  std::deque<Packet> pending;
  std::vector<std::pair<SimTime, std::uint64_t>> arrivals;

  explicit LinkRig(LinkParams p) : link("up:test", loop, trace, p, 42) {
    link.set_source([this]() -> std::optional<Packet> {
      if (pending.empty()) return std::nullopt;
      auto p = std::move(pending.front());
      pending.pop_front();
      return p;
    });
    link.set_sink([this](Packet p) { arrivals.emplace_back(loop.now(), p.seq); });
    link.up();
  }
  void send(std::size_t bytes, std::uint64_t seq) {
    pending.push_back(Packet{std::string(bytes, 'x'), {kv("seq", seq)}, seq});
    link.kick();
  }
};

TEST(SimLink, SerializationPlusLatency) {
  LinkRig rig({100.0, 5e6, 0.0});
  rig.send(625'000, 1);  // 5,000,000 bits
  rig.send(625'000, 2);
  rig.loop.run_until(Micros(10'000'000));
  ASSERT_EQ(rig.arrivals.size(), 2u);
  EXPECT_EQ(rig.arrivals[0].first, Micros(1'100'000));
  EXPECT_EQ(rig.arrivals[1].first, Micros(2'100'000));
  const auto sends = find(rig.trace, "send");
  ASSERT_EQ(sends.size(), 2u);
  EXPECT_EQ(sends[0]->num("tx_us"), 1'000'000);
  EXPECT_EQ(sends[1]->t_us, 1'000'000);
}

TEST(SimLink, ZeroBandwidthIsUnlimited) {
  LinkRig rig({25.0, 0.0, 0.0});
  rig.send(10'000'000, 1);
  rig.loop.run_until(Micros(1'000'000));
  ASSERT_EQ(rig.arrivals.size(), 1u);
  EXPECT_EQ(rig.arrivals[0].first, Micros(25'000));
}

TEST(SimLink, JitterNeverReorders) {
  LinkRig rig({10.0, 0.0, 40.0});
  for (std::uint64_t i = 1; i <= 500; ++i) rig.send(100, i);
  rig.loop.run_until(Micros(10'000'000));
  ASSERT_EQ(rig.arrivals.size(), 500u);
  double max_delay = 0;
  for (std::size_t i = 0; i < rig.arrivals.size(); ++i) {
    EXPECT_EQ(rig.arrivals[i].second, i + 1);
    if (i > 0) {
      EXPECT_GE(rig.arrivals[i].first, rig.arrivals[i - 1].first);
    }
    max_delay = std::max(max_delay, to_seconds(rig.arrivals[i].first) * 1000.0);
  }
  EXPECT_GE(to_seconds(rig.arrivals.front().first) * 1000.0, 10.0);
  EXPECT_LE(max_delay, 50.0 + 1e-9);
}

TEST(SimLink, DownDropsInFlightPackets) {
  LinkRig rig({500.0, 0.0, 0.0});
  rig.send(10, 1);
  rig.send(10, 2);
  rig.loop.run_until(Micros(100'000));
  rig.link.down();
  rig.loop.run_until(Micros(2'000'000));
  EXPECT_TRUE(rig.arrivals.empty());
  EXPECT_EQ(find(rig.trace, "lost").size(), 2u);
  EXPECT_EQ(rig.link.stats().lost, 2u);
  rig.link.up();
  rig.send(10, 3);
  rig.loop.run_until(Micros(3'000'000));
  ASSERT_EQ(rig.arrivals.size(), 1u);
  EXPECT_EQ(rig.arrivals[0].second, 3u);
}

constexpr const char* kCompliant =
    "id=1 t=0 ev=config encoder_fps=0.5 uplink_jitter_ms=0 downlink_jitter_ms=0\n"
    "id=2 t=0 ev=rule id=1\n"
    "id=3 t=0 ev=connect peer=d\n"
    "id=4 t=0 ev=connect peer=c\n"
    "id=5 t=100 ev=send link=up:d type=IMAGE_UPLOAD seq=1 ts=1 bytes=10 tx_us=0 bw=0\n"
    "id=6 t=200 ev=recv link=up:d type=IMAGE_UPLOAD seq=1 ts=1 bytes=10\n"
    "id=7 t=200 ev=detection id=1\n"
    "id=8 t=200 ev=alert id=1 detection=1 rule=1\n"
    "id=9 t=200 ev=send link=down:d type=VERIFY_RESULT seq=1 ts=1 verified=1 alert=1 rule=1 bytes=10 tx_us=0 bw=0\n"
    "id=10 t=300 ev=recv link=down:d type=VERIFY_RESULT seq=1 ts=1 verified=1 alert=1 rule=1 bytes=10\n"
    "id=11 t=400 ev=send link=up:d type=STREAM_START seq=2 ts=2 stream=s1 bytes=10 tx_us=0 bw=0\n"
    "id=12 t=500 ev=send link=up:d type=VIDEO_FRAME seq=3 ts=3 stream=s1 fseq=1 bytes=10 tx_us=0 bw=0\n"
    "id=13 t=500 ev=send link=down:c type=STREAM_START seq=1 ts=3 stream=s1 bytes=10 tx_us=0 bw=0\n"
    "id=14 t=600 ev=send link=down:c type=VIDEO_FRAME seq=2 ts=3 stream=s1 fseq=1 bytes=10 tx_us=0 bw=0\n"
    "id=15 t=700 ev=send link=up:d type=STREAM_STOP seq=4 ts=4 stream=s1 bytes=10 tx_us=0 bw=0\n";

TEST(CheckTrace, CompliantTracePasses) {
  for (const auto& r : check_trace(parse_text(kCompliant))) {
    EXPECT_TRUE(r.passed) << r.name << ": " << (r.failures.empty() ? "" : r.failures.front());
    EXPECT_GT(r.checked, 0u) << r.name;
  }
}

TEST(CheckTrace, FrameBeforeVerificationFailsGatingAndNamesTheFrame) {
  std::string text = kCompliant;
  text.insert(text.find("id=9 "),
              "id=77 t=150 ev=send link=up:d type=VIDEO_FRAME seq=9 ts=1 stream=s1 fseq=1 bytes=10 tx_us=0 bw=0\n");
  const auto rs = check_trace(parse_text(text), {Invariant::kGating});
  ASSERT_EQ(rs.size(), 1u);
  EXPECT_FALSE(rs[0].passed);
  ASSERT_EQ(rs[0].failures.size(), 1u);
  EXPECT_TRUE(rs[0].failures[0].starts_with("event 77: VIDEO_FRAME s1#1")) << rs[0].failures[0];
}

TEST(CheckTrace, StreamStartWithoutVerificationFails) {
  std::string text = kCompliant;
  text.replace(text.find("verified=1 alert=1 rule=1 bytes=10\n"), 10, "verified=0");
  const auto all = check_trace(parse_text(text));
  const auto& r = result_of(all, "gating");
  EXPECT_FALSE(r.passed);
  EXPECT_TRUE(r.failures[0].starts_with("event 11:")) << r.failures[0];
}

TEST(CheckTrace, RelayOutsideConsumerStreamFails) {
  std::string text = kCompliant;
  text.erase(text.find("id=13 "), text.find("id=14 ") - text.find("id=13 "));
  const auto all = check_trace(parse_text(text));
  const auto& r = result_of(all, "gating");
  EXPECT_FALSE(r.passed);
  EXPECT_TRUE(r.failures[0].starts_with("event 14:")) << r.failures[0];
}

TEST(CheckTrace, OrderingViolations) {
  const auto reordered = parse_text(
      "id=1 t=0 ev=send link=up:a type=X seq=1 ts=5 bytes=1 tx_us=0 bw=0\n"
      "id=2 t=0 ev=send link=up:a type=X seq=2 ts=5 bytes=1 tx_us=0 bw=0\n"
      "id=3 t=9 ev=recv link=up:a type=X seq=2 bytes=1\n"
      "id=4 t=9 ev=send link=up:a type=X seq=2 ts=4 bytes=1 tx_us=0 bw=0\n"
      "id=5 t=9 ev=latency capture=10 detect=20 upload=15 analysis=30 delivered=40\n");
  const auto all = check_trace(reordered);
  const auto& r = result_of(all, "ordering");
  EXPECT_EQ(r.failure_count, 3u);
  EXPECT_TRUE(r.failures[0].starts_with("event 3:"));
  EXPECT_TRUE(r.failures[1].starts_with("event 4:"));
  EXPECT_TRUE(r.failures[2].starts_with("event 5: upload precedes detect"));

  const auto reconnect = parse_text(
      "id=1 t=0 ev=send link=up:a type=X seq=5 ts=5 bytes=1 tx_us=0 bw=0\n"
      "id=2 t=1 ev=lost link=up:a seq=5\n"
      "id=3 t=2 ev=connect peer=a\n"
      "id=4 t=3 ev=send link=up:a type=X seq=1 ts=1 bytes=1 tx_us=0 bw=0\n"
      "id=5 t=4 ev=recv link=up:a type=X seq=1 bytes=1\n");
  const auto again = check_trace(reconnect);
  EXPECT_TRUE(result_of(again, "ordering").passed);
}

TEST(CheckTrace, ThroughputViolations) {
  const auto t = parse_text(
      "id=1 t=0 ev=config encoder_fps=0.5 uplink_jitter_ms=0 downlink_jitter_ms=0\n"
      "id=2 t=0 ev=send link=up:a type=X seq=1 ts=0 bytes=1000 tx_us=100 bw=8000\n"
      "id=3 t=0 ev=send link=up:b type=X seq=1 ts=0 bytes=1000 tx_us=1000000 bw=8000\n"
      "id=4 t=500000 ev=send link=up:b type=X seq=2 ts=0 bytes=1000 tx_us=1000000 bw=8000\n"
      "id=5 t=0 ev=encode node=n frame=1 admitted=1\n"
      "id=6 t=1500000 ev=encode node=n frame=2 admitted=1\n"
      "id=7 t=10 ev=recv link=down:c type=VIDEO_FRAME stream=s fseq=1 seq=1 bytes=1\n"
      "id=8 t=1000000 ev=recv link=down:c type=VIDEO_FRAME stream=s fseq=2 seq=2 bytes=1\n");
  const auto all = check_trace(t);
  const auto& r = result_of(all, "throughput");
  std::vector<std::string> heads;
  for (const auto& f : r.failures) heads.push_back(f.substr(0, f.find(':')));
  EXPECT_NE(std::find(heads.begin(), heads.end(), "event 2"), heads.end());  // faster than bw
  EXPECT_NE(std::find(heads.begin(), heads.end(), "event 4"), heads.end());  // overlap
  EXPECT_NE(std::find(heads.begin(), heads.end(), "event 6"), heads.end());  // encoder ceiling
  EXPECT_NE(std::find(heads.begin(), heads.end(), "event 8"), heads.end());  // consumer floor
}

TEST(CheckTrace, ReferentialViolations) {
  const auto t = parse_text(
      "id=1 t=0 ev=rule id=1\n"
      "id=2 t=0 ev=detection id=1\n"
      "id=3 t=0 ev=alert id=1 detection=1 rule=2\n"
      "id=4 t=0 ev=alert id=2 detection=9 rule=1\n"
      "id=5 t=0 ev=recv link=down:d type=ANALYSIS detection=3 seq=1 bytes=1\n"
      "id=6 t=0 ev=recv link=down:o type=ALERT_EVENT alert=7 status=open seq=1 bytes=1\n"
      "id=7 t=0 ev=recv link=down:o type=ALERT_EVENT alert=7 status=open error=x seq=2 bytes=1\n");
  const auto all = check_trace(t);
  const auto& r = result_of(all, "referential");
  EXPECT_EQ(r.failure_count, 4u);
  EXPECT_TRUE(r.failures[0].starts_with("event 3: alert 1 references unknown rule 2"));
  EXPECT_TRUE(r.failures[1].starts_with("event 4: alert 2 references unknown detection 9"));
}

TEST(Scenarios, AllShippedFilesParseAndValidate) {
  int n = 0;
  for (const auto& entry : std::filesystem::directory_iterator(UAVLINK_SCENARIO_DIR)) {
    if (entry.path().extension() != ".yaml") continue;
    SCOPED_TRACE(entry.path().string());
    Scenario s;
    ASSERT_NO_THROW(s = load_scenario(entry.path()));
    EXPECT_NO_THROW(validate_scenario(s));
    ++n;
  }
  EXPECT_GE(n, 6);
}

TEST(Scenarios, RandomScenariosAreValidAndSeeded) {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const auto s = random_scenario(seed);
    EXPECT_NO_THROW(validate_scenario(s)) << seed;
  }
  EXPECT_EQ(random_scenario(9).objects.size(), random_scenario(9).objects.size());
  EXPECT_EQ(random_scenario(9).uplink.latency_ms, random_scenario(9).uplink.latency_ms);
  EXPECT_NE(random_scenario(9).uplink.latency_ms, random_scenario(10).uplink.latency_ms);
}

std::string trace_text(const RunResult& r) {
  std::ostringstream out;
  r.trace.write(out);
  return out.str();
}

TEST(RunScenario, DeterministicForIdenticalSeeds) {
  const auto s = load("operator_shift");
  const auto a = run_scenario(s);
  const auto b = run_scenario(s);
  EXPECT_EQ(trace_text(a), trace_text(b));
  EXPECT_EQ(to_json(a.report), to_json(b.report));
  auto s2 = s;
  s2.seed += 1;
  EXPECT_NE(trace_text(run_scenario(s2)), trace_text(a));
}

TEST(RunScenario, BudgetStagesMatchConfiguredParameters) {
  const auto s = load("budget");
  const auto r = run_scenario(s);
  ASSERT_TRUE(r.passed());
  ASSERT_EQ(r.report.uploads_completed, 6u);

  // Transmission oracle: the upload's own size on a 5 Mbps link with no latency.
  const auto uploads = find(r.trace, "send", "IMAGE_UPLOAD");
  ASSERT_EQ(uploads.size(), 6u);
  double tx_ms = 0;
  for (const auto* u : uploads) tx_ms += std::ceil(static_cast<double>(u->num("bytes")) * 8.0 / 5e6 * 1e6) / 1000.0;
  tx_ms /= static_cast<double>(uploads.size());
  EXPECT_NEAR(tx_ms, 800.0, 1.0);

  const auto& st = r.report.stages;
  EXPECT_DOUBLE_EQ(st[0].ms.mean, 300.0);
  EXPECT_NEAR(st[1].ms.mean, tx_ms, 0.001);
  EXPECT_DOUBLE_EQ(st[2].ms.mean, 2100.0);
  EXPECT_DOUBLE_EQ(st[3].ms.mean, 400.0);
  EXPECT_NEAR(r.report.total_ms.mean, 300.0 + tx_ms + 2100.0 + 400.0, 0.001);
  EXPECT_NEAR(r.report.total_ms.mean, 3600.0, 50.0);
  double sum = 0;
  for (const auto& stage : st) sum += stage.fraction;
  EXPECT_NEAR(sum, 1.0, 1e-3);
  EXPECT_NEAR(r.report.network_fraction, (tx_ms + 400.0) / r.report.total_ms.mean, 1e-6);
  ASSERT_TRUE(r.report.reference_total_ms);
  EXPECT_DOUBLE_EQ(*r.report.reference_total_ms, 2600.0);

  // Stage additivity per upload.
  for (const auto& l : r.latencies) {
    ASSERT_TRUE(l.complete());
    EXPECT_EQ(*l.delivered - *l.capture, (*l.detect_done - *l.capture) + (*l.upload_received - *l.detect_done) +
                                             (*l.analysis_done - *l.upload_received) +
                                             (*l.delivered - *l.analysis_done));
  }
}

TEST(RunScenario, ZeroLatencyNetworkLeavesOnlyInference) {
  auto s = load("budget");
  s.uplink = {};
  s.downlink = {};
  s.provider_latency_ms = 0;
  const auto r = run_scenario(s);
  ASSERT_TRUE(r.passed());
  ASSERT_GT(r.report.uploads_completed, 0u);
  EXPECT_DOUBLE_EQ(r.report.total_ms.mean, 300.0);
  EXPECT_DOUBLE_EQ(r.report.total_ms.max, 300.0);
  EXPECT_DOUBLE_EQ(r.report.stages[0].fraction, 1.0);
}

TEST(RunScenario, EmptySkySendsNoUploadsOrFrames) {
  const auto r = run_scenario(load("empty_sky"));
  EXPECT_TRUE(r.passed());
  EXPECT_TRUE(find(r.trace, "send", "IMAGE_UPLOAD").empty());
  EXPECT_TRUE(find(r.trace, "send", "VIDEO_FRAME").empty());
  EXPECT_EQ(r.report.uplink_bytes_by_phase.at("streaming"), 0u);
  EXPECT_GT(r.report.uplink_bytes_by_phase.at("idle"), 0u);
}

TEST(RunScenario, SingleObjectOpensExactlyOneStreamAfterVerification) {
  const auto r = run_scenario(load("single_object"));
  ASSERT_TRUE(r.passed());
  const auto starts = find(r.trace, "send", "STREAM_START", "up:");
  ASSERT_EQ(starts.size(), 1u);
  const auto verifies = find(r.trace, "recv", "VERIFY_RESULT", "down:");
  ASSERT_EQ(verifies.size(), 1u);
  EXPECT_EQ(verifies[0]->num("verified"), 1);
  EXPECT_LT(verifies[0]->id, starts[0]->id);
  // Both consumers saw the stream start and stop.
  EXPECT_EQ(find(r.trace, "recv", "STREAM_START", "down:consumer").size(), 2u);
  EXPECT_EQ(find(r.trace, "recv", "STREAM_STOP", "down:consumer").size(), 2u);
  EXPECT_GT(r.report.frames_delivered, 0u);
  for (const auto& d : r.displayed) EXPECT_TRUE(d.intact);
}

TEST(RunScenario, UplinkOutageEndsTheStreamAndReconnects) {
  const auto r = run_scenario(load("uplink_outage"));
  ASSERT_TRUE(r.passed());
  EXPECT_EQ(r.edge.connections, 2u);
  const auto drops = find(r.trace, "disconnect");
  ASSERT_EQ(drops.size(), 1u);
  // The consumer is told the interrupted stream is over.
  bool stop_after_drop = false;
  for (const auto* e : find(r.trace, "recv", "STREAM_STOP", "down:consumer-0"))
    if (e->id > drops[0]->id && e->str("stream") == "drone-1-s1") stop_after_drop = true;
  EXPECT_TRUE(stop_after_drop);
  EXPECT_GE(r.edge.streams_started, 2u);
  // The reconnect waits out the 4 s outage with backoff.
  const auto connects = find(r.trace, "connect");
  const auto edge_reconnect = std::find_if(connects.begin(), connects.end(), [&](const TraceEvent* e) {
    return e->str("peer") == "drone-1" && e->id > drops[0]->id;
  });
  ASSERT_NE(edge_reconnect, connects.end());
  EXPECT_GE((*edge_reconnect)->t_us - drops[0]->t_us, 4'000'000);
}

TEST(RunScenario, OperatorResolvesEveryAlert) {
  const auto r = run_scenario(load("operator_shift"));
  ASSERT_TRUE(r.passed());
  ASSERT_GT(r.store.alerts, 0);
  std::set<std::int64_t> resolved;
  for (const auto* e : find(r.trace, "recv", "ALERT_EVENT", "down:operator"))
    if (e->str("status") == "resolved") resolved.insert(e->num("alert"));
  EXPECT_EQ(static_cast<std::int64_t>(resolved.size()), r.store.alerts);
  EXPECT_TRUE(r.report.history_monotone);
}

TEST(RunScenario, RandomizedSoakSample) {
  for (std::uint64_t seed = 1000; seed < 1005; ++seed) {
    const auto r = run_scenario(random_scenario(seed));
    for (const auto& inv : r.report.invariants)
      EXPECT_TRUE(inv.passed) << "seed " << seed << " " << inv.name << ": " << inv.failures.front();
    EXPECT_TRUE(r.report.integrity_ok) << seed;
  }
}

TEST(RunScenario, OutputsAreWrittenAndCheckable) {
  const auto dir = std::filesystem::temp_directory_path() / ("uavlink-sim-" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()));
  const auto r = run_scenario(load("single_object"));
  write_run_outputs(r, dir);
  for (const char* f : {"trace.log", "report.json", "report.txt", "latency.tsv", "display.tsv"})
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  const auto reloaded = TraceLog::load(dir / "trace.log");
  EXPECT_EQ(reloaded.events().size(), r.trace.events().size());
  for (const auto& inv : check_trace(reloaded)) EXPECT_TRUE(inv.passed) << inv.name;
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace uavlink::sim
