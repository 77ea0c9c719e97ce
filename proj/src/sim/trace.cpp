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

#include "uavlink/sim/trace.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace uavlink::sim {

namespace {

constexpr std::size_t kMaxReported = 20;

std::string escape(std::string_view v) {
  std::string out;
  out.reserve(v.size());
  for (unsigned char c : v) {
    if (c == ' ' || c == '=' || c == '%' || c < 0x20 || c == 0x7f) {
      static constexpr char kHex[] = "0123456789ABCDEF";
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 0xf];
    } else {
      out += static_cast<char>(c);
    }
  }
  return out;
}

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

std::string unescape(std::string_view v, std::size_t line) {
  std::string out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] != '%') {
      out += v[i];
      continue;
    }
    const int hi = i + 1 < v.size() ? hex_digit(v[i + 1]) : -1;
    const int lo = i + 2 < v.size() ? hex_digit(v[i + 2]) : -1;
    if (hi < 0 || lo < 0) throw TraceError("line " + std::to_string(line) + ": bad escape");
    out += static_cast<char>(hi * 16 + lo);
    i += 2;
  }
  return out;
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
  T v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

std::optional<std::string_view> TraceEvent::get(std::string_view key) const {
  for (const auto& [k, v] : fields)
    if (k == key) return std::string_view(v);
  return std::nullopt;
}

std::string TraceEvent::str(std::string_view key, std::string_view fallback) const {
  return std::string(get(key).value_or(fallback));
}

std::int64_t TraceEvent::num(std::string_view key, std::int64_t fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  return parse_number<std::int64_t>(*v).value_or(fallback);
}

double TraceEvent::real(std::string_view key, double fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  return parse_number<double>(*v).value_or(fallback);
}

std::pair<std::string, std::string> kv(std::string key, std::string value) { return {std::move(key), std::move(value)}; }
std::pair<std::string, std::string> kv(std::string key, std::string_view value) {
  return {std::move(key), std::string(value)};
}
std::pair<std::string, std::string> kv(std::string key, const char* value) { return {std::move(key), value}; }
std::pair<std::string, std::string> kv(std::string key, std::int64_t value) {
  return {std::move(key), std::to_string(value)};
}
std::pair<std::string, std::string> kv(std::string key, std::uint64_t value) {
  return {std::move(key), std::to_string(value)};
}
std::pair<std::string, std::string> kv(std::string key, int value) { return {std::move(key), std::to_string(value)}; }
std::pair<std::string, std::string> kv(std::string key, double value) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return {std::move(key), std::string(buf, p)};
}
std::pair<std::string, std::string> kv(std::string key, bool value) { return {std::move(key), value ? "1" : "0"}; }

void TraceLog::record(SimTime t, std::string kind, Fields fields) {
  events_.push_back(TraceEvent{events_.size() + 1, t.count(), std::move(kind), std::move(fields)});
}

std::string format_event(const TraceEvent& e) {
  std::string line = "id=" + std::to_string(e.id) + " t=" + std::to_string(e.t_us) + " ev=" + escape(e.kind);
  for (const auto& [k, v] : e.fields) {
    line += ' ';
    line += escape(k);
    line += '=';
    line += escape(v);
  }
  return line;
}

void TraceLog::write(std::ostream& out) const {
  for (const auto& e : events_) out << format_event(e) << '\n';
}

void TraceLog::write_file(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw TraceError("cannot write " + path.string());
  write(out);
}

TraceLog TraceLog::parse(std::istream& in) {
  TraceLog log;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line.front() == '#') continue;
    TraceEvent e;
    bool have_id = false, have_t = false, have_ev = false;
    std::istringstream tokens(line);
    std::string tok;
    while (tokens >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos || eq == 0)
        throw TraceError("line " + std::to_string(lineno) + ": expected key=value, got '" + tok + "'");
      auto key = unescape(std::string_view(tok).substr(0, eq), lineno);
      auto value = unescape(std::string_view(tok).substr(eq + 1), lineno);
      if (key == "id" && !have_id) {
        auto v = parse_number<std::uint64_t>(value);
        if (!v) throw TraceError("line " + std::to_string(lineno) + ": bad id");
        e.id = *v;
        have_id = true;
      } else if (key == "t" && !have_t) {
        auto v = parse_number<std::int64_t>(value);
        if (!v) throw TraceError("line " + std::to_string(lineno) + ": bad t");
        e.t_us = *v;
        have_t = true;
      } else if (key == "ev" && !have_ev) {
        e.kind = std::move(value);
        have_ev = true;
      } else {
        e.fields.emplace_back(std::move(key), std::move(value));
      }
    }
    if (!have_t || !have_ev) throw TraceError("line " + std::to_string(lineno) + ": missing t or ev");
    if (!have_id) e.id = lineno;
    log.events_.push_back(std::move(e));
  }
  return log;
}

TraceLog TraceLog::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw TraceError("cannot open " + path.string());
  return parse(in);
}

namespace {

struct Checker {
  InvariantResult result;

  explicit Checker(std::string name) { result.name = std::move(name); }
  void ok() { ++result.checked; }
  void fail(const TraceEvent& e, const std::string& what) {
    ++result.checked;
    ++result.failure_count;
    result.passed = false;
    if (result.failures.size() < kMaxReported) result.failures.push_back("event " + std::to_string(e.id) + ": " + what);
  }
};

std::string peer_of(std::string_view link) {
  const auto colon = link.find(':');
  return colon == std::string_view::npos ? std::string(link) : std::string(link.substr(colon + 1));
}

bool is_up(std::string_view link) { return link.starts_with("up:"); }

InvariantResult check_gating(const TraceLog& trace) {
  Checker c("gating");
  std::map<std::string, bool> permit;
  std::map<std::string, std::string> edge_open;
  std::map<std::string, std::set<std::string>> relay_open;
  for (const auto& e : trace.events()) {
    if (e.kind == "connect" || e.kind == "disconnect") {
      const auto p = e.str("peer");
      permit[p] = false;
      edge_open.erase(p);
      relay_open.erase(p);
      continue;
    }
    if (e.kind != "send" && e.kind != "recv") continue;
    const auto link = e.str("link");
    const auto type = e.str("type");
    const auto peer = peer_of(link);
    const auto stream = e.str("stream");
    if (e.kind == "recv") {
      if (!is_up(link) && type == "VERIFY_RESULT" && e.num("verified") == 1) permit[peer] = true;
      continue;
    }
    if (is_up(link)) {
      if (type == "STREAM_START") {
        if (!permit[peer]) c.fail(e, "stream " + stream + " opened without a positive VERIFY_RESULT");
        else c.ok();
        permit[peer] = false;
        edge_open[peer] = stream;
      } else if (type == "STREAM_STOP") {
        if (edge_open[peer] == stream) edge_open.erase(peer);
      } else if (type == "VIDEO_FRAME") {
        auto it = edge_open.find(peer);
        if (it == edge_open.end() || it->second != stream)
          c.fail(e, "VIDEO_FRAME " + stream + "#" + e.str("fseq") + " sent outside a verified stream window");
        else
          c.ok();
      }
    } else {
      if (type == "STREAM_START") {
        relay_open[peer].insert(stream);
      } else if (type == "STREAM_STOP") {
        relay_open[peer].erase(stream);
      } else if (type == "VIDEO_FRAME") {
        if (!relay_open[peer].count(stream))
          c.fail(e, "VIDEO_FRAME " + stream + "#" + e.str("fseq") + " relayed to " + peer + " outside its stream");
        else
          c.ok();
      }
    }
  }
  return c.result;
}

InvariantResult check_ordering(const TraceLog& trace) {
  Checker c("ordering");
  struct LinkState {
    std::uint64_t last_seq = 0;
    std::int64_t last_ts = 0;
    std::deque<std::uint64_t> in_flight;
  };
  std::map<std::string, LinkState> links;
  for (const auto& e : trace.events()) {
    if (e.kind == "connect") {
      const auto p = e.str("peer");
      links["up:" + p] = {};
      links["down:" + p] = {};
      continue;
    }
    if (e.kind == "send") {
      auto& l = links[e.str("link")];
      const auto seq = static_cast<std::uint64_t>(e.num("seq"));
      const auto ts = e.num("ts");
      if (seq <= l.last_seq) c.fail(e, "seq " + std::to_string(seq) + " not above " + std::to_string(l.last_seq));
      else if (ts < l.last_ts) c.fail(e, "timestamp_ms went backwards");
      else c.ok();
      l.last_seq = std::max(l.last_seq, seq);
      l.last_ts = std::max(l.last_ts, ts);
      l.in_flight.push_back(seq);
    } else if (e.kind == "lost") {
      auto& l = links[e.str("link")];
      const auto seq = static_cast<std::uint64_t>(e.num("seq"));
      std::erase(l.in_flight, seq);
    } else if (e.kind == "recv") {
      auto& l = links[e.str("link")];
      const auto seq = static_cast<std::uint64_t>(e.num("seq"));
      if (l.in_flight.empty() || l.in_flight.front() != seq) {
        c.fail(e, "seq " + std::to_string(seq) + " delivered out of send order on " + e.str("link"));
        std::erase(l.in_flight, seq);
      } else {
        c.ok();
        l.in_flight.pop_front();
      }
    } else if (e.kind == "latency") {
      static constexpr const char* kStages[] = {"capture", "detect", "upload", "verify", "analysis", "delivered"};
      bool ok = true;
      for (std::size_t i = 1; i < std::size(kStages) && ok; ++i)
        if (e.has(kStages[i]) && e.num(kStages[i]) < e.num(kStages[i - 1])) {
          c.fail(e, std::string(kStages[i]) + " precedes " + kStages[i - 1]);
          ok = false;
        }
      if (ok) c.ok();
    }
  }
  return c.result;
}

InvariantResult check_throughput(const TraceLog& trace) {
  Checker c("throughput");
  double fps = 0.0;
  // Largest jitter seen so far in each direction.
  double up_jitter = 0.0, down_jitter = 0.0;
  auto eps_us = [&] { return 1'000.0 * (1.0 + up_jitter + down_jitter); };
  struct Tx {
    std::int64_t start, end;
    double bytes, bw;
    const TraceEvent* event;
  };
  std::map<std::string, std::vector<Tx>> sends;
  std::map<std::string, std::int64_t> last_encode;
  std::map<std::pair<std::string, std::string>, std::int64_t> last_frame;
  // Streams started before a link changed. A backlog built before the change
  // can drain faster afterwards, so the consumer floor does not apply.
  std::set<std::string> started, unsteady;
  for (const auto& e : trace.events()) {
    if (e.kind == "config") {
      fps = e.real("encoder_fps", fps);
      up_jitter = std::max(up_jitter, e.real("uplink_jitter_ms"));
      down_jitter = std::max(down_jitter, e.real("downlink_jitter_ms"));
    } else if (e.kind == "link") {
      unsteady.insert(started.begin(), started.end());
      auto& j = e.str("name") == "uplink" ? up_jitter : down_jitter;
      j = std::max(j, e.real("jitter_ms"));
    } else if (e.kind == "connect") {
      for (auto it = last_frame.begin(); it != last_frame.end();)
        it = it->first.first == "down:" + e.str("peer") ? last_frame.erase(it) : std::next(it);
    } else if (e.kind == "encode" && e.num("admitted") == 1 && fps > 0) {
      const auto node = e.str("node");
      auto it = last_encode.find(node);
      if (it != last_encode.end() && static_cast<double>(e.t_us - it->second) < 1e6 / fps - 1'000.0)
        c.fail(e, "encoder admitted frame " + e.str("frame") + " " + std::to_string(e.t_us - it->second) +
                      " us after the previous one");
      else
        c.ok();
      last_encode[node] = e.t_us;
    } else if (e.kind == "send") {
      const double bw = e.real("bw");
      const double bytes = static_cast<double>(e.num("bytes"));
      const auto tx = e.num("tx_us");
      const auto link = e.str("link");
      auto& list = sends[link];
      if (bw > 0 && static_cast<double>(tx) + 1.0 < bytes * 8.0 / bw * 1e6) {
        c.fail(e, "transmitted " + e.str("bytes") + " bytes in " + std::to_string(tx) + " us, faster than " +
                      e.str("bw") + " bps");
      } else if (!list.empty() && e.t_us + 1 < list.back().end) {
        c.fail(e, "transmission overlaps the previous one on " + link);
      } else {
        c.ok();
      }
      list.push_back(Tx{e.t_us, e.t_us + tx, bytes, bw, &e});
      if (is_up(link) && e.str("type") == "STREAM_START") started.insert(e.str("stream"));
    } else if (e.kind == "disconnect") {
      // A transmission cut by the disconnect ends here.
      for (const auto& name : {"up:" + e.str("peer"), "down:" + e.str("peer")}) {
        auto it = sends.find(name);
        if (it == sends.end() || it->second.empty()) continue;
        auto& last = it->second.back();
        if (last.end > e.t_us) {
          last.bytes *= static_cast<double>(e.t_us - last.start) / static_cast<double>(last.end - last.start);
          last.end = e.t_us;
        }
      }
    } else if (e.kind == "recv" && e.str("type") == "VIDEO_FRAME" && !is_up(e.str("link")) && fps > 0) {
      auto key = std::make_pair(e.str("link"), e.str("stream"));
      if (unsteady.count(key.second)) continue;
      auto it = last_frame.find(key);
      if (it != last_frame.end()) {
        const double gap = static_cast<double>(e.t_us - it->second);
        if (gap < 1e6 / fps - eps_us())
          c.fail(e, "frames " + std::to_string(static_cast<std::int64_t>(gap)) + " us apart on " + key.first +
                        ", below the encoder interval");
        else
          c.ok();
      }
      last_frame[key] = e.t_us;
    }
  }
  // Bytes per one-second window, prorated over transmission intervals.
  for (const auto& [link, list] : sends) {
    std::map<std::int64_t, std::pair<double, double>> windows;  // second -> (bytes, max bw)
    for (const auto& tx : list) {
      if (tx.bw <= 0) continue;
      const auto dur = std::max<std::int64_t>(tx.end - tx.start, 1);
      for (auto w = tx.start / 1'000'000; w * 1'000'000 < tx.end || w == tx.start / 1'000'000; ++w) {
        const auto lo = std::max(tx.start, w * 1'000'000);
        const auto hi = std::min(tx.end, (w + 1) * 1'000'000);
        if (hi <= lo && tx.end > tx.start) continue;
        auto& win = windows[w];
        win.first += tx.end > tx.start ? tx.bytes * static_cast<double>(hi - lo) / static_cast<double>(dur) : tx.bytes;
        win.second = std::max(win.second, tx.bw);
      }
    }
    for (const auto& [w, win] : windows) {
      if (win.first > win.second / 8.0 + 1.0) {
        TraceEvent at;
        at.id = 0;
        for (const auto& tx : list)
          if (tx.end > w * 1'000'000 && tx.start < (w + 1) * 1'000'000) {
            at.id = tx.event->id;
            break;
          }
        c.fail(at, link + " carried " + std::to_string(static_cast<std::int64_t>(win.first)) + " bytes in second " +
                       std::to_string(w));
      } else {
        c.ok();
      }
    }
  }
  return c.result;
}

InvariantResult check_referential(const TraceLog& trace) {
  Checker c("referential");
  std::set<std::int64_t> rules, detections, alerts;
  for (const auto& e : trace.events()) {
    if (e.kind == "rule") {
      rules.insert(e.num("id"));
    } else if (e.kind == "detection") {
      detections.insert(e.num("id"));
    } else if (e.kind == "alert") {
      const auto d = e.num("detection", -1), r = e.num("rule", -1);
      if (!detections.count(d)) c.fail(e, "alert " + e.str("id") + " references unknown detection " + e.str("detection"));
      else if (!rules.count(r)) c.fail(e, "alert " + e.str("id") + " references unknown rule " + e.str("rule"));
      else c.ok();
      alerts.insert(e.num("id"));
    } else if (e.kind == "recv" || e.kind == "send") {
      const auto type = e.str("type");
      if (type == "VERIFY_RESULT" && e.has("alert")) {
        if (!alerts.count(e.num("alert")) || !rules.count(e.num("rule", -1)))
          c.fail(e, "VERIFY_RESULT references unknown alert " + e.str("alert") + " or rule " + e.str("rule"));
        else
          c.ok();
      } else if (type == "ANALYSIS") {
        if (!detections.count(e.num("detection", -1)))
          c.fail(e, "ANALYSIS references unknown detection " + e.str("detection"));
        else
          c.ok();
      } else if ((type == "ALERT_EVENT" || type == "ALERT_ACK") && !e.has("error")) {
        if (!alerts.count(e.num("alert", -1))) c.fail(e, type + " references unknown alert " + e.str("alert"));
        else c.ok();
      }
    }
  }
  return c.result;
}

}  // namespace

std::vector<InvariantResult> check_trace(const TraceLog& trace, const std::vector<Invariant>& only) {
  auto want = [&](Invariant i) { return only.empty() || std::find(only.begin(), only.end(), i) != only.end(); };
  std::vector<InvariantResult> out;
  if (want(Invariant::kGating)) out.push_back(check_gating(trace));
  if (want(Invariant::kOrdering)) out.push_back(check_ordering(trace));
  if (want(Invariant::kThroughput)) out.push_back(check_throughput(trace));
  if (want(Invariant::kReferential)) out.push_back(check_referential(trace));
  return out;
}

}  // namespace uavlink::sim
