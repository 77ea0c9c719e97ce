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

#include "uavlink/sim/link.hpp"

#include <algorithm>
#include <cmath>

namespace uavlink::sim {

SimLink::SimLink(std::string name, EventLoop& loop, TraceLog& trace, LinkParams params, std::uint64_t seed)
    : name_(std::move(name)), loop_(loop), trace_(trace), params_(params), rng_(seed) {}

void SimLink::kick() {
  if (kick_pending_ || busy_ || !up_) return;
  kick_pending_ = true;
  loop_.schedule_after(Micros(0), [this, epoch = epoch_] {
    kick_pending_ = false;
    if (epoch == epoch_) pull();
  });
}

void SimLink::pull() {
  if (busy_ || !up_ || !source_) return;
  auto packet = source_();
  if (!packet) return;

  const auto bytes = packet->wire.size();
  const double bw = params_.bandwidth_bps;
  const Micros tx = bw > 0 ? Micros(static_cast<std::int64_t>(std::ceil(static_cast<double>(bytes) * 8.0 / bw * 1e6)))
                           : Micros(0);
  double jitter_ms = 0.0;
  if (params_.jitter_ms > 0) jitter_ms = std::uniform_real_distribution<double>(0.0, params_.jitter_ms)(rng_);
  const auto now = loop_.now();
  const auto arrival = std::max(now + tx + from_ms(params_.latency_ms + jitter_ms), last_arrival_);
  last_arrival_ = arrival;

  TraceLog::Fields fields{kv("link", name_)};
  fields.insert(fields.end(), packet->fields.begin(), packet->fields.end());
  fields.push_back(kv("bytes", static_cast<std::uint64_t>(bytes)));
  fields.push_back(kv("tx_us", static_cast<std::int64_t>(tx.count())));
  fields.push_back(kv("bw", bw));
  trace_.record(now, "send", std::move(fields));
  ++stats_.messages;
  stats_.bytes += bytes;

  busy_ = true;
  in_flight_.push_back(packet->seq);
  const auto epoch = epoch_;
  loop_.schedule_at(now + tx, [this, epoch] {
    if (epoch != epoch_) return;
    busy_ = false;
    pull();
  });
  loop_.schedule_at(arrival, [this, epoch, p = std::move(*packet)]() mutable {
    if (epoch != epoch_) return;
    in_flight_.pop_front();
    TraceLog::Fields fields{kv("link", name_)};
    fields.insert(fields.end(), p.fields.begin(), p.fields.end());
    fields.push_back(kv("bytes", static_cast<std::uint64_t>(p.wire.size())));
    trace_.record(loop_.now(), "recv", std::move(fields));
    if (sink_) sink_(std::move(p));
  });
}

void SimLink::down() {
  if (!up_) return;
  up_ = false;
  ++epoch_;
  busy_ = false;
  kick_pending_ = false;
  for (auto seq : in_flight_) {
    trace_.record(loop_.now(), "lost", {kv("link", name_), kv("seq", seq)});
    ++stats_.lost;
  }
  in_flight_.clear();
  last_arrival_ = loop_.now();
}

void SimLink::up() {
  if (up_) return;
  up_ = true;
  last_arrival_ = std::max(last_arrival_, loop_.now());
  kick();
}

}  // namespace uavlink::sim
