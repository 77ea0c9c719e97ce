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

#include "uavlink/consumer/consumer_state.hpp"

#include "uavlink/edge/encoder.hpp"

namespace uavlink::consumer {

using namespace protocol;

std::optional<DisplayRecord> ConsumerState::on_message(std::string_view wire, std::int64_t now_ms) {
  auto decoded = decode_envelope(wire);
  if (std::holds_alternative<DecodeError>(decoded)) {
    ++stats_.decode_errors;
    return std::nullopt;
  }
  return on_envelope(std::get<Envelope>(decoded), now_ms);
}

void ConsumerState::on_reconnect() {
  seq_.reset();
  accepted_ = false;
  active_.clear();
}

std::optional<DisplayRecord> ConsumerState::on_envelope(const Envelope& env, std::int64_t now_ms) {
  ++stats_.messages;
  if (!seq_.accept(env.seq, env.timestamp_ms)) {
    ++stats_.seq_discards;
    return std::nullopt;
  }
  if (const auto* ack = std::get_if<HelloAck>(&env.payload)) {
    accepted_ = ack->accepted;
  } else if (const auto* s = std::get_if<StreamStart>(&env.payload)) {
    ++stats_.streams_started;
    active_.insert(s->stream_id);
    last_frame_seq_.erase(s->stream_id);
  } else if (const auto* s = std::get_if<StreamStop>(&env.payload)) {
    ++stats_.streams_stopped;
    active_.erase(s->stream_id);
  } else if (const auto* a = std::get_if<Analysis>(&env.payload)) {
    ++stats_.analyses;
    analyses_.push_back(AnalysisRecord{a->detection_id, now_ms, a->text});
  } else if (const auto* f = std::get_if<VideoFrame>(&env.payload)) {
    ++stats_.frames;
    if (!active_.count(f->stream_id)) {
      ++stats_.frames_outside_stream;
      return std::nullopt;
    }
    auto& last = last_frame_seq_[f->stream_id];
    if (f->frame_seq <= last) {
      ++stats_.frame_seq_regressions;
      return std::nullopt;
    }
    stats_.frames_missed += f->frame_seq - last - 1;
    last = f->frame_seq;

    DisplayRecord r;
    r.stream_id = f->stream_id;
    r.frame_seq = f->frame_seq;
    r.capture_ts_ms = f->capture_ts_ms;
    r.encode_ts_ms = f->encode_ts_ms;
    r.received_ts_ms = now_ms;
    r.display_ts_ms = now_ms + display_delay_ms_;
    r.bytes = f->frame_data.size();
    r.intact = edge::verify_synthetic_frame(f->frame_data);
    if (!r.intact) ++stats_.corrupt_frames;
    displayed_.push_back(r);
    return r;
  }
  return std::nullopt;
}

void write_display_log(std::ostream& out, const std::vector<DisplayRecord>& records) {
  out << "stream_id\tframe_seq\tcapture_ts_ms\tencode_ts_ms\treceived_ts_ms\tdisplay_ts_ms\tglass_to_glass_ms\tbytes"
         "\tintact\n";
  for (const auto& r : records)
    out << r.stream_id << '\t' << r.frame_seq << '\t' << r.capture_ts_ms << '\t' << r.encode_ts_ms << '\t'
        << r.received_ts_ms << '\t' << r.display_ts_ms << '\t' << r.glass_to_glass_ms() << '\t' << r.bytes << '\t'
        << (r.intact ? 1 : 0) << '\n';
}

}  // namespace uavlink::consumer
