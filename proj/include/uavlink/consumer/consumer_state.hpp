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
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "uavlink/protocol/codec.hpp"

namespace uavlink::consumer {

/// One frame shown to the viewer.
struct DisplayRecord {
  std::string stream_id;
  std::uint64_t frame_seq = 0;
  std::int64_t capture_ts_ms = 0;
  std::int64_t encode_ts_ms = 0;
  std::int64_t received_ts_ms = 0;
  std::int64_t display_ts_ms = 0;
  std::size_t bytes = 0;
  bool intact = false;

  std::int64_t glass_to_glass_ms() const { return display_ts_ms - capture_ts_ms; }
};

struct AnalysisRecord {
  Id detection_id = 0;
  std::int64_t received_ts_ms = 0;
  std::string text;
};

struct ConsumerStats {
  std::uint64_t messages = 0;
  std::uint64_t decode_errors = 0;
  std::uint64_t seq_discards = 0;
  std::uint64_t frames = 0;
  std::uint64_t corrupt_frames = 0;
  std::uint64_t frames_outside_stream = 0;
  std::uint64_t frame_seq_regressions = 0;
  /// Frames the server evicted, inferred from frame_seq gaps.
  std::uint64_t frames_missed = 0;
  std::uint64_t streams_started = 0;
  std::uint64_t streams_stopped = 0;
  std::uint64_t analyses = 0;
};

/// Viewer-side protocol state: ordering checks, stream bookkeeping and the
/// display log. Feed it raw messages from a /consume connection.
class ConsumerState {
 public:
  explicit ConsumerState(std::int64_t display_delay_ms = 0) : display_delay_ms_(display_delay_ms) {}

  /// Returns the display record when the message was a video frame.
  std::optional<DisplayRecord> on_message(std::string_view wire, std::int64_t now_ms);
  std::optional<DisplayRecord> on_envelope(const protocol::Envelope& env, std::int64_t now_ms);
  /// A new connection restarts seq numbering.
  void on_reconnect();

  bool accepted() const { return accepted_; }
  const std::set<std::string>& active_streams() const { return active_; }
  const std::vector<DisplayRecord>& displayed() const { return displayed_; }
  const std::vector<AnalysisRecord>& analyses() const { return analyses_; }
  const ConsumerStats& stats() const { return stats_; }

 private:
  std::int64_t display_delay_ms_;
  protocol::SeqTracker seq_;
  bool accepted_ = false;
  std::set<std::string> active_;
  std::map<std::string, std::uint64_t> last_frame_seq_;
  std::vector<DisplayRecord> displayed_;
  std::vector<AnalysisRecord> analyses_;
  ConsumerStats stats_;
};

/// Tab-separated display log with a header row.
void write_display_log(std::ostream& out, const std::vector<DisplayRecord>& records);

}  // namespace uavlink::consumer
