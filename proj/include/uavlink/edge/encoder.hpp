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
#include <optional>
#include <string>

#include "uavlink/core/base64.hpp"
#include "uavlink/edge/frame_source.hpp"
#include "uavlink/protocol/messages.hpp"
#include "uavlink/scenario/scenario.hpp"

namespace uavlink::edge {

/// Operating point of the CPU-only H.264 encoder on the edge computer.
struct EncoderProfile {
  double achievable_fps;
  double output_bitrate_bps;
  double cpu_fraction;

  double frame_interval_ms() const { return 1000.0 / achievable_fps; }
  /// bitrate / (8 * fps), rounded to whole bytes.
  std::size_t payload_bytes() const;
};

/// ultrafast -> (0.5 fps, 5 Mbps, 0.99); medium/slow -> 0.05 fps, 0.99 CPU.
EncoderProfile encoder_profile(EncoderPreset preset);

struct EncodeResult {
  /// Empty when the frame was skipped.
  std::optional<protocol::VideoFrame> frame;
  double encode_time_ms = 0.0;
};

/// Admission-controlled encoder model. Frames arriving before the encoder can
/// take another are skipped (drop-newest), so output never exceeds
/// achievable_fps.
class Encoder {
 public:
  explicit Encoder(EncoderPreset preset) : preset_(preset), profile_(encoder_profile(preset)) {}

  /// encode_ts_ms of the result is the completion time now_ms + encode_time_ms.
  EncodeResult encode_frame(const Frame& frame, std::int64_t now_ms, const std::string& stream_id,
                            std::uint64_t frame_seq, std::int64_t capture_ts_ms);

  EncoderPreset preset() const { return preset_; }
  const EncoderProfile& profile() const { return profile_; }
  std::uint64_t admitted() const { return admitted_; }
  std::uint64_t skipped() const { return skipped_; }

 private:
  EncoderPreset preset_;
  EncoderProfile profile_;
  std::optional<double> next_admit_ms_;
  std::uint64_t admitted_ = 0;
  std::uint64_t skipped_ = 0;
};

/// Deterministic stand-in for an encoded frame: a 24-byte header
/// ("UAVF", frame id, width, height, total size; little endian) followed by
/// pseudo-random bytes derived from the header alone.
Bytes synthetic_frame_payload(std::uint64_t frame_id, Resolution res, std::size_t size);

/// True if `payload` is exactly what synthetic_frame_payload would produce
/// for the header it carries.
bool verify_synthetic_frame(const Bytes& payload);

/// Frame id from a synthetic payload header.
std::optional<std::uint64_t> synthetic_frame_id(const Bytes& payload);

}  // namespace uavlink::edge
