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

#include "uavlink/edge/encoder.hpp"

#include <cmath>
#include <cstring>

#include "uavlink/core/random.hpp"

namespace uavlink::edge {
namespace {

constexpr std::size_t kHeaderBytes = 24;
constexpr char kMagic[4] = {'U', 'A', 'V', 'F'};

void put_le(Bytes& out, std::size_t at, std::uint64_t v, int n) {
  for (int i = 0; i < n; ++i) out[at + static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(v >> (8 * i));
}

std::uint64_t get_le(const Bytes& in, std::size_t at, int n) {
  std::uint64_t v = 0;
  for (int i = 0; i < n; ++i) v |= std::uint64_t{in[at + static_cast<std::size_t>(i)]} << (8 * i);
  return v;
}

}  // namespace

std::size_t EncoderProfile::payload_bytes() const {
  return static_cast<std::size_t>(std::llround(output_bitrate_bps / (8.0 * achievable_fps)));
}

EncoderProfile encoder_profile(EncoderPreset preset) {
  // medium/slow bitrates are not reported for the platform; these values only
  // size the synthetic payload (slower presets compress harder).
  switch (preset) {
    case EncoderPreset::kUltrafast: return {0.5, 5'000'000.0, 0.99};
    case EncoderPreset::kMedium: return {0.05, 400'000.0, 0.99};
    case EncoderPreset::kSlow: return {0.05, 320'000.0, 0.99};
  }
  return {0.5, 5'000'000.0, 0.99};
}

EncodeResult Encoder::encode_frame(const Frame& frame, std::int64_t now_ms, const std::string& stream_id,
                                   std::uint64_t frame_seq, std::int64_t capture_ts_ms) {
  EncodeResult result;
  const double now = static_cast<double>(now_ms);
  if (next_admit_ms_ && now < *next_admit_ms_) {
    ++skipped_;
    return result;
  }
  ++admitted_;
  next_admit_ms_ = now + profile_.frame_interval_ms();
  result.encode_time_ms = profile_.frame_interval_ms();
  protocol::VideoFrame f;
  f.stream_id = stream_id;
  f.frame_seq = frame_seq;
  f.frame_data = synthetic_frame_payload(frame.id, dimensions(frame.resolution), profile_.payload_bytes());
  f.encode_ts_ms = now_ms + static_cast<std::int64_t>(std::llround(result.encode_time_ms));
  f.capture_ts_ms = capture_ts_ms;
  result.frame = std::move(f);
  return result;
}

Bytes synthetic_frame_payload(std::uint64_t frame_id, Resolution res, std::size_t size) {
  if (size < kHeaderBytes) size = kHeaderBytes;
  Bytes out = synthetic_bytes(mix_seed({frame_id, res.width, res.height, size}), size);
  std::memcpy(out.data(), kMagic, 4);
  put_le(out, 4, frame_id, 8);
  put_le(out, 12, res.width, 4);
  put_le(out, 16, res.height, 4);
  put_le(out, 20, size, 4);
  return out;
}

std::optional<std::uint64_t> synthetic_frame_id(const Bytes& payload) {
  if (payload.size() < kHeaderBytes || std::memcmp(payload.data(), kMagic, 4) != 0) return std::nullopt;
  return get_le(payload, 4, 8);
}

bool verify_synthetic_frame(const Bytes& payload) {
  const auto id = synthetic_frame_id(payload);
  if (!id) return false;
  const Resolution res{static_cast<std::uint32_t>(get_le(payload, 12, 4)),
                       static_cast<std::uint32_t>(get_le(payload, 16, 4))};
  const auto size = static_cast<std::size_t>(get_le(payload, 20, 4));
  if (size != payload.size()) return false;
  return synthetic_frame_payload(*id, res, size) == payload;
}

}  // namespace uavlink::edge
