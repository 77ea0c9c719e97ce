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
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include "uavlink/protocol/messages.hpp"

namespace uavlink::protocol {

enum class DecodeErrc {
  kTruncated,
  kMalformed,
  kUnknownType,
  kInvalidBase64,
  kStructural,
};

std::string_view to_string(DecodeErrc e);

struct DecodeError {
  DecodeErrc code;
  std::string detail;
};

/// Thrown by encode_envelope for envelopes that violate the message invariants.
class EncodeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Serializes to one JSON document (a WebSocket text message). Binary fields
/// are base64; object keys are sorted, so the output is canonical.
std::string encode_envelope(const Envelope& env);

/// The "payload" member of an encoded envelope. Lets a relay serialize a
/// payload once and stamp it per connection with assemble_envelope.
std::string encode_payload(const Payload& payload);
std::string assemble_envelope(MsgType type, std::string_view payload_json, std::string_view sender_id,
                              std::uint64_t seq, std::int64_t timestamp_ms);

/// Total: returns either the envelope or a typed error, never throws.
std::variant<Envelope, DecodeError> decode_envelope(std::string_view data);

/// Per-(sender, connection) ordering check. Regressed messages are reported so
/// the receiver can drop them.
class SeqTracker {
 public:
  /// True if seq is strictly greater than every previously accepted seq.
  bool accept(std::uint64_t seq, std::int64_t timestamp_ms);
  std::uint64_t regressions() const { return regressions_; }
  std::uint64_t timestamp_regressions() const { return ts_regressions_; }
  std::uint64_t last_seq() const { return last_seq_; }
  void reset() { *this = SeqTracker{}; }

 private:
  bool any_ = false;
  std::uint64_t last_seq_ = 0;
  std::int64_t last_ts_ = 0;
  std::uint64_t regressions_ = 0;
  std::uint64_t ts_regressions_ = 0;
};

/// Assigns per-connection seq numbers at send time.
class Sequencer {
 public:
  explicit Sequencer(std::string sender_id = {}) : sender_id_(std::move(sender_id)) {}
  struct Stamp {
    std::uint64_t seq;
    std::int64_t timestamp_ms;
  };
  /// Timestamps never go backwards on one connection.
  Stamp next(std::int64_t now_ms) {
    if (now_ms < last_ts_) now_ms = last_ts_;
    last_ts_ = now_ms;
    return Stamp{++last_, now_ms};
  }
  Envelope stamp(Envelope env, std::int64_t now_ms) {
    const auto s = next(now_ms);
    env.sender_id = sender_id_;
    env.seq = s.seq;
    env.timestamp_ms = s.timestamp_ms;
    return env;
  }
  void reset() { last_ = 0; last_ts_ = 0; }
  const std::string& sender_id() const { return sender_id_; }

 private:
  std::string sender_id_;
  std::uint64_t last_ = 0;
  std::int64_t last_ts_ = 0;
};

}  // namespace uavlink::protocol
