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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "support/generators.hpp"
#include "uavlink/core/base64.hpp"
#include "uavlink/protocol/codec.hpp"

namespace uavlink::protocol {
namespace {

using uavlink::testing::Gen;

DecodeErrc error_of(std::string_view data) {
  auto r = decode_envelope(data);
  EXPECT_TRUE(std::holds_alternative<DecodeError>(r)) << data.substr(0, 200);
  if (auto* e = std::get_if<DecodeError>(&r)) return e->code;
  return DecodeErrc::kStructural;
}

Envelope decode_ok(std::string_view data) {
  auto r = decode_envelope(data);
  if (auto* e = std::get_if<DecodeError>(&r)) {
    ADD_FAILURE() << to_string(e->code) << ": " << e->detail;
    return {};
  }
  return std::get<Envelope>(r);
}

TEST(Base64, KnownVectors) {
  auto enc = [](std::string_view s) {
    return base64::encode(std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
  };
  EXPECT_EQ(enc(""), "");
  EXPECT_EQ(enc("f"), "Zg==");
  EXPECT_EQ(enc("fo"), "Zm8=");
  EXPECT_EQ(enc("foo"), "Zm9v");
  EXPECT_EQ(enc("foobar"), "Zm9vYmFy");
}

TEST(Base64, RejectsInvalidText) {
  EXPECT_FALSE(base64::decode("Zg=").has_value());
  EXPECT_FALSE(base64::decode("Z===").has_value());
  EXPECT_FALSE(base64::decode("Zm9v!A==").has_value());
  EXPECT_FALSE(base64::decode("Zh==").has_value());  // non-zero padding bits
  EXPECT_FALSE(base64::decode("Zg==Zg==").has_value());
  EXPECT_FALSE(base64::decode("Z=g=").has_value());
}

TEST(Base64, RandomPayloadsRoundTripUpTo4MiB) {
  Gen gen(42);
  std::vector<std::size_t> sizes{1, 2, 3, 4, 5, 255, 256, 1000, 65537, 4u << 20};
  for (int i = 0; i < 30; ++i) sizes.push_back(static_cast<std::size_t>(gen.i64(1, 200000)));
  for (auto n : sizes) {
    const auto data = gen.bytes(n, n);
    const auto text = base64::encode(data);
    const auto back = base64::decode(text);
    ASSERT_TRUE(back.has_value()) << n;
    EXPECT_EQ(*back, data) << n;
  }
}

TEST(Codec, HelloRoundTrip) {
  const auto env = make_envelope(Hello{Role::kEdge, "s3cret", std::nullopt}, "drone-1", 1, 1700000000000);
  const auto bytes = encode_envelope(env);
  EXPECT_EQ(decode_ok(bytes), env);
}

TEST(Codec, EmptyFrameDataRejected) {
  VideoFrame f;
  f.stream_id = "s-1";
  EXPECT_THROW(encode_envelope(make_envelope(f, "drone-1", 1, 0)), EncodeError);
}

TEST(Codec, TypePayloadMismatchRejected) {
  auto env = make_envelope(StreamStart{"s-1"}, "drone-1", 1, 0);
  env.msg_type = MsgType::kStreamStop;
  EXPECT_THROW(encode_envelope(env), EncodeError);
}

TEST(Codec, InvalidObservationRejectedOnEncode) {
  ImageUpload up;
  up.image_data = {1, 2, 3};
  up.detections.push_back(ObjectObservation{"person", 1.5, 0.5, 0.5, 0.1, 0.1, 0.0});
  EXPECT_THROW(encode_envelope(make_envelope(up, "drone-1", 1, 0)), EncodeError);
}

TEST(Codec, RandomizedEnvelopesRoundTrip) {
  Gen gen(2024);
  for (int i = 0; i < 1000; ++i) {
    const auto env = gen.envelope();
    const auto bytes = encode_envelope(env);
    const auto back = decode_ok(bytes);
    ASSERT_EQ(back, env) << bytes.substr(0, 300);
    EXPECT_EQ(encode_envelope(back), bytes);
  }
}

TEST(Codec, EmptyInputIsTruncated) { EXPECT_EQ(error_of(""), DecodeErrc::kTruncated); }

TEST(Codec, CutShortDocumentIsTruncated) {
  const auto bytes = encode_envelope(make_envelope(StreamStart{"s-1"}, "drone-1", 4, 10));
  for (std::size_t n = 1; n < bytes.size(); ++n) EXPECT_EQ(error_of(bytes.substr(0, n)), DecodeErrc::kTruncated) << n;
}

TEST(Codec, DistinctErrorCodes) {
  EXPECT_EQ(error_of("{\"msg_type\":\"NOPE\",\"sender_id\":\"x\",\"seq\":1,\"timestamp_ms\":0,\"payload\":{}}"),
            DecodeErrc::kUnknownType);
  EXPECT_EQ(error_of("{\"msg_type\":\"VIDEO_FRAME\",\"sender_id\":\"x\",\"seq\":1,\"timestamp_ms\":0,\"payload\":"
                     "{\"stream_id\":\"s\",\"frame_seq\":1,\"frame_data\":\"@@@@\",\"encode_ts_ms\":0,"
                     "\"capture_ts_ms\":0}}"),
            DecodeErrc::kInvalidBase64);
  EXPECT_EQ(error_of("{\"msg_type\":\"STREAM_START\",\"sender_id\":\"x\",\"seq\":-1,\"timestamp_ms\":0,"
                     "\"payload\":{\"stream_id\":\"s\"}}"),
            DecodeErrc::kStructural);
  EXPECT_EQ(error_of("{\"msg_type\":\"STREAM_START\",\"sender_id\":\"x\",\"seq\":1,\"timestamp_ms\":0,"
                     "\"payload\":{}}"),
            DecodeErrc::kStructural);
  EXPECT_EQ(error_of("[1,2,3]"), DecodeErrc::kMalformed);
  EXPECT_EQ(error_of("{\"a\" 1}"), DecodeErrc::kMalformed);
  EXPECT_EQ(error_of("\x01\x02garbage"), DecodeErrc::kMalformed);
}

TEST(Codec, EmptyBase64PayloadIsStructural) {
  EXPECT_EQ(error_of("{\"msg_type\":\"VIDEO_FRAME\",\"sender_id\":\"x\",\"seq\":1,\"timestamp_ms\":0,\"payload\":"
                     "{\"stream_id\":\"s\",\"frame_seq\":1,\"frame_data\":\"\",\"encode_ts_ms\":0,"
                     "\"capture_ts_ms\":0}}"),
            DecodeErrc::kStructural);
}

TEST(Codec, FuzzedInputOnlyProducesTypedErrors) {
  Gen gen(99);
  std::vector<std::string> seeds;
  for (int i = 0; i < 50; ++i) seeds.push_back(encode_envelope(gen.envelope()));
  for (int i = 0; i < 2000; ++i) {
    std::string data;
    if (gen.coin(0.3)) {
      const auto b = gen.bytes(0, 300);
      data.assign(b.begin(), b.end());
    } else {
      data = gen.pick(seeds);
      const int edits = gen.integer(1, 6);
      for (int k = 0; k < edits && !data.empty(); ++k) {
        const auto pos = static_cast<std::size_t>(gen.i64(0, static_cast<std::int64_t>(data.size()) - 1));
        switch (gen.integer(0, 2)) {
          case 0: data[pos] = static_cast<char>(gen.integer(0, 255)); break;
          case 1: data.erase(pos, 1); break;
          default: data.resize(pos); break;
        }
      }
    }
    auto r = decode_envelope(data);
    if (auto* env = std::get_if<Envelope>(&r)) {
      // Whatever survives mutation must itself be encodable.
      EXPECT_NO_THROW(encode_envelope(*env));
    }
  }
}

TEST(SeqTracker, DropsRegressions) {
  SeqTracker t;
  EXPECT_TRUE(t.accept(1, 10));
  EXPECT_TRUE(t.accept(3, 11));
  EXPECT_FALSE(t.accept(3, 12));
  EXPECT_FALSE(t.accept(2, 12));
  EXPECT_TRUE(t.accept(4, 5));
  EXPECT_EQ(t.regressions(), 2u);
  EXPECT_EQ(t.timestamp_regressions(), 1u);
}

TEST(Sequencer, StampsIncreasingSeqAndMonotoneTime) {
  Sequencer s("server");
  auto a = s.stamp(make_envelope(StreamStart{"x"}), 100);
  auto b = s.stamp(make_envelope(StreamStart{"x"}), 90);
  EXPECT_EQ(a.seq, 1u);
  EXPECT_EQ(b.seq, 2u);
  EXPECT_EQ(b.timestamp_ms, 100);
  EXPECT_EQ(b.sender_id, "server");
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  auto s = ss.str();
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
  return s;
}

TEST(Golden, SamplesRoundTripBitExact) {
  std::size_t count = 0;
  std::set<MsgType> covered;
  for (const auto& entry : std::filesystem::directory_iterator(UAVLINK_GOLDEN_DIR)) {
    if (entry.path().extension() != ".json") continue;
    const auto text = read_file(entry.path());
    const auto env = decode_ok(text);
    covered.insert(env.msg_type);
    EXPECT_EQ(encode_envelope(env), text) << entry.path();
    ++count;
  }
  EXPECT_EQ(covered.size(), 12u) << "every message type needs a golden sample";
  EXPECT_GE(count, 12u);
}

}  // namespace
}  // namespace uavlink::protocol
