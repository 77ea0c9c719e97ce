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
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace uavlink {

using Bytes = std::vector<std::uint8_t>;

namespace base64 {

/// RFC 4648 standard alphabet with '=' padding.
std::string encode(std::span<const std::uint8_t> data);

/// Strict decode: rejects non-alphabet characters, bad padding and
/// non-canonical trailing bits, so encode(decode(s)) == s whenever it succeeds.
std::optional<Bytes> decode(std::string_view text);

}  // namespace base64
}  // namespace uavlink
