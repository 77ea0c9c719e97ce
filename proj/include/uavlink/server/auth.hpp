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

#include <string>
#include <string_view>

namespace uavlink::server {

/// Lowercase hex SHA-256, the format of User::auth_token_hash.
std::string sha256_hex(std::string_view data);

/// Compares without an early exit on the first differing byte.
bool constant_time_equal(std::string_view a, std::string_view b);

}  // namespace uavlink::server
