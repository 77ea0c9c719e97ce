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

#include "uavlink/core/random.hpp"

#include <cstring>

namespace uavlink {

Bytes synthetic_bytes(std::uint64_t seed, std::size_t size) {
  Bytes out(size);
  std::uint64_t state = seed;
  std::size_t i = 0;
  for (; i + 8 <= size; i += 8) {
    const std::uint64_t v = splitmix64(state);
    std::memcpy(out.data() + i, &v, 8);
  }
  if (i < size) {
    const std::uint64_t v = splitmix64(state);
    std::memcpy(out.data() + i, &v, size - i);
  }
  return out;
}

}  // namespace uavlink
