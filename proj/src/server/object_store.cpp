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

#include "uavlink/server/object_store.hpp"

#include <atomic>
#include <fstream>
#include <stdexcept>

namespace uavlink::server {

namespace {

constexpr std::string_view kMemScheme = "mem://";
constexpr std::string_view kFileScheme = "file://";

void check_key(const std::string& key) {
  if (key.empty() || key.front() == '/' || key.find("..") != std::string::npos)
    throw std::invalid_argument("bad object key: " + key);
}

}  // namespace

std::string MemoryObjectStore::put(const std::string& key, const Bytes& data) {
  check_key(key);
  std::lock_guard lock(mu_);
  blobs_[key] = data;
  return std::string(kMemScheme) + key;
}

std::optional<Bytes> MemoryObjectStore::get(const std::string& ref) {
  if (!ref.starts_with(kMemScheme)) return std::nullopt;
  std::lock_guard lock(mu_);
  auto it = blobs_.find(ref.substr(kMemScheme.size()));
  if (it == blobs_.end()) return std::nullopt;
  return it->second;
}

std::size_t MemoryObjectStore::size() const {
  std::lock_guard lock(mu_);
  return blobs_.size();
}

LocalObjectStore::LocalObjectStore(std::filesystem::path root) : root_(std::filesystem::absolute(std::move(root))) {
  std::filesystem::create_directories(root_);
}

std::filesystem::path LocalObjectStore::path_for(const std::string& key) const { return root_ / key; }

std::string LocalObjectStore::put(const std::string& key, const Bytes& data) {
  check_key(key);
  static std::atomic<std::uint64_t> counter{0};
  const auto final_path = path_for(key);
  std::filesystem::create_directories(final_path.parent_path());
  auto tmp = final_path;
  tmp += ".tmp" + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, final_path);
  return std::string(kFileScheme) + final_path.string();
}

std::optional<Bytes> LocalObjectStore::get(const std::string& ref) {
  if (!ref.starts_with(kFileScheme)) return std::nullopt;
  const std::filesystem::path p = ref.substr(kFileScheme.size());
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace uavlink::server
