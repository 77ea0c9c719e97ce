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

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>

#include "uavlink/core/base64.hpp"

namespace uavlink::server {

/// Blob storage for uploaded stills. Returns an opaque reference that the
/// detection row keeps as image_ref.
class ObjectStore {
 public:
  virtual ~ObjectStore() = default;
  virtual std::string put(const std::string& key, const Bytes& data) = 0;
  virtual std::optional<Bytes> get(const std::string& ref) = 0;
};

class MemoryObjectStore final : public ObjectStore {
 public:
  std::string put(const std::string& key, const Bytes& data) override;
  std::optional<Bytes> get(const std::string& ref) override;
  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, Bytes> blobs_;
};

/// One file per object under `root`; writes go through a temporary file and
/// a rename so readers never see partial blobs.
class LocalObjectStore final : public ObjectStore {
 public:
  explicit LocalObjectStore(std::filesystem::path root);
  std::string put(const std::string& key, const Bytes& data) override;
  std::optional<Bytes> get(const std::string& ref) override;

 private:
  std::filesystem::path path_for(const std::string& key) const;
  std::filesystem::path root_;
};

}  // namespace uavlink::server
