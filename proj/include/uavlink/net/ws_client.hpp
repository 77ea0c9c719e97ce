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

#include <boost/asio/io_context.hpp>
#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>

namespace uavlink::net {

struct WsTarget {
  std::string host = "127.0.0.1";
  std::uint16_t port = 8080;
  std::string path = "/edge";

  /// Parses ws://host:port/path.
  static WsTarget parse(const std::string& url);
};

/// Asynchronous WebSocket client. Outgoing text is pulled from `source`
/// whenever the socket is idle and kick() has been called.
class WsClient : public std::enable_shared_from_this<WsClient> {
 public:
  struct Handlers {
    std::function<void()> on_open;
    std::function<void(std::string)> on_message;
    /// Called once per connection attempt that fails or ends.
    std::function<void(std::string reason)> on_close;
    std::function<std::optional<std::string>()> source;
  };

  static std::shared_ptr<WsClient> create(boost::asio::io_context& ioc, WsTarget target, Handlers handlers);

  void connect();
  void kick();
  void close();
  /// A paused client stops reading; the peer's writes eventually block.
  void pause_reading(bool paused);
  bool is_open() const { return open_; }
  bool writing() const { return writing_; }

 private:
  WsClient(boost::asio::io_context& ioc, WsTarget target, Handlers handlers);
  void read();
  void fail(const std::string& reason);

  struct Impl;
  std::shared_ptr<Impl> impl_;
  WsTarget target_;
  Handlers handlers_;
  bool open_ = false;
  bool writing_ = false;
  bool reading_ = false;
  bool paused_ = false;
  bool closed_ = false;
  std::string out_;
};

/// Blocking client with timeouts, for tests and small tools. Owns its own
/// io_context.
class SyncWsClient {
 public:
  SyncWsClient();
  ~SyncWsClient();
  SyncWsClient(const SyncWsClient&) = delete;
  SyncWsClient& operator=(const SyncWsClient&) = delete;
  SyncWsClient(SyncWsClient&&) noexcept;
  SyncWsClient& operator=(SyncWsClient&&) noexcept;

  /// Throws std::runtime_error when the handshake fails.
  void connect(const WsTarget& target, std::chrono::milliseconds timeout = std::chrono::seconds(5));
  void send(const std::string& text, std::chrono::milliseconds timeout = std::chrono::seconds(5));
  /// Next text message, or nullopt on timeout or close.
  std::optional<std::string> read(std::chrono::milliseconds timeout = std::chrono::seconds(5));
  void close();
  bool closed() const { return closed_; }
  /// Close reason when the server closed the connection.
  const std::string& close_reason() const { return close_reason_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  bool closed_ = false;
  std::string close_reason_;
};

/// Plain HTTP GET for small endpoints such as /status. Returns status and body.
std::pair<int, std::string> http_get(const std::string& host, std::uint16_t port, const std::string& target,
                                     std::chrono::milliseconds timeout = std::chrono::seconds(5));

}  // namespace uavlink::net
