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
#include <boost/asio/ip/tcp.hpp>
#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>

#include "uavlink/server/server_core.hpp"

namespace uavlink::net {

struct ListenOptions {
  std::string bind = "0.0.0.0";
  /// 0 picks an ephemeral port; see WsServer::port().
  std::uint16_t port = 8080;
  /// Largest accepted WebSocket message.
  std::size_t max_message_bytes = 64u << 20;
};

class WsSession;

/// WebSocket endpoints /edge, /consume and /dashboard plus GET /status, all
/// on one port. Every handler runs on the io_context thread that also owns
/// the ServerCore, so the core needs no locking.
class WsServer {
 public:
  WsServer(boost::asio::io_context& ioc, server::ServerCore& core, ListenOptions options);
  ~WsServer();

  void start();
  std::uint16_t port() const { return port_; }

  /// Stops accepting, lets connections flush and close, and waits up to
  /// `grace` for outstanding analyses. Calls `done` on the io thread.
  void shutdown(std::chrono::milliseconds grace, std::function<void()> done);

  // Used by sessions.
  void attach(server::ConnId id, std::weak_ptr<WsSession> s);
  void detach(server::ConnId id);
  server::ServerCore& core() { return core_; }
  const ListenOptions& options() const { return options_; }

 private:
  void accept();
  void poll_shutdown(std::chrono::steady_clock::time_point deadline, std::function<void()> done);

  boost::asio::io_context& ioc_;
  server::ServerCore& core_;
  ListenOptions options_;
  boost::asio::ip::tcp::acceptor acceptor_;
  std::uint16_t port_ = 0;
  std::map<server::ConnId, std::weak_ptr<WsSession>> sessions_;
  bool stopping_ = false;
  std::unique_ptr<boost::asio::steady_timer> shutdown_timer_;
};

}  // namespace uavlink::net
