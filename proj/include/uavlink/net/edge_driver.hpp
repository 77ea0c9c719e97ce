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
#include <boost/asio/steady_timer.hpp>
#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "uavlink/core/backoff.hpp"
#include "uavlink/core/event_loop.hpp"
#include "uavlink/edge/edge_node.hpp"
#include "uavlink/net/ws_client.hpp"

namespace uavlink::net {

struct EdgeDriverOptions {
  WsTarget target;
  /// Realtime maps the node's clock onto wall time. Otherwise the node runs
  /// as fast as the server answers, pausing whenever it waits on a reply.
  bool realtime = true;
  std::int64_t reconnect_initial_ms = 500;
  std::int64_t reconnect_max_ms = 8'000;
  /// Wall time to stay connected after the last capture, for late analyses.
  std::chrono::milliseconds linger{3'000};
};

/// Runs an EdgeNode against a live server over one WebSocket.
class EdgeDriver {
 public:
  EdgeDriver(boost::asio::io_context& ioc, const Scenario& scenario, edge::EdgeConfig config,
             EdgeDriverOptions options);
  ~EdgeDriver();

  void set_observer(edge::EdgeObserver* observer) { node_.set_observer(observer); }
  /// Called once on the io thread when the node has finished or failed.
  void set_on_done(std::function<void()> fn) { on_done_ = std::move(fn); }

  void start();
  void stop();

  const edge::EdgeNode& node() const { return node_; }
  std::uint64_t decode_errors() const { return decode_errors_; }
  std::uint64_t reconnects() const { return reconnects_; }
  std::int64_t epoch_ms() const { return epoch_ms_; }

 private:
  void connect();
  void on_open();
  void on_message(std::string text);
  void on_close(const std::string& reason);
  void pump();
  void arm_timer(std::chrono::steady_clock::time_point at);
  void sync_clock();
  bool idle() const;
  void maybe_finish();
  void done();

  boost::asio::io_context& ioc_;
  EdgeDriverOptions options_;
  EventLoop loop_;
  std::int64_t epoch_ms_;
  std::chrono::steady_clock::time_point wall_start_;
  edge::EdgeNode node_;
  std::shared_ptr<WsClient> client_;
  Backoff backoff_;
  boost::asio::steady_timer timer_;
  boost::asio::steady_timer reconnect_timer_;
  boost::asio::steady_timer linger_timer_;
  bool pump_posted_ = false;
  bool lingering_ = false;
  bool stopped_ = false;
  std::uint64_t decode_errors_ = 0;
  std::uint64_t reconnects_ = 0;
  std::function<void()> on_done_;
  std::shared_ptr<bool> alive_ = std::make_shared<bool>(true);
};

}  // namespace uavlink::net
