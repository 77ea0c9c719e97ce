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
#include <functional>
#include <future>
#include <memory>
#include <string>
#include <thread>

#include "uavlink/net/ws_server.hpp"
#include "uavlink/server/analysis.hpp"
#include "uavlink/server/object_store.hpp"
#include "uavlink/server/server_core.hpp"
#include "uavlink/server/store.hpp"

namespace uavlink::net {

struct StackOptions {
  ListenOptions listen;
  server::ServerConfig server;
  std::size_t analysis_threads = 4;
};

/// A complete live server: store, blob store, provider, dispatcher, core and
/// listener, driven by one io_context. The caller keeps ownership of the
/// store, object store and provider.
class ServerStack {
 public:
  ServerStack(StackOptions options, server::Store& store, server::ObjectStore& objects,
              server::AnalysisProvider& provider);
  ~ServerStack();

  /// Binds and starts serving on a background thread.
  void start();
  /// Binds and serves on the calling thread until stopped. `on_listening`
  /// runs once the port is bound.
  void run_with(const std::function<void()>& on_listening);
  /// Graceful stop; blocks until the io thread has finished.
  void stop(std::chrono::milliseconds grace = std::chrono::seconds(10));

  std::uint16_t port() const { return server_->port(); }
  boost::asio::io_context& io() { return ioc_; }

  /// Runs `fn` on the io thread and waits for its result.
  template <typename Fn>
  auto call(Fn fn) -> decltype(fn(std::declval<server::ServerCore&>())) {
    using R = decltype(fn(core()));
    std::packaged_task<R()> task([this, &fn] { return fn(core()); });
    auto result = task.get_future();
    boost::asio::post(ioc_, [&task] { task(); });
    return result.get();
  }

 private:
  server::ServerCore& core() { return *core_; }

  boost::asio::io_context ioc_;
  StackOptions options_;
  SystemClock clock_;
  std::unique_ptr<server::ThreadPoolDispatcher> dispatcher_;
  std::unique_ptr<server::ServerCore> core_;
  std::unique_ptr<WsServer> server_;
  std::thread thread_;
  bool stopped_ = false;
};

}  // namespace uavlink::net
