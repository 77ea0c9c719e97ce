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

#include "uavlink/net/server_stack.hpp"

#include <boost/asio/post.hpp>

namespace uavlink::net {

ServerStack::ServerStack(StackOptions options, server::Store& store, server::ObjectStore& objects,
                         server::AnalysisProvider& provider)
    : options_(std::move(options)) {
  dispatcher_ = std::make_unique<server::ThreadPoolDispatcher>(
      provider, options_.analysis_threads,
      [this](std::function<void()> fn) { boost::asio::post(ioc_, std::move(fn)); });
  core_ = std::make_unique<server::ServerCore>(options_.server, store, objects, *dispatcher_, clock_);
  server_ = std::make_unique<WsServer>(ioc_, *core_, options_.listen);
}

ServerStack::~ServerStack() {
  stop(std::chrono::milliseconds(0));
  dispatcher_->shutdown();
}

void ServerStack::start() {
  server_->start();
  thread_ = std::thread([this] { ioc_.run(); });
}

void ServerStack::run_with(const std::function<void()>& on_listening) {
  server_->start();
  if (on_listening) on_listening();
  ioc_.run();
}

void ServerStack::stop(std::chrono::milliseconds grace) {
  if (stopped_) return;
  stopped_ = true;
  boost::asio::post(ioc_, [this, grace] {
    server_->shutdown(grace, [this] {
      // Give the aborted sockets one turn to unwind, then end the loop.
      boost::asio::post(ioc_, [this] { ioc_.stop(); });
    });
  });
  if (thread_.joinable()) thread_.join();
}

}  // namespace uavlink::net
