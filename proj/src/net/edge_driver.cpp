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

#include "uavlink/net/edge_driver.hpp"

#include <boost/asio/post.hpp>
#include <spdlog/spdlog.h>

namespace uavlink::net {

namespace asio = boost::asio;

EdgeDriver::EdgeDriver(asio::io_context& ioc, const Scenario& scenario, edge::EdgeConfig config,
                       EdgeDriverOptions options)
    : ioc_(ioc),
      options_(std::move(options)),
      epoch_ms_(SystemClock().now_ms()),
      wall_start_(std::chrono::steady_clock::now()),
      node_(std::move(config), scenario, loop_, epoch_ms_),
      backoff_(options_.reconnect_initial_ms, options_.reconnect_max_ms),
      timer_(ioc),
      reconnect_timer_(ioc),
      linger_timer_(ioc) {
  node_.set_output_listener([this, alive = std::weak_ptr<bool>(alive_)] {
    asio::post(ioc_, [this, alive] {
      if (alive.expired() || !client_) return;
      client_->kick();
    });
  });
}

EdgeDriver::~EdgeDriver() {
  *alive_ = false;
  alive_.reset();
  if (client_) client_->close();
}

void EdgeDriver::start() {
  wall_start_ = std::chrono::steady_clock::now();
  node_.start();
  connect();
  pump();
}

void EdgeDriver::stop() {
  if (stopped_) return;
  stopped_ = true;
  timer_.cancel();
  reconnect_timer_.cancel();
  linger_timer_.cancel();
  if (client_) client_->close();
  done();
}

void EdgeDriver::connect() {
  if (stopped_) return;
  WsClient::Handlers h;
  auto alive = std::weak_ptr<bool>(alive_);
  h.on_open = [this, alive] {
    if (!alive.expired()) on_open();
  };
  h.on_message = [this, alive](std::string text) {
    if (!alive.expired()) on_message(std::move(text));
  };
  h.on_close = [this, alive](std::string reason) {
    if (!alive.expired()) on_close(reason);
  };
  h.source = [this, alive]() -> std::optional<std::string> {
    if (alive.expired()) return std::nullopt;
    auto m = node_.pop_outgoing();
    if (!m) {
      asio::post(ioc_, [this, alive] {
        if (!alive.expired()) pump();
      });
      return std::nullopt;
    }
    return std::move(m->wire);
  };
  client_ = WsClient::create(ioc_, options_.target, std::move(h));
  client_->connect();
}

void EdgeDriver::sync_clock() {
  if (!options_.realtime) return;
  const auto elapsed = std::chrono::duration_cast<Micros>(std::chrono::steady_clock::now() - wall_start_);
  if (elapsed > loop_.now()) {
    loop_.run_until(elapsed);
  }
}

void EdgeDriver::on_open() {
  backoff_.reset();
  sync_clock();
  spdlog::info("edge connected to ws://{}:{}{}", options_.target.host, options_.target.port, options_.target.path);
  node_.on_connected();
  client_->kick();
  pump();
}

void EdgeDriver::on_message(std::string text) {
  sync_clock();
  auto decoded = protocol::decode_envelope(text);
  if (auto* err = std::get_if<protocol::DecodeError>(&decoded)) {
    ++decode_errors_;
    spdlog::warn("edge: undecodable message: {}", err->detail);
    return;
  }
  const auto& env = std::get<protocol::Envelope>(decoded);
  spdlog::debug("edge: recv {} seq {} at t={} ms", protocol::to_string(env.msg_type), env.seq, to_ms(loop_.now()));
  node_.on_message(env);
  pump();
}

void EdgeDriver::on_close(const std::string& reason) {
  sync_clock();
  node_.on_disconnected();
  if (stopped_) return;
  if (const auto& fatal = node_.fatal_error()) {
    spdlog::error("edge: server refused the session: {}", *fatal);
    return done();
  }
  if (lingering_ || node_.finished()) {
    spdlog::info("edge: connection closed after the run: {}", reason);
    return done();
  }
  const auto wait = backoff_.next();
  ++reconnects_;
  spdlog::warn("edge: connection lost ({}); retrying in {} ms", reason, wait);
  reconnect_timer_.expires_after(std::chrono::milliseconds(wait));
  reconnect_timer_.async_wait([this, alive = std::weak_ptr<bool>(alive_)](boost::system::error_code ec) {
    if (ec || alive.expired()) return;
    connect();
  });
  pump();
}

bool EdgeDriver::idle() const {
  return node_.finished() && loop_.pending() == 0 && !node_.has_outgoing() && !(client_ && client_->writing()) &&
         !node_.awaiting_server();
}

void EdgeDriver::pump() {
  if (stopped_) return;
  if (options_.realtime) {
    sync_clock();
    if (auto next = loop_.next_time())
      arm_timer(wall_start_ + std::chrono::duration_cast<std::chrono::steady_clock::duration>(*next));
  } else {
    // Bounded batch so socket handlers get a turn.
    const bool online = client_ && client_->is_open();
    for (int i = 0; i < 64; ++i) {
      if (!online && !node_.fatal_error()) break;
      if (node_.awaiting_server() || node_.has_outgoing() || client_->writing()) break;
      if (!loop_.run_next()) break;
    }
    if (client_) client_->kick();
    const bool blocked = !online || node_.awaiting_server() || node_.has_outgoing() || client_->writing();
    if (!blocked && loop_.pending() > 0 && !pump_posted_) {
      pump_posted_ = true;
      asio::post(ioc_, [this, alive = std::weak_ptr<bool>(alive_)] {
        if (alive.expired()) return;
        pump_posted_ = false;
        pump();
      });
    }
  }
  maybe_finish();
}

void EdgeDriver::arm_timer(std::chrono::steady_clock::time_point at) {
  timer_.expires_at(at);
  timer_.async_wait([this, alive = std::weak_ptr<bool>(alive_)](boost::system::error_code ec) {
    if (ec || alive.expired()) return;
    pump();
  });
}

void EdgeDriver::maybe_finish() {
  if (lingering_ || stopped_ || !idle()) return;
  if (node_.fatal_error()) return done();
  lingering_ = true;
  spdlog::info("edge: capture finished; lingering {} ms", options_.linger.count());
  linger_timer_.expires_after(options_.linger);
  linger_timer_.async_wait([this, alive = std::weak_ptr<bool>(alive_)](boost::system::error_code ec) {
    if (ec || alive.expired()) return;
    stopped_ = true;
    timer_.cancel();
    if (client_) client_->close();
    done();
  });
}

void EdgeDriver::done() {
  if (!on_done_) return;
  auto fn = std::move(on_done_);
  on_done_ = nullptr;
  fn();
}

}  // namespace uavlink::net
