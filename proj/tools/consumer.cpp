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

#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <boost/asio/signal_set.hpp>
#include <boost/asio/steady_timer.hpp>
#include <fstream>
#include <iostream>

#include "uavlink/consumer/consumer_state.hpp"
#include "uavlink/core/backoff.hpp"
#include "uavlink/core/time.hpp"
#include "uavlink/net/ws_client.hpp"

namespace {

using namespace uavlink;

class Consumer {
 public:
  Consumer(boost::asio::io_context& ioc, net::WsTarget target, std::optional<Id> mission, std::int64_t delay_ms)
      : ioc_(ioc), target_(std::move(target)), mission_(mission), state_(delay_ms), retry_(ioc) {}

  void connect() {
    if (stopped_) return;
    net::WsClient::Handlers h;
    h.on_open = [this] {
      backoff_.reset();
      state_.on_reconnect();
      sequencer_.reset();
      hello_pending_ = true;
      client_->kick();
    };
    h.source = [this]() -> std::optional<std::string> {
      if (!hello_pending_) return std::nullopt;
      hello_pending_ = false;
      auto env = sequencer_.stamp(protocol::make_envelope(protocol::Hello{protocol::Role::kConsumer, "", mission_}),
                                  clock_.now_ms());
      return protocol::encode_envelope(env);
    };
    h.on_message = [this](std::string text) {
      const auto before = state_.analyses().size();
      if (auto rec = state_.on_message(text, clock_.now_ms()))
        spdlog::debug("frame {} seq {} g2g {} ms", rec->stream_id, rec->frame_seq, rec->glass_to_glass_ms());
      if (state_.analyses().size() > before)
        spdlog::info("analysis for detection {}: {}", state_.analyses().back().detection_id,
                     state_.analyses().back().text);
    };
    h.on_close = [this](std::string reason) {
      if (stopped_) return;
      const auto wait = backoff_.next();
      spdlog::warn("consumer: {}; retrying in {} ms", reason, wait);
      retry_.expires_after(std::chrono::milliseconds(wait));
      retry_.async_wait([this](boost::system::error_code ec) {
        if (!ec) connect();
      });
    };
    client_ = net::WsClient::create(ioc_, target_, std::move(h));
    client_->connect();
  }

  void stop() {
    stopped_ = true;
    retry_.cancel();
    if (client_) client_->close();
  }

  const consumer::ConsumerState& state() const { return state_; }

 private:
  boost::asio::io_context& ioc_;
  net::WsTarget target_;
  std::optional<Id> mission_;
  consumer::ConsumerState state_;
  protocol::Sequencer sequencer_{"consumer"};
  SystemClock clock_;
  Backoff backoff_;
  boost::asio::steady_timer retry_;
  std::shared_ptr<net::WsClient> client_;
  bool hello_pending_ = false;
  bool stopped_ = false;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"uavlink video consumer"};
  std::string url = "ws://127.0.0.1:8080/consume", display_log;
  std::optional<Id> mission;
  double duration_s = 0;
  std::int64_t delay_ms = 0;
  app.add_option("--url", url, "Server consume endpoint")->envname("UAVLINK_CONSUME_URL");
  app.add_option("--mission", mission, "Only receive streams of this mission");
  app.add_option("--display-log", display_log, "Write one TSV row per displayed frame");
  app.add_option("--duration-s", duration_s, "Exit after this long; 0 runs until interrupted");
  app.add_option("--display-delay-ms", delay_ms, "Decode and render time added to each frame");
  CLI11_PARSE(app, argc, argv);

  try {
    boost::asio::io_context ioc;
    Consumer consumer(ioc, net::WsTarget::parse(url), mission, delay_ms);
    boost::asio::signal_set signals(ioc, SIGINT, SIGTERM);
    boost::asio::steady_timer deadline(ioc);
    auto finish = [&] {
      consumer.stop();
      signals.cancel();
      deadline.cancel();
    };
    signals.async_wait([&](const boost::system::error_code& ec, int) {
      if (!ec) finish();
    });
    if (duration_s > 0) {
      deadline.expires_after(std::chrono::milliseconds(static_cast<std::int64_t>(duration_s * 1000)));
      deadline.async_wait([&](boost::system::error_code ec) {
        if (!ec) finish();
      });
    }
    consumer.connect();
    ioc.run();

    const auto& s = consumer.state().stats();
    std::cout << "messages " << s.messages << "\nframes " << s.frames << "\ncorrupt_frames " << s.corrupt_frames
              << "\nframes_missed " << s.frames_missed << "\nstreams_started " << s.streams_started
              << "\nanalyses " << s.analyses << '\n';
    if (!display_log.empty()) {
      std::ofstream out(display_log);
      consumer::write_display_log(out, consumer.state().displayed());
      if (!out) throw std::runtime_error("cannot write " + display_log);
    }
    return 0;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 2;
  }
}
