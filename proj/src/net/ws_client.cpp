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

#include "uavlink/net/ws_client.hpp"

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <regex>
#include <stdexcept>

namespace uavlink::net {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

WsTarget WsTarget::parse(const std::string& url) {
  static const std::regex re(R"(^(?:ws://)?([^:/]+)(?::(\d+))?(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, re)) throw std::invalid_argument("bad websocket url: " + url);
  WsTarget t;
  t.host = m[1];
  if (m[2].matched) {
    const auto port = std::stoul(m[2]);
    if (port == 0 || port > 65535) throw std::invalid_argument("bad port in " + url);
    t.port = static_cast<std::uint16_t>(port);
  } else {
    t.port = 80;
  }
  t.path = m[3].matched ? std::string(m[3]) : "/";
  return t;
}

struct WsClient::Impl {
  explicit Impl(asio::io_context& ioc) : resolver(ioc), ws(ioc) {}
  tcp::resolver resolver;
  websocket::stream<beast::tcp_stream> ws;
  beast::flat_buffer in;
};

std::shared_ptr<WsClient> WsClient::create(asio::io_context& ioc, WsTarget target, Handlers handlers) {
  auto c = std::shared_ptr<WsClient>(new WsClient(ioc, std::move(target), std::move(handlers)));
  return c;
}

WsClient::WsClient(asio::io_context& ioc, WsTarget target, Handlers handlers)
    : impl_(std::make_shared<Impl>(ioc)), target_(std::move(target)), handlers_(std::move(handlers)) {}

void WsClient::connect() {
  auto self = shared_from_this();
  impl_->resolver.async_resolve(
      target_.host, std::to_string(target_.port), [self](beast::error_code ec, tcp::resolver::results_type r) {
        if (ec) return self->fail("resolve: " + ec.message());
        auto& layer = beast::get_lowest_layer(self->impl_->ws);
        layer.expires_after(std::chrono::seconds(10));
        layer.async_connect(r, [self](beast::error_code ec, const tcp::endpoint&) {
          if (ec) return self->fail("connect: " + ec.message());
          auto& layer = beast::get_lowest_layer(self->impl_->ws);
          layer.socket().set_option(tcp::no_delay(true));
          layer.expires_never();
          auto& ws = self->impl_->ws;
          ws.set_option(websocket::stream_base::timeout::suggested(beast::role_type::client));
          ws.read_message_max(64u << 20);
          ws.text(true);
          ws.async_handshake(self->target_.host, self->target_.path, [self](beast::error_code ec) {
            if (ec) return self->fail("handshake: " + ec.message());
            self->open_ = true;
            if (self->handlers_.on_open) self->handlers_.on_open();
            if (!self->paused_) self->read();
            self->kick();
          });
        });
      });
}

void WsClient::kick() {
  if (!open_ || writing_ || closed_ || !handlers_.source) return;
  auto next = handlers_.source();
  if (!next) return;
  writing_ = true;
  out_ = std::move(*next);
  impl_->ws.async_write(asio::buffer(out_), [self = shared_from_this()](beast::error_code ec, std::size_t) {
    self->writing_ = false;
    self->out_.clear();
    if (ec) return self->fail("write: " + ec.message());
    self->kick();
  });
}

void WsClient::read() {
  if (reading_ || !open_) return;
  reading_ = true;
  impl_->ws.async_read(impl_->in, [self = shared_from_this()](beast::error_code ec, std::size_t) {
    self->reading_ = false;
    if (ec) {
      if (ec == websocket::error::closed) {
        const auto& r = self->impl_->ws.reason();
        return self->fail(r.reason.empty() ? "closed by server" : std::string(r.reason.data(), r.reason.size()));
      }
      return self->fail("read: " + ec.message());
    }
    auto text = beast::buffers_to_string(self->impl_->in.data());
    self->impl_->in.consume(self->impl_->in.size());
    if (self->handlers_.on_message) self->handlers_.on_message(std::move(text));
    if (!self->paused_) self->read();
  });
}

void WsClient::pause_reading(bool paused) {
  paused_ = paused;
  if (!paused_) read();
}

void WsClient::close() {
  if (closed_) return;
  if (!open_) {
    closed_ = true;
    beast::error_code ignored;
    beast::get_lowest_layer(impl_->ws).socket().close(ignored);
    return;
  }
  impl_->ws.async_close(websocket::close_code::normal,
                        [self = shared_from_this()](beast::error_code) { self->fail("closed by client"); });
}

void WsClient::fail(const std::string& reason) {
  if (closed_) return;
  closed_ = true;
  open_ = false;
  beast::error_code ignored;
  beast::get_lowest_layer(impl_->ws).socket().close(ignored);
  if (handlers_.on_close) handlers_.on_close(reason);
}

struct SyncWsClient::Impl {
  asio::io_context ioc;
  websocket::stream<beast::tcp_stream> ws{ioc};
  beast::flat_buffer in;

  // Runs until `done` is set or the deadline passes; cancels on timeout.
  bool wait(const bool& done, std::chrono::milliseconds timeout) {
    ioc.restart();
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    while (!done && std::chrono::steady_clock::now() < deadline) {
      ioc.run_one_until(deadline);
    }
    if (done) return true;
    beast::get_lowest_layer(ws).cancel();
    ioc.restart();
    ioc.run_for(std::chrono::milliseconds(100));
    return false;
  }
};

SyncWsClient::SyncWsClient() : impl_(std::make_unique<Impl>()) {}
SyncWsClient::SyncWsClient(SyncWsClient&&) noexcept = default;
SyncWsClient& SyncWsClient::operator=(SyncWsClient&&) noexcept = default;

SyncWsClient::~SyncWsClient() {
  if (!impl_) return;
  beast::error_code ignored;
  beast::get_lowest_layer(impl_->ws).socket().close(ignored);
}

void SyncWsClient::connect(const WsTarget& target, std::chrono::milliseconds timeout) {
  tcp::resolver resolver(impl_->ioc);
  const auto results = resolver.resolve(target.host, std::to_string(target.port));
  bool done = false;
  beast::error_code result;
  auto& layer = beast::get_lowest_layer(impl_->ws);
  layer.async_connect(results, [&](beast::error_code ec, const tcp::endpoint&) {
    if (ec) {
      result = ec;
      done = true;
      return;
    }
    layer.socket().set_option(tcp::no_delay(true));
    impl_->ws.read_message_max(64u << 20);
    impl_->ws.text(true);
    impl_->ws.async_handshake(target.host, target.path, [&](beast::error_code ec) {
      result = ec;
      done = true;
    });
  });
  if (!impl_->wait(done, timeout)) throw std::runtime_error("websocket connect timed out");
  if (result) throw std::runtime_error("websocket connect failed: " + result.message());
}

void SyncWsClient::send(const std::string& text, std::chrono::milliseconds timeout) {
  bool done = false;
  beast::error_code result;
  impl_->ws.async_write(asio::buffer(text), [&](beast::error_code ec, std::size_t) {
    result = ec;
    done = true;
  });
  if (!impl_->wait(done, timeout)) throw std::runtime_error("websocket write timed out");
  if (result) throw std::runtime_error("websocket write failed: " + result.message());
}

std::optional<std::string> SyncWsClient::read(std::chrono::milliseconds timeout) {
  if (closed_) return std::nullopt;
  bool done = false;
  beast::error_code result;
  impl_->ws.async_read(impl_->in, [&](beast::error_code ec, std::size_t) {
    result = ec;
    done = true;
  });
  if (!impl_->wait(done, timeout)) return std::nullopt;
  if (result) {
    closed_ = true;
    if (result == websocket::error::closed) {
      const auto& r = impl_->ws.reason().reason;
      close_reason_.assign(r.data(), r.size());
    }
    return std::nullopt;
  }
  auto text = beast::buffers_to_string(impl_->in.data());
  impl_->in.consume(impl_->in.size());
  return text;
}

void SyncWsClient::close() {
  if (closed_) return;
  closed_ = true;
  bool done = false;
  impl_->ws.async_close(websocket::close_code::normal, [&](beast::error_code) { done = true; });
  impl_->wait(done, std::chrono::seconds(2));
}

std::pair<int, std::string> http_get(const std::string& host, std::uint16_t port, const std::string& target,
                                     std::chrono::milliseconds timeout) {
  asio::io_context ioc;
  beast::tcp_stream stream(ioc);
  tcp::resolver resolver(ioc);
  stream.expires_after(timeout);
  http::request<http::empty_body> req{http::verb::get, target, 11};
  req.set(http::field::host, host);
  http::response<http::string_body> res;
  beast::flat_buffer buffer;
  beast::error_code result;
  stream.async_connect(resolver.resolve(host, std::to_string(port)), [&](beast::error_code ec, const tcp::endpoint&) {
    if (ec) {
      result = ec;
      return;
    }
    http::async_write(stream, req, [&](beast::error_code ec, std::size_t) {
      if (ec) {
        result = ec;
        return;
      }
      http::async_read(stream, buffer, res, [&](beast::error_code ec, std::size_t) { result = ec; });
    });
  });
  ioc.run();
  if (result) throw std::runtime_error("GET " + target + " failed: " + result.message());
  return {static_cast<int>(res.result_int()), res.body()};
}

}  // namespace uavlink::net
