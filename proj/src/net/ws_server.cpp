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

#include "uavlink/net/ws_server.hpp"

#include <boost/asio/post.hpp>
#include <boost/asio/steady_timer.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <deque>

namespace uavlink::net {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(WsServer& server, beast::tcp_stream&& stream, server::Endpoint endpoint)
      : server_(server), ws_(std::move(stream)), endpoint_(endpoint) {}

  void accept(http::request<http::string_body> req) {
    beast::get_lowest_layer(ws_).expires_never();
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.read_message_max(server_.options().max_message_bytes);
    ws_.text(true);
    ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
      if (ec) return;
      self->id_ = self->server_.core().open(self->endpoint_);
      self->open_ = true;
      self->server_.attach(*self->id_, self->weak_from_this());
      self->read();
    });
  }

  /// Pulls the next message from the core when the socket is free.
  void kick() {
    if (!open_ || writing_ || closing_) return;
    auto& core = server_.core();
    if (!core.is_open(*id_)) return;
    if (auto m = core.pop_outgoing(*id_)) {
      writing_ = true;
      out_ = std::move(m->wire);
      ws_.async_write(asio::buffer(out_), [self = shared_from_this()](beast::error_code ec, std::size_t) {
        self->writing_ = false;
        self->out_.clear();
        if (ec) return self->finish();
        self->kick();
      });
      return;
    }
    if (core.wants_close(*id_)) close();
  }

  void close() {
    if (!open_ || closing_) return;
    closing_ = true;
    ws_.async_close(websocket::close_code::normal, [self = shared_from_this()](beast::error_code) { self->finish(); });
  }

  void abort() {
    beast::error_code ignored;
    beast::get_lowest_layer(ws_).socket().close(ignored);
    finish();
  }

 private:
  void read() {
    ws_.async_read(in_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return self->finish();
      auto& core = self->server_.core();
      if (core.is_open(*self->id_)) core.receive(*self->id_, beast::buffers_to_string(self->in_.data()));
      self->in_.consume(self->in_.size());
      self->read();
    });
  }

  void finish() {
    if (!open_) return;
    open_ = false;
    server_.detach(*id_);
    server_.core().close(*id_);
  }

  WsServer& server_;
  websocket::stream<beast::tcp_stream> ws_;
  server::Endpoint endpoint_;
  std::optional<server::ConnId> id_;
  bool open_ = false;
  bool writing_ = false;
  bool closing_ = false;
  beast::flat_buffer in_;
  std::string out_;
};

namespace {

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(WsServer& server, tcp::socket&& socket) : server_(server), stream_(std::move(socket)) {}

  void run() { read(); }

 private:
  void read() {
    req_ = {};
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, req_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return;
      self->handle();
    });
  }

  void handle() {
    if (websocket::is_upgrade(req_)) {
      const auto endpoint = server::endpoint_for_path(std::string_view(req_.target().data(), req_.target().size()));
      if (!endpoint) return respond(http::status::not_found, "text/plain", "unknown endpoint\n");
      std::make_shared<WsSession>(server_, std::move(stream_), *endpoint)->accept(std::move(req_));
      return;
    }
    const auto target = std::string_view(req_.target().data(), req_.target().size());
    const auto path = target.substr(0, target.find('?'));
    if (path == "/status" && (req_.method() == http::verb::get || req_.method() == http::verb::head))
      return respond(http::status::ok, "application/json", server_.core().status_json() + "\n");
    if (path == "/status") return respond(http::status::method_not_allowed, "text/plain", "GET only\n");
    respond(http::status::not_found, "text/plain", "not found\n");
  }

  void respond(http::status status, const char* type, std::string body) {
    auto res = std::make_shared<http::response<http::string_body>>(status, req_.version());
    res->set(http::field::server, "uavlink");
    res->set(http::field::content_type, type);
    res->keep_alive(req_.keep_alive());
    if (req_.method() != http::verb::head) res->body() = std::move(body);
    res->prepare_payload();
    http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code ec, std::size_t) {
      if (ec || !res->keep_alive()) {
        beast::error_code ignored;
        self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
        return;
      }
      self->read();
    });
  }

  WsServer& server_;
  beast::tcp_stream stream_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
};

}  // namespace

WsServer::WsServer(asio::io_context& ioc, server::ServerCore& core, ListenOptions options)
    : ioc_(ioc), core_(core), options_(std::move(options)), acceptor_(ioc) {
  core_.set_output_listener([this](server::ConnId id) {
    auto it = sessions_.find(id);
    if (it == sessions_.end()) return;
    asio::post(ioc_, [w = it->second] {
      if (auto s = w.lock()) s->kick();
    });
  });
}

WsServer::~WsServer() { core_.set_output_listener(nullptr); }

void WsServer::start() {
  const tcp::endpoint ep(asio::ip::make_address(options_.bind), options_.port);
  acceptor_.open(ep.protocol());
  acceptor_.set_option(asio::socket_base::reuse_address(true));
  acceptor_.bind(ep);
  acceptor_.listen(asio::socket_base::max_listen_connections);
  port_ = acceptor_.local_endpoint().port();
  accept();
}

void WsServer::accept() {
  acceptor_.async_accept([this](beast::error_code ec, tcp::socket socket) {
    if (ec) return;
    socket.set_option(tcp::no_delay(true));
    std::make_shared<HttpSession>(*this, std::move(socket))->run();
    if (!stopping_) accept();
  });
}

void WsServer::attach(server::ConnId id, std::weak_ptr<WsSession> s) { sessions_[id] = std::move(s); }
void WsServer::detach(server::ConnId id) { sessions_.erase(id); }

void WsServer::shutdown(std::chrono::milliseconds grace, std::function<void()> done) {
  stopping_ = true;
  beast::error_code ignored;
  acceptor_.close(ignored);
  core_.begin_shutdown();
  poll_shutdown(std::chrono::steady_clock::now() + grace, std::move(done));
}

void WsServer::poll_shutdown(std::chrono::steady_clock::time_point deadline, std::function<void()> done) {
  const bool drained = sessions_.empty();
  if (drained || std::chrono::steady_clock::now() >= deadline) {
    auto remaining = sessions_;
    for (auto& [id, w] : remaining)
      if (auto s = w.lock()) s->abort();
    done();
    return;
  }
  shutdown_timer_ = std::make_unique<asio::steady_timer>(ioc_, std::chrono::milliseconds(20));
  shutdown_timer_->async_wait([this, deadline, done = std::move(done)](beast::error_code) mutable {
    poll_shutdown(deadline, std::move(done));
  });
}

}  // namespace uavlink::net
