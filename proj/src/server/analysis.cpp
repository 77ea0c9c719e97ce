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

#include "uavlink/server/analysis.hpp"

#include <chrono>

#include "httplib.h"
#include "json.hpp"
#include "uavlink/domain/rules.hpp"

namespace uavlink::server {

using json = nlohmann::json;

std::string MockProvider::analyze(const AnalysisRequest& req) {
  const auto& o = req.object;
  return "Analysis of " + o.class_label + " (confidence " + format_confidence(o.confidence) + ") reported by " +
         req.drone_id + " at (" + format_confidence(o.center_x) + ", " + format_confidence(o.center_y) +
         "): " + req.prompt;
}

RemoteProvider::RemoteProvider(RemoteProviderConfig config) : config_(std::move(config)) {
  if (config_.base_url.empty()) throw ProviderError("remote provider needs a base URL");
}

std::string RemoteProvider::build_body(const AnalysisRequest& req) const {
  json content = json::array();
  content.push_back({{"type", "text"}, {"text", req.prompt}});
  if (req.image && !req.image->empty())
    content.push_back({{"type", "image_url"},
                       {"image_url", {{"url", "data:image/jpeg;base64," + base64::encode(*req.image)}}}});
  json body{{"model", config_.model}, {"messages", json::array({{{"role", "user"}, {"content", content}}})}};
  return body.dump();
}

std::string RemoteProvider::parse_response(const std::string& body) {
  const auto j = json::parse(body, nullptr, false);
  if (j.is_discarded()) throw ProviderError("provider returned invalid JSON");
  try {
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw ProviderError(std::string("unexpected provider response: ") + e.what());
  }
}

std::string RemoteProvider::analyze(const AnalysisRequest& req) {
  // Split "scheme://host[:port]/prefix" for httplib.
  const auto& url = config_.base_url;
  const auto scheme_end = url.find("://");
  const auto host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
  const auto path_start = url.find('/', host_start);
  const std::string origin = path_start == std::string::npos ? url : url.substr(0, path_start);
  std::string prefix = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();

  httplib::Client client(origin);
  client.set_connection_timeout(config_.timeout_s);
  client.set_read_timeout(config_.timeout_s);
  httplib::Headers headers;
  if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);
  auto res = client.Post(prefix + "/chat/completions", headers, build_body(req), "application/json");
  if (!res) throw ProviderError("provider request failed: " + httplib::to_string(res.error()));
  if (res->status != 200) throw ProviderError("provider answered HTTP " + std::to_string(res->status));
  return parse_response(res->body);
}

void LoopDispatcher::submit(AnalysisRequest req, Done done) {
  loop_.schedule_after(from_ms(provider_.simulated_latency_ms()),
                       [this, req = std::move(req), done = std::move(done)] {
                         AnalysisOutcome out;
                         try {
                           out.text = provider_.analyze(req);
                         } catch (const std::exception& e) {
                           out.error = e.what();
                         }
                         done(std::move(out));
                       });
}

ThreadPoolDispatcher::ThreadPoolDispatcher(AnalysisProvider& provider, std::size_t threads, Post post)
    : provider_(provider), post_(std::move(post)) {
  for (std::size_t i = 0; i < std::max<std::size_t>(threads, 1); ++i) workers_.emplace_back([this] { worker(); });
}

ThreadPoolDispatcher::~ThreadPoolDispatcher() { shutdown(); }

void ThreadPoolDispatcher::submit(AnalysisRequest req, Done done) {
  {
    std::lock_guard lock(mu_);
    if (stopping_) {
      post_([done = std::move(done)] { done(AnalysisOutcome{"", "server shutting down"}); });
      return;
    }
    jobs_.emplace_back(std::move(req), std::move(done));
  }
  cv_.notify_one();
}

void ThreadPoolDispatcher::shutdown() {
  {
    std::lock_guard lock(mu_);
    stopping_ = true;
  }
  cv_.notify_all();
  for (auto& t : workers_)
    if (t.joinable()) t.join();
  workers_.clear();
}

void ThreadPoolDispatcher::worker() {
  for (;;) {
    std::pair<AnalysisRequest, Done> job;
    {
      std::unique_lock lock(mu_);
      cv_.wait(lock, [this] { return stopping_ || !jobs_.empty(); });
      if (jobs_.empty()) return;
      job = std::move(jobs_.front());
      jobs_.pop_front();
    }
    const auto started = std::chrono::steady_clock::now();
    AnalysisOutcome out;
    try {
      out.text = provider_.analyze(job.first);
    } catch (const std::exception& e) {
      out.error = e.what();
    }
    const auto wait = std::chrono::duration<double, std::milli>(provider_.simulated_latency_ms()) -
                      (std::chrono::steady_clock::now() - started);
    if (wait.count() > 0) std::this_thread::sleep_for(wait);
    post_([done = std::move(job.second), out = std::move(out)]() mutable { done(std::move(out)); });
  }
}

}  // namespace uavlink::server
