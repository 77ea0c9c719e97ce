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

#include <condition_variable>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "uavlink/core/base64.hpp"
#include "uavlink/core/event_loop.hpp"
#include "uavlink/domain/types.hpp"

namespace uavlink::server {

struct AnalysisRequest {
  Id detection_id = 0;
  std::string drone_id;
  ObjectObservation object;
  std::string prompt;
  std::shared_ptr<const Bytes> image;
};

class ProviderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A vision-language model behind a blocking call. Throws ProviderError.
class AnalysisProvider {
 public:
  virtual ~AnalysisProvider() = default;
  virtual std::string name() const = 0;
  virtual std::string analyze(const AnalysisRequest& req) = 0;
  /// Modelled service time; dispatchers wait this long before answering.
  virtual double simulated_latency_ms() const { return 0.0; }
};

/// Deterministic stand-in: the text depends only on the request.
class MockProvider final : public AnalysisProvider {
 public:
  explicit MockProvider(double latency_ms = 2'100.0) : latency_ms_(latency_ms) {}
  std::string name() const override { return "mock"; }
  std::string analyze(const AnalysisRequest& req) override;
  double simulated_latency_ms() const override { return latency_ms_; }

 private:
  double latency_ms_;
};

struct RemoteProviderConfig {
  /// Base URL of an OpenAI-compatible API, e.g. https://api.example.com/v1
  std::string base_url;
  std::string api_key;
  std::string model = "gpt-4o-mini";
  int timeout_s = 30;
};

/// Chat-completions call with the prompt and the still as a data URL.
class RemoteProvider final : public AnalysisProvider {
 public:
  explicit RemoteProvider(RemoteProviderConfig config);
  std::string name() const override { return "remote"; }
  std::string analyze(const AnalysisRequest& req) override;

  /// Request body, exposed for tests.
  std::string build_body(const AnalysisRequest& req) const;
  /// Pulls choices[0].message.content out of a response body.
  static std::string parse_response(const std::string& body);

 private:
  RemoteProviderConfig config_;
};

struct AnalysisOutcome {
  std::string text;
  std::optional<std::string> error;
};

/// Runs provider calls off the caller's path and reports back through `done`.
class AnalysisDispatcher {
 public:
  using Done = std::function<void(AnalysisOutcome)>;
  virtual ~AnalysisDispatcher() = default;
  virtual void submit(AnalysisRequest req, Done done) = 0;
};

/// Completes each request on the event loop after the provider's modelled
/// latency. Used by the simulator.
class LoopDispatcher final : public AnalysisDispatcher {
 public:
  LoopDispatcher(EventLoop& loop, AnalysisProvider& provider) : loop_(loop), provider_(provider) {}
  void submit(AnalysisRequest req, Done done) override;

 private:
  EventLoop& loop_;
  AnalysisProvider& provider_;
};

/// Worker threads call the provider; `post` carries each completion back to
/// the thread that owns the server state.
class ThreadPoolDispatcher final : public AnalysisDispatcher {
 public:
  using Post = std::function<void(std::function<void()>)>;
  ThreadPoolDispatcher(AnalysisProvider& provider, std::size_t threads, Post post);
  ~ThreadPoolDispatcher() override;
  void submit(AnalysisRequest req, Done done) override;
  /// Finishes queued work, then joins the workers.
  void shutdown();

 private:
  void worker();

  AnalysisProvider& provider_;
  Post post_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<std::pair<AnalysisRequest, Done>> jobs_;
  bool stopping_ = false;
  std::vector<std::thread> workers_;
};

}  // namespace uavlink::server
