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
#include <memory>

#include "uavlink/net/server_stack.hpp"
#include "uavlink/scenario/scenario.hpp"
#include "uavlink/server/bootstrap.hpp"
#include "uavlink/server/sqlite_store.hpp"

int main(int argc, char** argv) {
  CLI::App app{"uavlink ground server"};
  std::string db = "uavlink.db", bind = "0.0.0.0", objects_dir, provider_kind = "mock";
  std::string provider_url, provider_key, provider_model = "gpt-4o-mini";
  std::string bootstrap, operator_id = "operator", operator_token;
  std::uint16_t port = 8080;
  double mock_latency_ms = 2'100.0;
  std::size_t threads = 4, frame_capacity = 8;
  int grace_ms = 10'000;

  app.add_option("--db", db, "SQLite database file")->envname("UAVLINK_DB");
  app.add_option("--bind", bind, "Listen address")->envname("UAVLINK_BIND");
  app.add_option("--port", port, "Listen port")->envname("UAVLINK_PORT");
  app.add_option("--objects", objects_dir, "Directory for uploaded stills; in memory when empty")
      ->envname("UAVLINK_OBJECTS");
  app.add_option("--provider", provider_kind, "Analysis provider")
      ->envname("UAVLINK_PROVIDER")
      ->check(CLI::IsMember({"mock", "remote"}));
  app.add_option("--provider-url", provider_url, "Base URL of an OpenAI-compatible API")
      ->envname("UAVLINK_PROVIDER_URL");
  app.add_option("--provider-key", provider_key, "API key for the remote provider")->envname("UAVLINK_PROVIDER_KEY");
  app.add_option("--provider-model", provider_model, "Model name for the remote provider")
      ->envname("UAVLINK_PROVIDER_MODEL");
  app.add_option("--mock-latency-ms", mock_latency_ms, "Service time of the mock provider")
      ->envname("UAVLINK_MOCK_LATENCY_MS");
  app.add_option("--analysis-threads", threads, "Provider worker threads")->check(CLI::Range(1, 64));
  app.add_option("--consumer-frame-capacity", frame_capacity, "Queued video frames per consumer")
      ->check(CLI::Range(1, 1024));
  app.add_option("--bootstrap", bootstrap, "Provision the drone, mission and rules of a scenario file")
      ->check(CLI::ExistingFile);
  app.add_option("--operator-id", operator_id, "Operator user created by --bootstrap");
  app.add_option("--operator-token", operator_token, "Dashboard token for that operator")
      ->envname("UAVLINK_OPERATOR_TOKEN");
  app.add_option("--shutdown-grace-ms", grace_ms, "Wait this long for in-flight analyses on SIGTERM");
  CLI11_PARSE(app, argc, argv);

  try {
    uavlink::server::SqliteStore store(db);
    if (!bootstrap.empty()) {
      if (operator_token.empty()) {
        spdlog::error("--bootstrap needs --operator-token (or UAVLINK_OPERATOR_TOKEN)");
        return 2;
      }
      const auto scenario = uavlink::load_scenario(bootstrap);
      const auto p = uavlink::server::provision_from_scenario(store, scenario, operator_id, operator_token);
      spdlog::info("provisioned drone {} mission {} with {} rules{}", scenario.drone_id, p.mission_id, p.rules.size(),
                   p.created ? "" : " (already present)");
    }

    std::unique_ptr<uavlink::server::ObjectStore> objects;
    if (objects_dir.empty())
      objects = std::make_unique<uavlink::server::MemoryObjectStore>();
    else
      objects = std::make_unique<uavlink::server::LocalObjectStore>(objects_dir);

    std::unique_ptr<uavlink::server::AnalysisProvider> provider;
    if (provider_kind == "remote") {
      if (provider_url.empty()) {
        spdlog::error("--provider remote needs --provider-url");
        return 2;
      }
      provider = std::make_unique<uavlink::server::RemoteProvider>(
          uavlink::server::RemoteProviderConfig{provider_url, provider_key, provider_model});
    } else {
      provider = std::make_unique<uavlink::server::MockProvider>(mock_latency_ms);
    }

    uavlink::net::StackOptions options;
    options.listen.bind = bind;
    options.listen.port = port;
    options.analysis_threads = threads;
    options.server.consumer_frame_capacity = frame_capacity;
    uavlink::net::ServerStack stack(options, store, *objects, *provider);

    boost::asio::signal_set signals(stack.io(), SIGINT, SIGTERM);
    signals.async_wait([&](const boost::system::error_code& ec, int sig) {
      if (ec) return;
      spdlog::info("signal {}: draining for up to {} ms", sig, grace_ms);
      stack.stop(std::chrono::milliseconds(grace_ms));
    });
    stack.run_with([&] { spdlog::info("listening on {}:{} ({} provider)", bind, stack.port(), provider->name()); });
    spdlog::info("stopped");
    return 0;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
}
