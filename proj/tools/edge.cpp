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
#include <iostream>

#include "uavlink/net/edge_driver.hpp"
#include "uavlink/scenario/scenario.hpp"

namespace {

class LogObserver final : public uavlink::edge::EdgeObserver {
 public:
  void on_detect_done(const uavlink::edge::Frame& f, const uavlink::edge::DetectorOutput& out) override {
    spdlog::debug("frame {} detected {} objects", f.id, out.reports.size());
  }
  void on_gate(uavlink::edge::GateState from, uavlink::edge::GateEvent ev, uavlink::edge::GateState to) override {
    spdlog::debug("gate {} --{}--> {}", uavlink::edge::to_string(from), uavlink::edge::to_string(ev),
                  uavlink::edge::to_string(to));
  }
  void on_drop(std::string_view stage, std::uint64_t id) override { spdlog::debug("drop {} {}", stage, id); }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"uavlink edge node"};
  std::string scenario_path, url = "ws://127.0.0.1:8080/edge", token, drone_id;
  bool fast = false;
  int linger_ms = 3'000;
  app.add_option("--scenario", scenario_path, "Scenario YAML driving the camera, detector and encoder")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("--url", url, "Server edge endpoint")->envname("UAVLINK_EDGE_URL");
  app.add_option("--token", token, "Drone secret; defaults to the scenario's")->envname("UAVLINK_DRONE_TOKEN");
  app.add_option("--drone-id", drone_id, "Drone id; defaults to the scenario's");
  app.add_flag("--fast", fast, "Do not wait for wall time between captures");
  app.add_option("--linger-ms", linger_ms, "Stay connected this long after the last capture");
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Log every received message");
  CLI11_PARSE(app, argc, argv);

  if (verbose) spdlog::set_level(spdlog::level::debug);
  try {
    auto scenario = uavlink::load_scenario(scenario_path);
    if (!drone_id.empty()) scenario.drone_id = drone_id;
    auto config = uavlink::edge::EdgeConfig::from_scenario(scenario);
    if (!token.empty()) config.token = token;

    uavlink::net::EdgeDriverOptions options;
    options.target = uavlink::net::WsTarget::parse(url);
    options.realtime = !fast;
    options.linger = std::chrono::milliseconds(linger_ms);

    boost::asio::io_context ioc;
    uavlink::net::EdgeDriver driver(ioc, scenario, config, options);
    LogObserver log_observer;
    if (verbose) driver.set_observer(&log_observer);
    driver.set_on_done([&] { ioc.stop(); });
    boost::asio::signal_set signals(ioc, SIGINT, SIGTERM);
    signals.async_wait([&](const boost::system::error_code& ec, int) {
      if (!ec) driver.stop();
    });
    driver.start();
    ioc.run();

    const auto& s = driver.node().stats();
    std::cout << "frames_captured " << s.frames_captured << "\nuploads " << s.uploads << "\nverified " << s.verified
              << "\nrejected " << s.rejected << "\nstreams_started " << s.streams_started << "\nframes_encoded "
              << s.frames_encoded << "\nanalyses " << s.analyses << "\nconnections " << s.connections
              << "\nreconnects " << driver.reconnects() << '\n';
    if (const auto& fatal = driver.node().fatal_error()) {
      spdlog::error("refused: {}", *fatal);
      return 1;
    }
    return 0;
  } catch (const uavlink::ScenarioError& e) {
    spdlog::error("{}: {}", scenario_path, e.what());
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
  }
  return 2;
}
