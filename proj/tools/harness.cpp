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
#include <iostream>

#include "uavlink/sim/world.hpp"

namespace {

int run(const std::string& scenario_path, const std::string& out_dir, std::optional<std::uint64_t> seed) {
  auto scenario = uavlink::load_scenario(scenario_path);
  if (seed) scenario.seed = *seed;
  auto result = uavlink::sim::run_scenario(scenario);
  uavlink::sim::write_run_outputs(result, out_dir);
  uavlink::sim::write_text(std::cout, result.report);
  if (result.edge_error) spdlog::error("edge stopped: {}", *result.edge_error);
  spdlog::info("outputs written to {}", out_dir);
  return result.passed() ? 0 : 1;
}

int check(const std::string& trace_path) {
  const auto trace = uavlink::sim::TraceLog::load(trace_path);
  bool ok = true;
  for (const auto& inv : uavlink::sim::check_trace(trace)) {
    std::cout << (inv.passed ? "PASS " : "FAIL ") << inv.name << " (" << inv.checked << " checks, "
              << inv.failure_count << " failures)\n";
    for (const auto& f : inv.failures) std::cout << "  " << f << '\n';
    ok = ok && inv.passed;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-event scenario harness"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir = "out", trace_path;
  std::optional<std::uint64_t> seed;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario under the simulated clock");
  run_cmd->add_option("--scenario", scenario_path, "Scenario YAML file")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--out", out_dir, "Output directory");
  run_cmd->add_option("--seed", seed, "Override the scenario seed");

  auto* check_cmd = app.add_subcommand("check", "Evaluate the invariant suite over a trace");
  check_cmd->add_option("--trace", trace_path, "trace.log from a run")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run_cmd) return run(scenario_path, out_dir, seed);
    return check(trace_path);
  } catch (const uavlink::ScenarioError& e) {
    spdlog::error("{}: {}", scenario_path, e.what());
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
  }
  return 2;
}
