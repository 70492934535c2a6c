// Copyright 2026 The paritysim Authors
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

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "paritysim/paritysim.hpp"

namespace {

// Exit codes: 0 success, 2 config error, 3 numerical failure,
// 4 acceptance failure (selfcheck only).
constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;
constexpr int kAcceptanceFailure = 4;

int run_selfcheck(bool fast, int workers, bool seed_set, std::uint64_t seed) {
  paritysim::AcceptanceOptions opt;
  opt.fast = fast;
  if (workers >= 0) opt.workers = workers;
  if (seed_set) opt.seed = seed;
  const auto results = paritysim::run_acceptance(opt);
  bool all_pass = true;
  for (const auto& r : results) {
    std::printf("ACCEPTANCE %d: %s - %s: %s (%.1f s)\n", r.id,
                r.pass ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str(),
                r.seconds);
    all_pass = all_pass && r.pass;
  }
  std::printf("selfcheck: %s\n", all_pass ? "all criteria pass"
                                          : "one or more criteria FAILED");
  return all_pass ? kOk : kAcceptanceFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Three-qubit parity measurement simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  int workers = -1;
  bool fast = false;
  std::string decoherence;

  const std::vector<std::pair<std::string, std::string>> scenarios = {
      {"steady-scan",
       "Steady-state pointer fields over a (kappa, delta) grid and the "
       "parity-condition locus"},
      {"pointer-traj", "Time-domain pointer-field trajectories"},
      {"efficiency",
       "Measurement histograms at matched SNR for efficiencies 1 and 0.5"},
      {"transients",
       "Short vs long measurement at fixed drive-time product"},
      {"risetime", "Intra-parity leakage versus pulse rise time"},
      {"optimal",
       "Full report: histograms, fidelity vs time and threshold, decay "
       "benchmarks"}};
  for (const auto& [name, help] : scenarios) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "base RNG seed");
    sub->add_option("--workers", workers, "worker threads (0 = all cores)");
    sub->add_flag("--fast", fast, "CI mode: 100 trajectories");
    if (name == "optimal")
      sub->add_option("--decoherence", decoherence, "on | off")
          ->check(CLI::IsMember({"on", "off"}));
  }
  CLI::App* selfcheck =
      app.add_subcommand("selfcheck", "Run the acceptance checklist");
  selfcheck->add_option("--seed", seed, "base RNG seed");
  selfcheck->add_option("--workers", workers, "worker threads (0 = all cores)");
  selfcheck->add_flag("--fast", fast,
                      "CI mode: smaller ensembles, widened tolerances");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  if (name == "selfcheck")
    return run_selfcheck(fast, workers, sub->count("--seed") > 0, seed);

  nlohmann::json j = nlohmann::json::object();
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) {
      std::fprintf(stderr, "config error: cannot open %s\n",
                   config_path.c_str());
      return kConfigError;
    }
    try {
      in >> j;
    } catch (const std::exception& e) {
      std::fprintf(stderr, "config error: %s\n", e.what());
      return kConfigError;
    }
  }
  if (j.contains("scenario")) {
    if (j["scenario"] != name) {
      std::fprintf(stderr,
                   "config error: config names scenario '%s' but subcommand "
                   "is '%s'\n",
                   j["scenario"].get<std::string>().c_str(), name.c_str());
      return kConfigError;
    }
  } else {
    j["scenario"] = name;
  }

  try {
    paritysim::ScenarioConfig cfg = paritysim::parse_scenario_config(j);
    if (sub->count("--seed") > 0) cfg.seed = seed;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (workers >= 0) cfg.workers = workers;
    if (fast) {
      cfg.fast = true;
      cfg.n_trajectories = std::min(cfg.n_trajectories, 100);
    }
    if (!decoherence.empty()) cfg.decoherence = decoherence;
    paritysim::run_scenario(cfg);
    std::printf("wrote %s\n", cfg.out_dir.c_str());
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kNumericalError;
  }
  return kOk;
}
