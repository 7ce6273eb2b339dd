#pragma once

#include <optional>
#include <string>

#include "coexsim/scenario.hpp"

namespace coexsim::cli {

struct Options {
  std::optional<int> steps;
  std::optional<std::string> scheme;           // co | counter
  std::optional<int> quantum_channel;
  std::optional<int> guard_channels;
  std::optional<std::string> fwm;              // exact | averaged
  std::optional<std::string> track;            // full | target
  std::optional<std::string> img;              // on | off
  std::string out_dir = ".";
  long oracle_steps = 1000000;
  double tolerance_db = 0.25;
  double oracle_budget = 2e10;  // steps x (channels + triples) guard
  int jobs = 0;                 // 0: hardware concurrency
};

// Exit codes: 0 success, 1 comparison failure (verify), 2 usage/validation.
int cmd_run(const std::string& scenario_path, const Options& opt);
int cmd_sweep(const std::string& sweep_path, const Options& opt);
int cmd_verify(const std::string& scenario_path, const Options& opt);

// Scenario with command-line overrides applied, parsed but not validated.
Scenario load_with_overrides(const std::string& path, const Options& opt);

}  // namespace coexsim::cli
