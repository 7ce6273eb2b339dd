#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "coexsim/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"coexsim: interference noise in quantum channels coexisting with classical WDM"};
  app.require_subcommand(1);

  coexsim::cli::Options opt;
  std::string path;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("path", path, "scenario (or sweep) document")->required();
    cmd->add_option("--steps", opt.steps, "RK4 steps per span");
    cmd->add_option("--scheme", opt.scheme, "co|counter");
    cmd->add_option("--quantum-channel", opt.quantum_channel, "quantum slot channel index");
    cmd->add_option("--guard-channels", opt.guard_channels, "deallocated slots on each side");
    cmd->add_option("--fwm", opt.fwm, "exact|averaged");
    cmd->add_option("--track", opt.track, "full|target");
    cmd->add_option("--img", opt.img, "on|off inter-mode-group terms");
    cmd->add_option("--out", opt.out_dir, "output directory (default .)");
  };

  CLI::App* run = app.add_subcommand("run", "solve a scenario, write trajectory and summary CSVs");
  add_common(run);

  CLI::App* sweep = app.add_subcommand("sweep", "run a sweep document, one row per value");
  add_common(sweep);
  sweep->add_option("--jobs", opt.jobs, "parallel sweep workers (default: cores)");

  CLI::App* verify = app.add_subcommand("verify", "compare the fast path against the fine-step oracle");
  add_common(verify);
  verify->add_option("--oracle-steps", opt.oracle_steps, "reference step count (default 1e6)");
  verify->add_option("--tolerance-db", opt.tolerance_db, "pass/fail endpoint tolerance (default 0.25)");
  verify->add_option("--budget", opt.oracle_budget, "oracle cost guard (steps x terms)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return coexsim::cli::cmd_run(path, opt);
    if (sweep->parsed()) return coexsim::cli::cmd_sweep(path, opt);
    if (verify->parsed()) return coexsim::cli::cmd_verify(path, opt);
  } catch (const coexsim::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const coexsim::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
