#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "asymgame/scenario.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

int main(int argc, char** argv) {
  CLI::App app{"Solver for finite-grid differential games with a blind player"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config;
  asymgame::RunOptions opts;
  opts.log = &std::cout;
  std::optional<std::uint64_t> seed;
  int threads = 0;
  app.add_option("--config", config, "Scenario config file")->required()->check(CLI::ExistingFile);
  app.add_option("--out", opts.out_dir, "Directory for CSV output");
  app.add_option("--seed", seed, "Override the scenario seed");
  app.add_option("--threads", threads, "OpenMP threads (0: runtime default)")->check(CLI::NonNegativeNumber);
  app.add_flag("--timing", opts.timing, "Record wall_time_ms instead of 0");

  std::string command;
  for (const char* name : {"solve", "converge", "oracle", "hamiltonian", "transport", "ekeland"}) {
    app.add_subcommand(name)->callback([&command, name] { command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }
  opts.seed = seed;
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#endif
  return asymgame::run_command(command, config, opts, std::cerr);
}
