#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "asymgame/dynamics.hpp"
#include "asymgame/measures.hpp"
#include "asymgame/value_solver.hpp"

namespace asymgame {

// Flat "dotted.key = value" text. '#' starts a comment; lists are comma
// separated. Every error message names the source line or the field.
class Config {
 public:
  struct Entry {
    std::string value;
    int line;
  };

  static Config parse(std::istream& in, const std::string& source = "config");
  static Config parse_file(const std::string& path);

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  const std::string& source() const { return source_; }

  std::string str(const std::string& key) const;
  std::string str(const std::string& key, const std::string& fallback) const;
  double real(const std::string& key) const;
  double real(const std::string& key, double fallback) const;
  long integer(const std::string& key) const;
  long integer(const std::string& key, long fallback) const;
  std::vector<double> reals(const std::string& key) const;
  std::vector<double> reals(const std::string& key, std::vector<double> fallback) const;
  std::vector<long> integers(const std::string& key) const;

  // Keys that were never read; used to reject typos.
  std::vector<std::string> unused() const;

 private:
  const Entry& require(const std::string& key) const;
  std::string where(const std::string& key) const;

  std::string source_;
  std::map<std::string, Entry> entries_;
  mutable std::map<std::string, bool> used_;
};

struct Scenario {
  std::string name = "scenario";
  ProblemSpec spec;
  ControlProblem problem;
  ParticleMeasure mu0 = ParticleMeasure::dirac({0.0});
  std::optional<ParticleMeasure> nu;  // second measure for `transport`
  int n = 1;
  SolverOptions solver;
  BruteForceGuards guards;
  std::vector<int> sweep;
  std::uint64_t seed = 0;
  double hamiltonian_radius = 0.0;  // coarsening radius for `hamiltonian`
  std::optional<std::vector<Point>> field;  // p on the atoms of mu0
  int ekeland_points = 100;
  double ekeland_eps = 0.1;
  double ekeland_spread = 0.5;
};

// Relative measure paths resolve against `base_dir`.
Scenario scenario_from_config(const Config& cfg, const std::string& base_dir = ".");
Scenario load_scenario(const std::string& path);

struct RunOptions {
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  bool timing = false;  // record wall_time_ms; off keeps output byte-stable
  std::ostream* log = nullptr;  // summary lines, usually stdout
};

// Commands return the process exit code and throw on errors.
int cmd_solve(const Scenario& sc, const RunOptions& opts);
int cmd_converge(const Scenario& sc, const RunOptions& opts);
int cmd_oracle(const Scenario& sc, const RunOptions& opts);
int cmd_hamiltonian(const Scenario& sc, const RunOptions& opts);
int cmd_transport(const Scenario& sc, const RunOptions& opts);
int cmd_ekeland(const Scenario& sc, const RunOptions& opts);

// Loads the config and dispatches; any exception becomes exit code 1 with
// the message written to `err`.
int run_command(const std::string& command, const std::string& config_path,
                const RunOptions& opts, std::ostream& err);

}  // namespace asymgame
