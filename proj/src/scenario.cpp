#include "asymgame/scenario.hpp"

#include <cctype>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "asymgame/csv.hpp"
#include "asymgame/errors.hpp"
#include "asymgame/game_kernel.hpp"
#include "asymgame/transport.hpp"

namespace asymgame {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Config

Config Config::parse(std::istream& in, const std::string& source) {
  Config cfg;
  cfg.source_ = source;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string at = source + ":" + std::to_string(line_no) + ": ";
    if (eq == std::string_view::npos) throw InvalidArgument(at + "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    if (key.empty()) throw InvalidArgument(at + "missing key before '='");
    for (char c : key) {
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.')) {
        throw InvalidArgument(at + "invalid key '" + key + "'");
      }
    }
    const auto [it, fresh] = cfg.entries_.emplace(key, Entry{std::string(trim(line.substr(eq + 1))), line_no});
    if (!fresh) {
      throw InvalidArgument(at + "duplicate key '" + key + "' (first set on line " +
                            std::to_string(it->second.line) + ")");
    }
  }
  return cfg;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config file '" + path + "'");
  return parse(in, path);
}

const Config::Entry& Config::require(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) {
    throw InvalidArgument(source_ + ": missing required field '" + key + "'");
  }
  used_[key] = true;
  return it->second;
}

std::string Config::where(const std::string& key) const {
  return source_ + ":" + std::to_string(entries_.at(key).line) + ": field '" + key + "'";
}

std::string Config::str(const std::string& key) const {
  const auto& e = require(key);
  if (e.value.empty()) throw InvalidArgument(where(key) + " is empty");
  return e.value;
}

std::string Config::str(const std::string& key, const std::string& fallback) const {
  return has(key) ? str(key) : fallback;
}

double Config::real(const std::string& key) const {
  const auto& e = require(key);
  return parse_real(e.value, where(key));
}

double Config::real(const std::string& key, double fallback) const {
  return has(key) ? real(key) : fallback;
}

long Config::integer(const std::string& key) const {
  const auto& e = require(key);
  return parse_int(e.value, where(key));
}

long Config::integer(const std::string& key, long fallback) const {
  return has(key) ? integer(key) : fallback;
}

std::vector<double> Config::reals(const std::string& key) const {
  const auto& e = require(key);
  std::vector<double> out;
  if (trim(e.value).empty()) return out;
  for (const auto& f : split_fields(e.value)) out.push_back(parse_real(f, where(key)));
  return out;
}

std::vector<double> Config::reals(const std::string& key, std::vector<double> fallback) const {
  return has(key) ? reals(key) : fallback;
}

std::vector<long> Config::integers(const std::string& key) const {
  const auto& e = require(key);
  std::vector<long> out;
  for (const auto& f : split_fields(e.value)) out.push_back(parse_int(f, where(key)));
  return out;
}

std::vector<std::string> Config::unused() const {
  std::vector<std::string> out;
  for (const auto& [k, e] : entries_) {
    if (!used_.count(k)) out.push_back(k);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Scenario

namespace {

std::vector<Point> chunk(const std::vector<double>& flat, int dim, const std::string& what) {
  if (flat.empty() || flat.size() % static_cast<std::size_t>(dim) != 0) {
    throw InvalidArgument("field '" + what + "' needs a nonempty multiple of " +
                          std::to_string(dim) + " values, got " + std::to_string(flat.size()));
  }
  std::vector<Point> out;
  for (std::size_t i = 0; i < flat.size(); i += dim) {
    out.emplace_back(flat.begin() + i, flat.begin() + i + dim);
  }
  return out;
}

ParticleMeasure measure_from_config(const Config& cfg, const std::string& prefix, int dim,
                                    const std::string& base_dir) {
  try {
    if (cfg.has(prefix + ".csv")) {
      fs::path p = cfg.str(prefix + ".csv");
      if (p.is_relative()) p = fs::path(base_dir) / p;
      ParticleMeasure mu = read_measure_csv_file(p.string());
      if (mu.dim() != dim) throw InvalidArgument("measure file has dimension " + std::to_string(mu.dim()));
      return mu;
    }
    auto points = chunk(cfg.reals(prefix + ".points"), dim, prefix + ".points");
    std::vector<double> w = cfg.reals(
        prefix + ".weights", std::vector<double>(points.size(), 1.0 / static_cast<double>(points.size())));
    return ParticleMeasure(std::move(points), std::move(w));
  } catch (const InvalidArgument& e) {
    const std::string msg = e.what();
    if (msg.find(prefix) != std::string::npos) throw;
    throw InvalidArgument("field '" + prefix + "': " + msg);
  }
}

}  // namespace

Scenario scenario_from_config(const Config& cfg, const std::string& base_dir) {
  Scenario sc;
  sc.name = cfg.str("scenario.name", "scenario");
  for (char c : sc.name) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) {
      throw InvalidArgument("field 'scenario.name' may only use letters, digits, '_' and '-'");
    }
  }
  sc.seed = static_cast<std::uint64_t>(cfg.integer("seed", 0));

  ProblemSpec& s = sc.spec;
  s.label = sc.name;
  s.kind = cfg.str("problem.kind");
  s.dim = static_cast<int>(cfg.integer("problem.dim", 1));
  s.u_dim = static_cast<int>(cfg.integer("problem.u_dim", 1));
  s.v_dim = static_cast<int>(cfg.integer("problem.v_dim", 1));
  if (s.dim < 1 || s.u_dim < 1 || s.v_dim < 1) {
    throw InvalidArgument("fields 'problem.dim', 'problem.u_dim', 'problem.v_dim' must be >= 1");
  }
  s.horizon = cfg.real("problem.T");
  if (!(s.horizon > 0.0)) throw InvalidArgument("field 'problem.T' must be > 0");
  s.u_grid = chunk(cfg.reals("problem.u_grid"), s.u_dim, "problem.u_grid");
  s.v_grid = chunk(cfg.reals("problem.v_grid"), s.v_dim, "problem.v_grid");
  s.a = cfg.reals("problem.A", {});
  s.b = cfg.reals("problem.B", {});
  s.c = cfg.reals("problem.C", {});
  s.drift = cfg.reals("problem.drift", {});
  s.omega = cfg.real("problem.omega", 1.0);
  s.domain_radius = cfg.real("problem.domain_radius", 10.0);
  s.substeps = static_cast<int>(cfg.integer("integrator.substeps", 16));

  TerminalSpec& g = s.terminal;
  g.kind = parse_terminal_kind(cfg.str("g.kind", "abs"));
  g.scale = cfg.real("g.scale", 1.0);
  g.offset = cfg.real("g.offset", 0.0);
  g.c = cfg.reals("g.c", {});
  g.table_x = cfg.reals("g.table_x", {});
  g.table_y = cfg.reals("g.table_y", {});
  sc.problem = build_problem(s);

  sc.mu0 = measure_from_config(cfg, "mu0", s.dim, base_dir);
  if (cfg.has("nu.points") || cfg.has("nu.csv")) {
    sc.nu = measure_from_config(cfg, "nu", s.dim, base_dir);
  }

  sc.n = static_cast<int>(cfg.integer("solver.n", 1));
  if (sc.n < 1) throw InvalidArgument("field 'solver.n' must be >= 1");
  sc.solver.tol = cfg.real("solver.tol", 1e-7);
  if (!(sc.solver.tol > 0.0)) throw InvalidArgument("field 'solver.tol' must be > 0");
  sc.solver.max_iter = static_cast<int>(cfg.integer("solver.max_iter", 500));
  if (sc.solver.max_iter < 1) throw InvalidArgument("field 'solver.max_iter' must be >= 1");
  sc.solver.max_sequences = static_cast<std::size_t>(cfg.integer("solver.max_sequences", 1'000'000));
  sc.guards.max_rows = static_cast<std::size_t>(cfg.integer("solver.max_rows", 100'000));
  sc.guards.max_cols = static_cast<std::size_t>(cfg.integer("solver.max_cols", 1'000));

  if (cfg.has("sweep.n")) {
    for (long n : cfg.integers("sweep.n")) {
      if (n < 1) throw InvalidArgument("field 'sweep.n' values must be >= 1");
      sc.sweep.push_back(static_cast<int>(n));
    }
  }
  sc.hamiltonian_radius = cfg.real("hamiltonian.radius", 0.0);
  if (cfg.has("field.vectors")) {
    sc.field = chunk(cfg.reals("field.vectors"), s.dim, "field.vectors");
    if (sc.field->size() != sc.mu0.size()) {
      throw InvalidArgument("field 'field.vectors' needs one vector per mu0 atom");
    }
  }
  sc.ekeland_points = static_cast<int>(cfg.integer("ekeland.points", 100));
  sc.ekeland_eps = cfg.real("ekeland.eps", 0.1);
  sc.ekeland_spread = cfg.real("ekeland.spread", 0.5);
  if (sc.ekeland_points < 1) throw InvalidArgument("field 'ekeland.points' must be >= 1");

  if (const auto extra = cfg.unused(); !extra.empty()) {
    throw InvalidArgument(cfg.source() + ": unknown field '" + extra.front() + "'");
  }
  return sc;
}

Scenario load_scenario(const std::string& path) {
  const Config cfg = Config::parse_file(path);
  return scenario_from_config(cfg, fs::path(path).parent_path().string());
}

// ---------------------------------------------------------------------------
// Commands

namespace {

class OutFile {
 public:
  OutFile(const RunOptions& opts, const Scenario& sc, const std::string& suffix) {
    fs::create_directories(opts.out_dir);
    path_ = (fs::path(opts.out_dir) / (sc.name + suffix)).string();
    out_.open(path_, std::ios::binary | std::ios::trunc);
    if (!out_) throw InvalidArgument("cannot write '" + path_ + "'");
  }
  std::ofstream& stream() { return out_; }

 private:
  std::string path_;
  std::ofstream out_;
};

void log_line(const RunOptions& opts, const std::string& s) {
  if (opts.log) *opts.log << s << '\n';
}

std::string join_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += fields[i];
  }
  return out;
}

std::string sequence_label(const StepControlSequence& s) {
  std::string out;
  for (std::size_t k = 0; k < s.values.size(); ++k) {
    if (k) out += ' ';
    out += std::to_string(s.values[k]);
  }
  return out;
}

std::uint64_t effective_seed(const Scenario& sc, const RunOptions& opts) {
  return opts.seed.value_or(sc.seed);
}

ProjectionField field_for(const Scenario& sc) {
  ProjectionField p{sc.mu0, {}};
  if (sc.field) {
    p.vectors = *sc.field;
  } else {
    // Barycentric projection of the coupling delta_0 -> mu0: p(y) = 0 - y.
    for (const auto& y : sc.mu0.points()) {
      Point v(y.size());
      for (std::size_t k = 0; k < y.size(); ++k) v[k] = -y[k];
      p.vectors.push_back(std::move(v));
    }
  }
  return p;
}

// Atoms of mu0 plus every endpoint reachable in one stage of length T.
std::vector<Point> sample_points(const Scenario& sc) {
  std::vector<Point> pts = sc.mu0.points();
  for (const auto& x0 : sc.mu0.points()) {
    for (const auto& u : sc.problem.u_grid) {
      for (const auto& v : sc.problem.v_grid) {
        Point x = x0;
        advance_stage(sc.problem, x, u, v, sc.problem.horizon);
        pts.push_back(std::move(x));
      }
    }
  }
  return pts;
}

}  // namespace

int cmd_solve(const Scenario& sc, const RunOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  const VnResult r = solve_Vn(sc.problem, sc.mu0, sc.n, sc.solver);
  const double ms =
      opts.timing ? std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count()
                  : 0.0;

  OutFile value(opts, sc, "_value.csv");
  const std::string row = join_row({sc.name, std::to_string(sc.n), format_real(r.value),
                                    format_real(r.gap), std::to_string(r.iterations), format_real(ms)});
  value.stream() << "scenario,n,value,gap,iterations,wall_time_ms\n" << row << '\n';

  OutFile cert(opts, sc, "_certificate.csv");
  auto& c = cert.stream();
  const SequenceSpace space(sc.n, static_cast<int>(sc.problem.v_grid.size()));
  c << "record,id,sequence,value\n";
  c << "bound,lower,," << format_real(r.value) << '\n';
  c << "bound,upper,," << format_real(r.upper) << '\n';
  for (std::size_t k = 0; k < r.q_star.support.size(); ++k) {
    const auto& seq = r.q_star.support[k];
    c << "q," << space.encode(seq) << ',' << sequence_label(seq) << ',' << format_real(r.q_star.probs[k]) << '\n';
  }
  for (const Cut& cut : r.cuts) {
    for (std::size_t s = 0; s < cut.coeffs.size(); ++s) {
      c << "cut," << cut.tag << ',' << sequence_label(space.decode(s)) << ',' << format_real(cut.coeffs[s]) << '\n';
    }
  }
  log_line(opts, row);
  return r.converged ? 0 : 2;
}

int cmd_converge(const Scenario& sc, const RunOptions& opts) {
  if (sc.sweep.empty()) throw InvalidArgument("converge needs field 'sweep.n'");
  const auto samples = sample_points(sc);
  const ProjectionField p = field_for(sc);
  const double p_norm = l2_norm(p);
  const HamiltonianQuery query{&sc.problem, p};
  const double h_full = eval_H(query);

  OutFile out(opts, sc, "_converge.csv");
  out.stream() << "n,value,gap,h_gap,gamma_bound,v_count\n";
  for (int n : sc.sweep) {
    const auto coarse = coarsen_grid(sc.problem.v_grid, 1.0 / n);
    const VnResult r = solve_Vn(sc.problem.with_v_grid(coarse), sc.mu0, n, sc.solver);
    const double h_gap = h_full - eval_Hn(query, coarse);
    const double bound = gamma_n(sc.problem, sc.problem.v_grid, coarse, samples) * p_norm;
    const std::string row = join_row({std::to_string(n), format_real(r.value), format_real(r.gap),
                                      format_real(h_gap), format_real(bound),
                                      std::to_string(coarse.size())});
    out.stream() << row << '\n';
    log_line(opts, row);
  }
  return 0;
}

int cmd_oracle(const Scenario& sc, const RunOptions& opts) {
  const VnResult r = solve_Vn(sc.problem, sc.mu0, sc.n, sc.solver);
  const BruteForceResult bf = brute_force_value(sc.problem, sc.mu0, sc.n, sc.guards);
  const double diff = std::abs(r.value - bf.value);
  OutFile out(opts, sc, "_oracle.csv");
  const std::string row = join_row({sc.name, std::to_string(sc.n), format_real(r.value),
                                    format_real(bf.value), format_real(diff)});
  out.stream() << "scenario,n,solve_value,brute_value,difference\n" << row << '\n';
  log_line(opts, row);
  return diff <= sc.solver.tol + 1e-9 ? 0 : 2;
}

int cmd_hamiltonian(const Scenario& sc, const RunOptions& opts) {
  const auto samples = sample_points(sc);
  const ProjectionField p = field_for(sc);
  const HamiltonianQuery query{&sc.problem, p};
  const auto coarse = coarsen_grid(sc.problem.v_grid, sc.hamiltonian_radius);
  const double h = eval_H(query);
  const double hn = eval_Hn(query, coarse);
  const double gam = gamma_n(sc.problem, sc.problem.v_grid, coarse, samples);
  const double norm = l2_norm(p);
  OutFile out(opts, sc, "_hamiltonian.csv");
  const std::string row = join_row({"0", format_real(h), format_real(hn), format_real(h - hn),
                                    format_real(gam * norm), format_real(gam), format_real(norm),
                                    std::to_string(coarse.size())});
  out.stream() << "query,H,H_n,gap,bound,gamma_n,field_norm,v_count\n" << row << '\n';
  log_line(opts, row);
  return 0;
}

int cmd_transport(const Scenario& sc, const RunOptions& opts) {
  if (!sc.nu) throw InvalidArgument("transport needs field 'nu.points' or 'nu.csv'");
  const Wasserstein2Result w = wasserstein2(sc.mu0, *sc.nu);
  OutFile summary(opts, sc, "_transport.csv");
  const std::string row = join_row({sc.name, format_real(w.distance), format_real(w.plan.cost)});
  summary.stream() << "scenario,distance,cost\n" << row << '\n';

  OutFile plan(opts, sc, "_plan.csv");
  write_plan_csv(plan.stream(), w.plan);

  // Field on the target measure nu.
  const ProjectionField p = barycentric_projection(w.plan);
  OutFile proj(opts, sc, "_projection.csv");
  auto& o = proj.stream();
  const int d = p.base.dim();
  o << "j,w";
  for (int k = 1; k <= d; ++k) o << ",y_" << k;
  for (int k = 1; k <= d; ++k) o << ",p_" << k;
  o << '\n';
  for (std::size_t j = 0; j < p.base.size(); ++j) {
    o << j << ',' << format_real(p.base.weight(j));
    for (double y : p.base.point(j)) o << ',' << format_real(y);
    for (double v : p.vectors[j]) o << ',' << format_real(v);
    o << '\n';
  }
  log_line(opts, row);
  return 0;
}

int cmd_ekeland(const Scenario& sc, const RunOptions& opts) {
  std::mt19937_64 rng(effective_seed(sc, opts));
  std::uniform_real_distribution<double> time(0.0, sc.problem.horizon);
  std::normal_distribution<double> jitter(0.0, sc.ekeland_spread);
  std::vector<DomainPoint> domain;
  for (int i = 0; i < sc.ekeland_points; ++i) {
    std::vector<Point> pts = sc.mu0.points();
    for (auto& x : pts) {
      for (double& c : x) c += jitter(rng);
    }
    const double t = time(rng);
    domain.push_back({t, ParticleMeasure(std::move(pts), sc.mu0.weights())});
  }
  const auto& g = sc.problem.g;
  const auto F = [&g](double t, const ParticleMeasure& mu) {
    double s = t;
    for (std::size_t i = 0; i < mu.size(); ++i) s += mu.weight(i) * g(mu.point(i));
    return s;
  };
  const EkelandResult r = ekeland_point(domain, F, sc.ekeland_eps);
  const auto& pick = domain[r.index];
  OutFile out(opts, sc, "_ekeland.csv");
  const std::string row = join_row({sc.name, std::to_string(r.index), format_real(pick.t),
                                    format_real(F(pick.t, pick.mu)), std::to_string(r.chain.size()),
                                    std::to_string(r.certificate.size())});
  out.stream() << "scenario,index,t,F,chain_length,violations\n" << row << '\n';
  log_line(opts, row);
  return r.certificate.empty() ? 0 : 2;
}

int run_command(const std::string& command, const std::string& config_path,
                const RunOptions& opts, std::ostream& err) {
  try {
    const Scenario sc = load_scenario(config_path);
    if (command == "solve") return cmd_solve(sc, opts);
    if (command == "converge") return cmd_converge(sc, opts);
    if (command == "oracle") return cmd_oracle(sc, opts);
    if (command == "hamiltonian") return cmd_hamiltonian(sc, opts);
    if (command == "transport") return cmd_transport(sc, opts);
    if (command == "ekeland") return cmd_ekeland(sc, opts);
    err << "error: unknown command '" << command << "'\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace asymgame
