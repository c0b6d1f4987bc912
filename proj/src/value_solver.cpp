#include "asymgame/value_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "asymgame/errors.hpp"
#include "asymgame/kernels.hpp"
#include "asymgame/transport.hpp"

namespace asymgame {
namespace {

constexpr double kProbTolerance = 1e-12;

// Saturating product used by the enumeration guards.
std::size_t sat_mul(std::size_t a, std::size_t b) {
  if (a != 0 && b > std::numeric_limits<std::size_t>::max() / a) {
    return std::numeric_limits<std::size_t>::max();
  }
  return a * b;
}

std::size_t sat_pow(std::size_t b, std::size_t e) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < e; ++i) r = sat_mul(r, b);
  return r;
}

}  // namespace

SequenceSpace::SequenceSpace(int n_stages, int v_count) : n_(n_stages), v_(v_count) {
  if (n_ < 1) throw InvalidArgument("number of stages must be >= 1");
  if (v_ < 1) throw InvalidArgument("v grid must be nonempty");
  pow_.assign(n_ + 1, 1);
  offset_.assign(n_ + 1, 0);
  for (int k = 1; k <= n_; ++k) {
    pow_[k] = sat_mul(pow_[k - 1], static_cast<std::size_t>(v_));
    offset_[k] = offset_[k - 1] + pow_[k - 1];
  }
}

StepControlSequence SequenceSpace::decode(std::size_t s) const {
  StepControlSequence seq;
  seq.values.resize(n_);
  for (int k = 0; k < n_; ++k) seq.values[k] = digit(s, k);
  return seq;
}

std::size_t SequenceSpace::encode(const StepControlSequence& seq) const {
  if (seq.n_stages() != n_) throw InvalidArgument("sequence length does not match stage count");
  std::size_t s = 0;
  for (int k = 0; k < n_; ++k) {
    const int v = seq.values[k];
    if (v < 0 || v >= v_) throw InvalidArgument("sequence index outside the v grid");
    s = s * v_ + static_cast<std::size_t>(v);
  }
  return s;
}

void MixedStrategyII::validate(const SequenceSpace& space) const {
  if (support.empty() || support.size() != probs.size()) {
    throw InvalidArgument("mixed strategy needs matching nonempty support and probs");
  }
  double total = 0.0;
  for (double p : probs) {
    if (!std::isfinite(p) || p < 0.0) throw InvalidArgument("mixed strategy has a negative probability");
    total += p;
  }
  if (std::abs(total - 1.0) > kProbTolerance) {
    throw InvalidArgument("mixed strategy probabilities sum to " + std::to_string(total));
  }
  std::set<std::size_t> seen;
  for (const auto& s : support) {
    if (!seen.insert(space.encode(s)).second) {
      throw InvalidArgument("mixed strategy support has duplicate sequences");
    }
  }
}

std::vector<double> MixedStrategyII::dense(const SequenceSpace& space) const {
  validate(space);
  std::vector<double> q(space.size(), 0.0);
  for (std::size_t i = 0; i < support.size(); ++i) q[space.encode(support[i])] = probs[i];
  return q;
}

MixedStrategyII MixedStrategyII::from_dense(const SequenceSpace& space,
                                            const std::vector<double>& q) {
  MixedStrategyII out;
  double total = 0.0;
  for (std::size_t s = 0; s < q.size(); ++s) {
    if (q[s] > 0.0) {
      out.support.push_back(space.decode(s));
      out.probs.push_back(q[s]);
      total += q[s];
    }
  }
  for (double& p : out.probs) p /= total;
  return out;
}

MixedStrategyII MixedStrategyII::pure(const StepControlSequence& seq) {
  return {{seq}, {1.0}};
}

StrategyTreeI StrategyTreeI::constant(std::size_t atoms, const SequenceSpace& space, int u) {
  return {space.n_stages(), space.v_count(),
          std::vector<std::vector<int>>(atoms, std::vector<int>(space.prefix_nodes(), u))};
}

StepControlSequence StrategyTreeI::u_sequence(std::size_t atom, const SequenceSpace& space,
                                              std::size_t seq) const {
  StepControlSequence u;
  u.values.resize(space.n_stages());
  const auto& d = decisions[atom];
  for (int k = 0; k < space.n_stages(); ++k) {
    u.values[k] = d[space.node(k, space.prefix_of(seq, k))];
  }
  return u;
}

bool StrategyTreeI::history_blind(const SequenceSpace& space) const {
  for (const auto& d : decisions) {
    for (int k = 0; k < space.n_stages(); ++k) {
      const int first = d[space.node(k, 0)];
      for (std::size_t h = 1; h < space.level_size(k); ++h) {
        if (d[space.node(k, h)] != first) return false;
      }
    }
  }
  return true;
}

double Cut::operator()(const std::vector<double>& q) const {
  double s = 0.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) s += coeffs[i] * q[i];
  return s;
}

double payoff(const ControlProblem& prob, const ParticleMeasure& mu0,
              const StrategyTreeI& strat_I, const MixedStrategyII& strat_II) {
  prob.validate();
  if (strat_II.support.empty()) throw InvalidArgument("payoff: empty Player II support");
  const int n = strat_II.support.front().n_stages();
  const SequenceSpace space(n, static_cast<int>(prob.v_grid.size()));
  strat_II.validate(space);
  if (strat_I.n_stages != n || strat_I.decisions.size() != mu0.size()) {
    throw InvalidArgument("payoff: Player I tree does not match the game");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < mu0.size(); ++i) {
    double atom = 0.0;
    for (std::size_t k = 0; k < strat_II.support.size(); ++k) {
      const auto& seq = strat_II.support[k];
      const auto u = strat_I.u_sequence(i, space, space.encode(seq));
      atom += strat_II.probs[k] * prob.g(flow(prob, mu0.point(i), u, seq));
    }
    total += mu0.weight(i) * atom;
  }
  return total;
}

BestResponse best_response_I_dense(const ControlProblem& prob,
                                   const ParticleMeasure& mu0,
                                   const SequenceSpace& space,
                                   const std::vector<double>& q) {
  if (q.size() != space.size()) throw InvalidArgument("best response: Q has the wrong length");
  const auto atoms = kernels::best_responses_parallel(prob, mu0, space, q);
  BestResponse br;
  br.tree.n_stages = space.n_stages();
  br.tree.v_count = space.v_count();
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    br.tree.decisions.push_back(atoms[i].decisions);
    br.atom_values.push_back(atoms[i].value);
    br.value += mu0.weight(i) * atoms[i].value;
    br.zero_probability_prefix = br.zero_probability_prefix || atoms[i].zero_probability_prefix;
  }
  return br;
}

BestResponse best_response_I(const ControlProblem& prob, const ParticleMeasure& mu0,
                             const MixedStrategyII& q, int n_stages) {
  prob.validate();
  const SequenceSpace space(n_stages, static_cast<int>(prob.v_grid.size()));
  return best_response_I_dense(prob, mu0, space, q.dense(space));
}

// ---------------------------------------------------------------------------
// Cutting-plane master

namespace {

struct MasterSolution {
  double value;
  std::vector<double> q;  // dense over all sequences
};

MasterSolution solve_master_full(const std::vector<Cut>& cuts, std::size_t n_seq) {
  MaxMinBlock blk{1.0, DenseMatrix(cuts.size(), n_seq)};
  for (std::size_t k = 0; k < cuts.size(); ++k) {
    std::copy(cuts[k].coeffs.begin(), cuts[k].coeffs.end(), blk.rows.row(k));
  }
  const MaxMinSolution sol = solve_max_min({std::move(blk)});
  return {sol.value, sol.mix};
}

// Restricted master over `columns`, priced against all sequences with the
// cut duals until no column improves the value.
MasterSolution solve_master_columns(const std::vector<Cut>& cuts, std::size_t n_seq,
                                    std::vector<std::size_t>& columns) {
  constexpr std::size_t kColumnsPerRound = 64;
  while (true) {
    MaxMinBlock blk{1.0, DenseMatrix(cuts.size(), columns.size())};
    for (std::size_t k = 0; k < cuts.size(); ++k) {
      for (std::size_t c = 0; c < columns.size(); ++c) blk.rows(k, c) = cuts[k].coeffs[columns[c]];
    }
    const MaxMinSolution sol = solve_max_min({std::move(blk)});
    std::vector<double> lambda = sol.duals[0];
    double lsum = 0.0;
    for (double l : lambda) lsum += l;
    if (lsum > 0.0) {
      for (double& l : lambda) l /= lsum;
    }
    std::vector<char> in_set(n_seq, 0);
    for (std::size_t c : columns) in_set[c] = 1;
    std::vector<std::pair<double, std::size_t>> improving;
    for (std::size_t s = 0; s < n_seq; ++s) {
      if (in_set[s]) continue;
      double price = 0.0;
      for (std::size_t k = 0; k < cuts.size(); ++k) price += lambda[k] * cuts[k].coeffs[s];
      if (price > sol.value + 1e-12) improving.emplace_back(-price, s);
    }
    if (improving.empty()) {
      MasterSolution out{sol.value, std::vector<double>(n_seq, 0.0)};
      for (std::size_t c = 0; c < columns.size(); ++c) out.q[columns[c]] = sol.mix[c];
      return out;
    }
    std::sort(improving.begin(), improving.end());
    for (std::size_t i = 0; i < std::min(kColumnsPerRound, improving.size()); ++i) {
      columns.push_back(improving[i].second);
    }
    std::sort(columns.begin(), columns.end());
  }
}

}  // namespace

VnResult solve_Vn(const ControlProblem& prob, const ParticleMeasure& mu0,
                  int n_stages, const SolverOptions& opts) {
  prob.validate();
  if (!(opts.tol > 0.0)) throw InvalidArgument("solver tolerance must be > 0");
  if (mu0.dim() != prob.dim) throw InvalidArgument("mu0 dimension does not match the problem");
  if (n_stages < 1) throw InvalidArgument("number of stages must be >= 1");
  const std::size_t n_seq =
      sat_pow(prob.v_grid.size(), static_cast<std::size_t>(n_stages));
  if (n_seq > opts.max_sequences) {
    throw InvalidArgument("|v_grid|^n = " + std::to_string(n_seq) +
                          " exceeds the enumeration guard " +
                          std::to_string(opts.max_sequences));
  }
  const SequenceSpace space(n_stages, static_cast<int>(prob.v_grid.size()));
  const bool column_generation = n_seq > opts.column_generation_threshold;

  VnResult res;
  std::vector<double> q(n_seq, 1.0 / static_cast<double>(n_seq));
  std::vector<double> best_q = q;
  double best_lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> columns;

  for (int it = 0; it < opts.max_iter; ++it) {
    const BestResponse br = best_response_I_dense(prob, mu0, space, q);
    res.response_values.push_back(br.value);
    res.queried.push_back(q);
    if (br.value > best_lower) {
      best_lower = br.value;
      best_q = q;
    }
    Cut cut{kernels::cut_coefficients_parallel(prob, mu0, br.tree, space), it};
    if (column_generation && columns.empty()) {
      columns.push_back(static_cast<std::size_t>(
          std::max_element(cut.coeffs.begin(), cut.coeffs.end()) - cut.coeffs.begin()));
    }
    res.cuts.push_back(std::move(cut));

    const MasterSolution master = column_generation
                                      ? solve_master_columns(res.cuts, n_seq, columns)
                                      : solve_master_full(res.cuts, n_seq);
    upper = master.value;
    res.master_values.push_back(upper);
    q = master.q;
    res.iterations = it + 1;
    if (upper - best_lower <= opts.tol) {
      res.converged = true;
      break;
    }
  }
  res.value = best_lower;
  res.upper = upper;
  res.gap = std::max(0.0, upper - best_lower);
  res.q_star = MixedStrategyII::from_dense(space, best_q);
  return res;
}

// ---------------------------------------------------------------------------
// Brute force

BruteForceResult brute_force_value(const ControlProblem& prob,
                                   const ParticleMeasure& mu0, int n_stages,
                                   const BruteForceGuards& guards) {
  prob.validate();
  if (mu0.dim() != prob.dim) throw InvalidArgument("mu0 dimension does not match the problem");
  if (n_stages < 1) throw InvalidArgument("number of stages must be >= 1");
  const std::size_t cols = sat_pow(prob.v_grid.size(), static_cast<std::size_t>(n_stages));
  if (cols > guards.max_cols) {
    throw InvalidArgument("brute force: " + std::to_string(cols) +
                          " Player II sequences exceed the guard " +
                          std::to_string(guards.max_cols));
  }
  const SequenceSpace space(n_stages, static_cast<int>(prob.v_grid.size()));
  const std::size_t per_atom = sat_pow(prob.u_grid.size(), space.prefix_nodes());
  std::size_t rows = 1;
  for (std::size_t i = 0; i < mu0.size(); ++i) rows = sat_mul(rows, per_atom);
  if (rows > guards.max_rows) {
    throw InvalidArgument("brute force: " +
                          (rows == std::numeric_limits<std::size_t>::max()
                               ? std::string("too many")
                               : std::to_string(rows)) +
                          " Player I tree tuples exceed the guard " +
                          std::to_string(guards.max_rows));
  }

  std::vector<DenseMatrix> tables;
  tables.reserve(mu0.size());
  for (std::size_t i = 0; i < mu0.size(); ++i) {
    tables.push_back(kernels::atom_tree_payoffs_parallel(prob, mu0.point(i), space));
  }

  BruteForceResult bf;
  bf.rows = rows;
  bf.cols = cols;
  bf.trees_per_atom.assign(mu0.size(), per_atom);
  bf.matrix = DenseMatrix(rows, cols);
  const std::size_t atoms = mu0.size();
#pragma omp parallel for schedule(static)
  for (long long r = 0; r < static_cast<long long>(rows); ++r) {
    std::size_t rest = static_cast<std::size_t>(r);
    std::vector<std::size_t> t(atoms);
    for (std::size_t i = 0; i < atoms; ++i) {
      t[i] = rest % per_atom;
      rest /= per_atom;
    }
    double* row = bf.matrix.row(static_cast<std::size_t>(r));
    for (std::size_t s = 0; s < cols; ++s) {
      double acc = 0.0;
      for (std::size_t i = 0; i < atoms; ++i) acc += mu0.weight(i) * tables[i](t[i], s);
      row[s] = acc;
    }
  }
  bf.certificate = solve_matrix_game(MatrixGame{bf.matrix});
  bf.value = bf.certificate.value;
  return bf;
}

StrategyTreeI brute_force_tree(const ControlProblem& prob, const BruteForceResult& bf,
                               std::size_t atoms, const SequenceSpace& space,
                               std::size_t row) {
  StrategyTreeI tree{space.n_stages(), space.v_count(), {}};
  for (std::size_t i = 0; i < atoms; ++i) {
    const std::size_t per = bf.trees_per_atom[i];
    tree.decisions.push_back(kernels::decode_tree(row % per, space.prefix_nodes(),
                                                  static_cast<int>(prob.u_grid.size())));
    row /= per;
  }
  return tree;
}

// ---------------------------------------------------------------------------
// Discrete dynamic programming check

namespace {

struct FirstStageEvaluation {
  double value;                                  // max_v V_{n-1}(mu'(P, v))
  std::vector<std::vector<double>> cut_coeffs;   // per v: [x * U + u]
};

class FirstStageProblem {
 public:
  FirstStageProblem(const ControlProblem& prob, const ParticleMeasure& mu0, int n,
                    const BruteForceGuards& guards)
      : prob_(prob), mu0_(mu0), n_(n), guards_(guards),
        tau_(prob.horizon / n),
        cont_(prob.with_horizon(prob.horizon - prob.horizon / n)),
        cont_space_(n - 1, static_cast<int>(prob.v_grid.size())) {
    const std::size_t nu = prob.u_grid.size(), nv = prob.v_grid.size();
    next_.resize(mu0.size() * nu * nv);
    for (std::size_t x = 0; x < mu0.size(); ++x) {
      for (std::size_t u = 0; u < nu; ++u) {
        for (std::size_t v = 0; v < nv; ++v) {
          Point y = mu0.point(x);
          advance_stage(prob, y, prob.u_grid[u], prob.v_grid[v], tau_);
          next_[index(x, u, v)] = std::move(y);
        }
      }
    }
  }

  std::size_t atoms() const { return mu0_.size(); }
  std::size_t u_count() const { return prob_.u_grid.size(); }

  FirstStageEvaluation evaluate(const std::vector<std::vector<double>>& mix) const {
    const std::size_t nu = u_count(), nv = prob_.v_grid.size();
    FirstStageEvaluation ev{-std::numeric_limits<double>::infinity(), {}};
    for (std::size_t v = 0; v < nv; ++v) {
      std::vector<Point> pts;
      std::vector<double> w;
      for (std::size_t x = 0; x < atoms(); ++x) {
        for (std::size_t u = 0; u < nu; ++u) {
          const double m = mu0_.weight(x) * mix[x][u];
          if (m > 0.0) {
            pts.push_back(next_[index(x, u, v)]);
            w.push_back(m);
          }
        }
      }
      const ParticleMeasure pushed(std::move(pts), std::move(w));
      const BruteForceResult bf = brute_force_value(cont_, pushed, n_ - 1, guards_);
      ev.value = std::max(ev.value, bf.value);
      // Supporting linear minorant at this mix: per-branch continuation values
      // against the continuation game's optimal Q.
      const auto mass = kernels::prefix_masses(cont_space_, bf.certificate.col_mix);
      std::vector<double> coeffs(atoms() * nu);
      for (std::size_t x = 0; x < atoms(); ++x) {
        for (std::size_t u = 0; u < nu; ++u) {
          const auto r = kernels::atom_best_response(cont_, next_[index(x, u, v)],
                                                     cont_space_, mass);
          coeffs[x * nu + u] = mu0_.weight(x) * r.value;
        }
      }
      ev.cut_coeffs.push_back(std::move(coeffs));
    }
    return ev;
  }

 private:
  std::size_t index(std::size_t x, std::size_t u, std::size_t v) const {
    return (x * prob_.u_grid.size() + u) * prob_.v_grid.size() + v;
  }

  const ControlProblem& prob_;
  const ParticleMeasure& mu0_;
  int n_;
  BruteForceGuards guards_;
  double tau_;
  ControlProblem cont_;
  SequenceSpace cont_space_;
  std::vector<Point> next_;
};

// min over per-atom mixes of the max of the collected linear minorants.
std::pair<double, std::vector<std::vector<double>>> minimize_cut_envelope(
    const std::vector<std::vector<double>>& cuts, std::size_t atoms, std::size_t nu) {
  std::vector<double> top(atoms, -std::numeric_limits<double>::infinity());
  for (const auto& c : cuts) {
    for (std::size_t x = 0; x < atoms; ++x) {
      for (std::size_t u = 0; u < nu; ++u) top[x] = std::max(top[x], c[x * nu + u]);
    }
  }
  // Variables: P[x][u] then s. Constraints: one per cut, one per atom.
  const std::size_t nvar = atoms * nu + 1;
  DenseMatrix a(cuts.size() + atoms, nvar);
  std::vector<double> b(cuts.size() + atoms, 0.0), obj(nvar, 0.0);
  obj[nvar - 1] = 1.0;
  for (std::size_t k = 0; k < cuts.size(); ++k) {
    for (std::size_t x = 0; x < atoms; ++x) {
      for (std::size_t u = 0; u < nu; ++u) {
        a(k, x * nu + u) = -(top[x] - cuts[k][x * nu + u]);
      }
    }
    a(k, nvar - 1) = 1.0;
  }
  for (std::size_t x = 0; x < atoms; ++x) {
    for (std::size_t u = 0; u < nu; ++u) a(cuts.size() + x, x * nu + u) = 1.0;
    b[cuts.size() + x] = 1.0;
  }
  const LpSolution lp = maximize_leq(obj, a, b);
  std::vector<std::vector<double>> mix(atoms, std::vector<double>(nu, 0.0));
  for (std::size_t x = 0; x < atoms; ++x) {
    double s = 0.0;
    for (std::size_t u = 0; u < nu; ++u) {
      mix[x][u] = lp.x[x * nu + u];
      s += mix[x][u];
    }
    mix[x][0] += std::max(0.0, 1.0 - s);
    s = 0.0;
    for (double p : mix[x]) s += p;
    for (double& p : mix[x]) p /= s;
  }
  // Envelope value recomputed at the normalized mix.
  double env = -std::numeric_limits<double>::infinity();
  for (const auto& c : cuts) {
    double val = 0.0;
    for (std::size_t x = 0; x < atoms; ++x) {
      for (std::size_t u = 0; u < nu; ++u) val += c[x * nu + u] * mix[x][u];
    }
    env = std::max(env, val);
  }
  return {env, mix};
}

// Largest-remainder rounding of a probability vector onto multiples of 1/res.
std::vector<double> round_to_grid(const std::vector<double>& p, int res) {
  std::vector<int> units(p.size());
  std::vector<std::pair<double, std::size_t>> rem;
  int used = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double scaled = p[i] * res;
    units[i] = static_cast<int>(std::floor(scaled));
    used += units[i];
    rem.emplace_back(-(scaled - units[i]), i);
  }
  std::sort(rem.begin(), rem.end());
  for (int k = 0; k < res - used; ++k) ++units[rem[static_cast<std::size_t>(k) % rem.size()].second];
  std::vector<double> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = static_cast<double>(units[i]) / res;
  return out;
}

}  // namespace

DppReport dpp_check(const ControlProblem& prob, const ParticleMeasure& mu0,
                    int n_stages, const BruteForceGuards& guards) {
  if (n_stages < 2) throw InvalidArgument("dpp_check needs at least 2 stages");
  prob.validate();
  DppReport rep;
  rep.lhs = brute_force_value(prob, mu0, n_stages, guards).value;

  const FirstStageProblem fs(prob, mu0, n_stages, guards);
  const std::size_t atoms = fs.atoms(), nu = fs.u_count();
  std::vector<std::vector<double>> mix(atoms, std::vector<double>(nu, 1.0 / nu));
  std::vector<std::vector<double>> cuts;
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> best_mix = mix;
  constexpr int kMaxIter = 200;
  for (int it = 0; it < kMaxIter; ++it) {
    FirstStageEvaluation ev = fs.evaluate(mix);
    rep.iterations = it + 1;
    if (ev.value < best) {
      best = ev.value;
      best_mix = mix;
    }
    for (auto& c : ev.cut_coeffs) cuts.push_back(std::move(c));
    auto [lower, next] = minimize_cut_envelope(cuts, atoms, nu);
    if (best - lower <= 1e-9) break;
    mix = std::move(next);
  }
  rep.rhs = best;
  rep.first_stage_mix = best_mix;
  rep.difference = std::abs(rep.lhs - rep.rhs);

  std::vector<std::vector<double>> dyadic(atoms);
  for (std::size_t x = 0; x < atoms; ++x) dyadic[x] = round_to_grid(best_mix[x], rep.dyadic_resolution);
  rep.rhs_dyadic = fs.evaluate(dyadic).value;
  rep.dyadic_slack = rep.rhs_dyadic - rep.rhs;
  return rep;
}

// ---------------------------------------------------------------------------
// Ekeland point on a finite domain

EkelandResult ekeland_point(const std::vector<DomainPoint>& domain,
                            const std::function<double(double, const ParticleMeasure&)>& f,
                            double eps) {
  if (domain.empty()) throw InvalidArgument("ekeland_point: empty domain");
  if (!(eps > 0.0)) throw InvalidArgument("ekeland_point: eps must be > 0");
  const std::size_t n = domain.size();
  std::vector<double> F(n);
  for (std::size_t i = 0; i < n; ++i) {
    F[i] = f(domain[i].t, domain[i].mu);
    if (!std::isfinite(F[i])) throw InvalidArgument("ekeland_point: F is not finite on the domain");
  }
  std::map<std::pair<std::size_t, std::size_t>, double> cache;
  const auto dist = [&](std::size_t i, std::size_t j) {
    if (i == j) return 0.0;
    const auto key = std::minmax(i, j);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    const double d = wasserstein2(domain[key.first].mu, domain[key.second].mu).distance;
    cache.emplace(key, d);
    return d;
  };

  const double min_f = *std::min_element(F.begin(), F.end());
  std::size_t cur = 0;
  while (!(F[cur] <= min_f + eps)) ++cur;

  EkelandResult res;
  res.chain.push_back(cur);
  while (true) {
    std::vector<std::size_t> s_set;
    double inf_s = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (F[j] < F[cur] - eps * dist(j, cur)) {
        s_set.push_back(j);
        inf_s = std::min(inf_s, F[j]);
      }
    }
    if (s_set.empty()) break;
    const double target = 0.5 * (F[cur] + inf_s);
    for (std::size_t j : s_set) {
      if (F[j] <= target) {
        cur = j;
        break;
      }
    }
    res.chain.push_back(cur);
  }
  res.index = cur;
  for (std::size_t j = 0; j < n; ++j) {
    const double lhs = F[j] - (F[cur] - eps * dist(j, cur));
    if (lhs < 0.0) res.certificate.push_back({j, 1, -lhs});
  }
  if (F[cur] > min_f + eps) res.certificate.push_back({cur, 2, F[cur] - min_f - eps});
  return res;
}

}  // namespace asymgame
