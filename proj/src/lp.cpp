#include "asymgame/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "asymgame/errors.hpp"

namespace asymgame {

namespace {

constexpr double kPivot = 1e-9;
constexpr double kRelPivot = 1e-7;
constexpr double kRatioTie = 1e-12;
constexpr double kFeasible = 1e-9;
constexpr double kPerturb = 1e-7;
constexpr long kBlandAfter = 50;
constexpr long kRefactor = 32;

using Index = Eigen::Index;

// Revised simplex state over columns 0..n-1 (structural) and n..n+m-1
// (slacks). The basis inverse is kept explicitly and updated per pivot, then
// rebuilt from the original data every kRefactor pivots and before any
// optimality or feasibility verdict.
class Simplex {
 public:
  Simplex(const std::vector<double>& c, const DenseMatrix& a, long max_iter)
      : c_(c), a_(a), m_(a.rows()), n_(a.cols()), max_iter_(max_iter),
        basis_(m_), basic_(n_ + m_, 0),
        binv_(Eigen::MatrixXd::Identity(static_cast<Index>(m_), static_cast<Index>(m_))),
        rhs_(static_cast<Index>(m_)), xb_(static_cast<Index>(m_)), y_(static_cast<Index>(m_)),
        cb_(static_cast<Index>(m_)), dir_(static_cast<Index>(m_)), reduced_(n_) {
    for (std::size_t i = 0; i < m_; ++i) {
      basis_[i] = n_ + i;
      basic_[n_ + i] = 1;
    }
  }

  void set_rhs(const Eigen::VectorXd& rhs) { rhs_ = rhs; }

  // Primal simplex from a (near) feasible basis: Dantzig pricing, falling
  // back to Bland's rule while pivots stay degenerate.
  void primal(double tol) {
    long degenerate_run = 0;
    for (;;) {
      refresh();
      const bool bland = degenerate_run >= kBlandAfter;
      const std::size_t enter = price(tol, bland);
      if (enter == none()) {
        if (fresh()) return;
        since_refactor_ = kRefactor;
        continue;
      }
      column(enter, col_);
      dir_.noalias() = binv_ * col_;
      const double min_pivot = pivot_floor();
      // Harris ratio test: bound the step with a small feasibility allowance,
      // then take the largest pivot within it. Under Bland the exact minimum
      // ratio is used and ties go to the lowest basic index.
      const double allowance = bland ? kRatioTie : kFeasible;
      double bound = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m_; ++i) {
        const double w = dir_[static_cast<Index>(i)];
        if (w > min_pivot) bound = std::min(bound, (value(i) + allowance) / w);
      }
      if (bound == std::numeric_limits<double>::infinity()) {
        throw SolverFailure("LP is unbounded", iterations_);
      }
      std::size_t leave = m_;
      for (std::size_t i = 0; i < m_; ++i) {
        const double w = dir_[static_cast<Index>(i)];
        if (w <= min_pivot || value(i) / w > bound) continue;
        if (leave == m_ || (bland ? basis_[i] < basis_[leave] : w > dir_[static_cast<Index>(leave)])) {
          leave = i;
        }
      }
      const double step = value(leave) / dir_[static_cast<Index>(leave)];
      degenerate_run = step > kRatioTie ? 0 : degenerate_run + 1;
      pivot(leave, enter);
    }
  }

  // Dual simplex: restores primal feasibility after the right-hand side
  // changed under a dual feasible basis. Returns true if any pivot was made.
  bool dual() {
    bool moved = false;
    for (;;) {
      refresh();
      std::size_t leave = m_;
      double worst = -kFeasible;
      for (std::size_t i = 0; i < m_; ++i) {
        if (xb_[static_cast<Index>(i)] < worst) {
          worst = xb_[static_cast<Index>(i)];
          leave = i;
        }
      }
      if (leave == m_) {
        if (fresh()) return moved;
        since_refactor_ = kRefactor;
        continue;
      }
      const auto row = binv_.row(static_cast<Index>(leave));
      compute_reduced();
      std::size_t enter = none();
      double best = std::numeric_limits<double>::infinity(), best_alpha = 0.0;
      for (std::size_t j = 0; j < n_ + m_; ++j) {
        if (basic_[j]) continue;
        double alpha = 0.0;
        if (j < n_) {
          for (std::size_t i = 0; i < m_; ++i) alpha += row[static_cast<Index>(i)] * a_(i, j);
        } else {
          alpha = row[static_cast<Index>(j - n_)];
        }
        if (alpha >= -kPivot) continue;
        const double ratio = std::max(0.0, -reduced(j)) / -alpha;
        if (ratio < best - kRatioTie || (ratio <= best + kRatioTie && -alpha > best_alpha)) {
          best = std::min(best, ratio);
          best_alpha = -alpha;
          enter = j;
        }
      }
      if (enter == none()) throw SolverFailure("LP is infeasible", iterations_);
      column(enter, col_);
      dir_.noalias() = binv_ * col_;
      pivot(leave, enter);
      moved = true;
    }
  }

  LpSolution solution() const {
    LpSolution sol;
    sol.iterations = iterations_;
    sol.x.assign(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < n_) sol.x[basis_[i]] = value(i);
    }
    sol.duals.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) sol.duals[i] = std::max(0.0, y_[static_cast<Index>(i)]);
    double obj = 0.0;
    for (std::size_t j = 0; j < n_; ++j) obj += c_[j] * sol.x[j];
    sol.objective = obj;
    return sol;
  }

 private:
  std::size_t none() const { return n_ + m_; }
  bool fresh() const { return since_refactor_ == 0; }
  double value(std::size_t i) const { return std::max(0.0, xb_[static_cast<Index>(i)]); }
  double cost(std::size_t j) const { return j < n_ ? c_[j] : 0.0; }
  double reduced(std::size_t j) const {
    return j < n_ ? c_[j] - reduced_[j] : -y_[static_cast<Index>(j - n_)];
  }
  double pivot_floor() const {
    return m_ > 0 ? std::max(kPivot, kRelPivot * dir_.cwiseAbs().maxCoeff()) : kPivot;
  }

  void column(std::size_t j, Eigen::VectorXd& out) const {
    out.setZero(static_cast<Index>(m_));
    if (j < n_) {
      for (std::size_t i = 0; i < m_; ++i) out[static_cast<Index>(i)] = a_(i, j);
    } else {
      out[static_cast<Index>(j - n_)] = 1.0;
    }
  }

  void refresh() {
    if (since_refactor_ >= kRefactor) {
      Eigen::MatrixXd bmat(static_cast<Index>(m_), static_cast<Index>(m_));
      for (std::size_t i = 0; i < m_; ++i) {
        column(basis_[i], col_);
        bmat.col(static_cast<Index>(i)) = col_;
      }
      binv_ = bmat.partialPivLu().inverse();
      since_refactor_ = 0;
    }
    for (std::size_t i = 0; i < m_; ++i) cb_[static_cast<Index>(i)] = cost(basis_[i]);
    xb_.noalias() = binv_ * rhs_;
    y_.noalias() = binv_.transpose() * cb_;
  }

  void compute_reduced() {
    std::fill(reduced_.begin(), reduced_.end(), 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      const double yi = y_[static_cast<Index>(i)];
      if (yi == 0.0) continue;
      const double* row = a_.row(i);
      for (std::size_t j = 0; j < n_; ++j) reduced_[j] += yi * row[j];
    }
  }

  std::size_t price(double tol, bool bland) {
    compute_reduced();
    std::size_t enter = none();
    double best = tol;
    for (std::size_t j = 0; j < n_ + m_; ++j) {
      if (basic_[j]) continue;
      const double d = reduced(j);
      if (d > best) {
        enter = j;
        if (bland) break;
        best = d;
      }
    }
    return enter;
  }

  void pivot(std::size_t leave, std::size_t enter) {
    if (++iterations_ > max_iter_) throw SolverFailure("simplex iteration cap reached", iterations_);
    const auto r = static_cast<Index>(leave);
    binv_.row(r) /= dir_[r];
    for (Index i = 0; i < static_cast<Index>(m_); ++i) {
      if (i != r && dir_[i] != 0.0) binv_.row(i) -= dir_[i] * binv_.row(r);
    }
    ++since_refactor_;
    basic_[basis_[leave]] = 0;
    basic_[enter] = 1;
    basis_[leave] = enter;
  }

  const std::vector<double>& c_;
  const DenseMatrix& a_;
  std::size_t m_, n_;
  long max_iter_;
  long iterations_ = 0, since_refactor_ = 0;
  std::vector<std::size_t> basis_;
  std::vector<char> basic_;
  Eigen::MatrixXd binv_;
  Eigen::VectorXd rhs_, xb_, y_, cb_, dir_, col_;
  std::vector<double> reduced_;
};

}  // namespace

LpSolution maximize_leq(const std::vector<double>& c, const DenseMatrix& a,
                        const std::vector<double>& b, double tol) {
  const std::size_t m = a.rows(), n = a.cols();
  if (c.size() != n || b.size() != m) {
    throw InvalidArgument("maximize_leq: inconsistent LP dimensions");
  }
  for (double bi : b) {
    if (!(bi >= 0.0)) throw InvalidArgument("maximize_leq: needs b >= 0");
  }
  const long max_iter = 50L * static_cast<long>(n + m + 1) * static_cast<long>(m + 1) + 1000;
  Simplex simplex(c, a, max_iter);

  // Solve with a deterministic rhs perturbation first, which keeps the
  // simplex off degenerate vertices, then restore b, repair feasibility with
  // dual pivots and polish with primal ones.
  const Eigen::Map<const Eigen::VectorXd> exact(b.data(), static_cast<Index>(m));
  Eigen::VectorXd perturbed(static_cast<Index>(m));
  for (std::size_t i = 0; i < m; ++i) {
    const double frac = std::fmod(0.6180339887498949 * static_cast<double>(i + 1), 1.0);
    perturbed[static_cast<Index>(i)] = b[i] + kPerturb * (1.0 + b[i]) * (1.0 + frac);
  }
  simplex.set_rhs(perturbed);
  simplex.primal(tol);
  simplex.set_rhs(exact);
  simplex.dual();
  simplex.primal(tol);
  return simplex.solution();
}

MaxMinSolution solve_max_min(const std::vector<MaxMinBlock>& blocks, double tol) {
  if (blocks.empty()) throw InvalidArgument("solve_max_min: no blocks");
  const std::size_t v = blocks.front().rows.cols();
  if (v == 0) throw InvalidArgument("solve_max_min: empty simplex");
  std::size_t total_rows = 0;
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& blk : blocks) {
    if (blk.rows.cols() != v || blk.rows.rows() == 0) {
      throw InvalidArgument("solve_max_min: inconsistent block shapes");
    }
    if (!(blk.weight >= 0.0)) throw InvalidArgument("solve_max_min: negative weight");
    total_rows += blk.rows.rows();
    for (std::size_t r = 0; r < blk.rows.rows(); ++r) {
      for (std::size_t c = 0; c < v; ++c) {
        const double x = blk.rows(r, c);
        if (!std::isfinite(x)) throw InvalidArgument("solve_max_min: non-finite payoff");
        lo = std::min(lo, x);
      }
    }
  }
  // Shift payoffs by their minimum so z_j = s_j + lo with s_j >= 0, and relax
  // sum q = 1 to sum q <= 1: shifted payoffs are nonnegative, so filling the
  // remaining mass never hurts.
  const std::size_t nb = blocks.size();
  const std::size_t nvar = v + nb;
  DenseMatrix a(total_rows + 1, nvar);
  std::vector<double> b(total_rows + 1, 0.0), c(nvar, 0.0);
  std::size_t r0 = 0;
  for (std::size_t j = 0; j < nb; ++j) {
    const auto& blk = blocks[j];
    c[v + j] = blk.weight;
    for (std::size_t r = 0; r < blk.rows.rows(); ++r) {
      for (std::size_t col = 0; col < v; ++col) a(r0 + r, col) = -(blk.rows(r, col) - lo);
      a(r0 + r, v + j) = 1.0;
    }
    r0 += blk.rows.rows();
  }
  for (std::size_t col = 0; col < v; ++col) a(total_rows, col) = 1.0;
  b[total_rows] = 1.0;

  const LpSolution lp = maximize_leq(c, a, b, tol);

  MaxMinSolution out;
  out.iterations = lp.iterations;
  out.mix.assign(lp.x.begin(), lp.x.begin() + static_cast<long>(v));
  double mass = 0.0;
  for (double q : out.mix) mass += q;
  out.mix[0] += std::max(0.0, 1.0 - mass);
  mass = 0.0;
  for (double q : out.mix) mass += q;
  for (double& q : out.mix) q /= mass;

  // Value recomputed from the mix: tighter than the tableau rhs.
  double value = 0.0;
  out.duals.resize(nb);
  r0 = 0;
  for (std::size_t j = 0; j < nb; ++j) {
    const auto& blk = blocks[j];
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < blk.rows.rows(); ++r) {
      double s = 0.0;
      for (std::size_t col = 0; col < v; ++col) s += blk.rows(r, col) * out.mix[col];
      worst = std::min(worst, s);
      out.duals[j].push_back(lp.duals[r0 + r]);
    }
    r0 += blk.rows.rows();
    value += blk.weight * worst;
  }
  out.value = value;
  return out;
}

}  // namespace asymgame
