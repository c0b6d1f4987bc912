#pragma once

#include <cstddef>
#include <vector>

namespace asymgame {

// Row-major dense matrix.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double* row(std::size_t r) { return data_.data() + r * cols_; }
  const double* row(std::size_t r) const { return data_.data() + r * cols_; }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

struct LpSolution {
  std::vector<double> x;      // primal point
  std::vector<double> duals;  // one multiplier per constraint row
  double objective = 0.0;
  long iterations = 0;
};

// maximize c.x  s.t.  A x <= b, x >= 0, with b >= 0 so the slack basis is
// feasible. Revised simplex: Dantzig pricing with a Bland fallback on a
// slightly perturbed rhs, then dual and primal cleanup on the exact one.
// Throws SolverFailure on unboundedness or when the iteration cap is hit.
LpSolution maximize_leq(const std::vector<double>& c, const DenseMatrix& a,
                        const std::vector<double>& b, double tol = 1e-10);

// One block of a max-min over the simplex: rows[r][v] is the payoff of the
// minimizer's choice r against the maximizer's pure choice v.
struct MaxMinBlock {
  double weight;
  DenseMatrix rows;  // R x V
};

struct MaxMinSolution {
  double value = 0.0;
  std::vector<double> mix;                  // maximizer's probability vector
  std::vector<std::vector<double>> duals;   // per block, per row; sums to weight
  long iterations = 0;
};

// max over q in the V-simplex of sum_j weight_j * min_r (rows_j q)_r, solved
// as a single LP. All blocks must share the column count V.
MaxMinSolution solve_max_min(const std::vector<MaxMinBlock>& blocks,
                             double tol = 1e-10);

}  // namespace asymgame
