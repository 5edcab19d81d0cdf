#pragma once

// Dense dictionary simplex for  max c.x  s.t.  A x <= h, x >= 0, where the
// initial right-hand sides are nonnegative (the origin is feasible). Rows can
// be appended after a solve; the dual simplex then restores feasibility from
// the previous optimal basis.

#include <cstddef>
#include <utility>
#include <vector>

namespace sepsell {

enum class LpStatus { Optimal, Unbounded, Infeasible, IterationLimit };

class SimplexLp {
 public:
  explicit SimplexLp(std::vector<double> objective);

  /// Sparse row sum_k coef * x[var] <= rhs. Returns the row index.
  std::size_t add_row(const std::vector<std::pair<std::size_t, double>>& terms, double rhs);

  LpStatus solve(std::size_t max_pivots = 0);

  double objective_value() const { return z0_; }
  std::vector<double> primal() const;
  std::size_t num_rows() const { return basis_.size(); }
  std::size_t num_vars() const { return n_; }
  std::size_t pivots() const { return pivots_; }

  double tol = 1e-9;

 private:
  double& at(std::size_t row, std::size_t col) { return tab_[row * n_ + col]; }
  void pivot(std::size_t r, std::size_t s);
  LpStatus primal_phase(std::size_t limit);
  LpStatus dual_phase(std::size_t limit);
  LpStatus run(std::size_t limit);
  void shift_rhs(const std::vector<double>& delta);

  std::size_t n_;
  // Row i reads x[basis_[i]] = rhs_[i] - sum_j tab(i, j) x[nonbasic_[j]];
  // z = z0_ + sum_j cost_[j] x[nonbasic_[j]]. Variables >= n_ are slacks.
  std::vector<double> tab_;
  std::vector<double> rhs_;
  std::vector<double> cost_;
  double z0_ = 0.0;
  std::vector<std::size_t> basis_;
  std::vector<std::size_t> nonbasic_;
  // position of each variable: row index if basic, else ~column index.
  std::vector<std::size_t> where_;
  std::vector<char> is_basic_;
  std::size_t pivots_ = 0;
  std::vector<std::size_t> scratch_;
};

}  // namespace sepsell
