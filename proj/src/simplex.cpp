#include "sepsell/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdint>

namespace sepsell {

namespace {

// Consecutive degenerate pivots tolerated under Dantzig pricing before
// switching to Bland's rule.
constexpr std::size_t kDegenerateStreak = 50;
constexpr double kHarris = 1e-9;
constexpr double kPerturb = 1e-7;

}  // namespace

SimplexLp::SimplexLp(std::vector<double> objective) : n_(objective.size()), cost_(std::move(objective)) {
  nonbasic_.resize(n_);
  where_.resize(n_);
  is_basic_.assign(n_, 0);
  for (std::size_t j = 0; j < n_; ++j) {
    nonbasic_[j] = j;
    where_[j] = j;
  }
}

std::size_t SimplexLp::add_row(const std::vector<std::pair<std::size_t, double>>& terms, double rhs) {
  const std::size_t row = basis_.size();
  tab_.resize(tab_.size() + n_, 0.0);
  double* a = &tab_[row * n_];
  for (const auto& [var, coef] : terms) {
    if (coef == 0.0) continue;
    if (!is_basic_[var]) {
      a[where_[var]] += coef;
    } else {
      const std::size_t i = where_[var];
      const double* ai = &tab_[i * n_];
      for (std::size_t j = 0; j < n_; ++j) a[j] -= coef * ai[j];
      rhs -= coef * rhs_[i];
    }
  }
  const std::size_t slack = n_ + row;
  basis_.push_back(slack);
  rhs_.push_back(rhs);
  where_.push_back(row);
  is_basic_.push_back(1);
  return row;
}

void SimplexLp::pivot(std::size_t r, std::size_t s) {
  ++pivots_;
  double* ar = &tab_[r * n_];
  const double inv = 1.0 / ar[s];
  for (std::size_t j = 0; j < n_; ++j) ar[j] *= inv;
  ar[s] = inv;
  rhs_[r] *= inv;

  scratch_.clear();
  for (std::size_t j = 0; j < n_; ++j) {
    if (ar[j] != 0.0) scratch_.push_back(j);
  }
  const std::size_t m = basis_.size();
  for (std::size_t i = 0; i < m; ++i) {
    if (i == r) continue;
    double* ai = &tab_[i * n_];
    const double f = ai[s];
    if (f == 0.0) continue;
    ai[s] = 0.0;
    for (std::size_t j : scratch_) {
      double v = ai[j] - f * ar[j];
      if (std::abs(v) < 1e-15) v = 0.0;
      ai[j] = v;
    }
    rhs_[i] -= f * rhs_[r];
  }
  const double f = cost_[s];
  if (f != 0.0) {
    cost_[s] = 0.0;
    for (std::size_t j : scratch_) cost_[j] -= f * ar[j];
    z0_ += f * rhs_[r];
  }

  const std::size_t entering = nonbasic_[s];
  const std::size_t leaving = basis_[r];
  basis_[r] = entering;
  nonbasic_[s] = leaving;
  where_[entering] = r;
  is_basic_[entering] = 1;
  where_[leaving] = s;
  is_basic_[leaving] = 0;
}

LpStatus SimplexLp::primal_phase(std::size_t limit) {
  std::size_t streak = 0;
  const std::size_t m = basis_.size();
  while (pivots_ < limit) {
    const bool bland = streak > kDegenerateStreak;
    std::size_t s = n_;
    for (std::size_t j = 0; j < n_; ++j) {
      if (cost_[j] <= tol) continue;
      if (s == n_) {
        s = j;
      } else if (bland ? nonbasic_[j] < nonbasic_[s] : cost_[j] > cost_[s]) {
        s = j;
      }
    }
    if (s == n_) return LpStatus::Optimal;

    // Harris two-pass ratio test: bound the step with relaxed feasibility,
    // then take the largest pivot element within that bound.
    double bound = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      const double a = tab_[i * n_ + s];
      if (a > tol) bound = std::min(bound, (std::max(rhs_[i], 0.0) + kHarris) / a);
    }
    if (std::isinf(bound)) return LpStatus::Unbounded;
    std::size_t r = m;
    for (std::size_t i = 0; i < m; ++i) {
      const double a = tab_[i * n_ + s];
      if (a <= tol || std::max(rhs_[i], 0.0) / a > bound) continue;
      if (r == m) {
        r = i;
      } else if (bland ? basis_[i] < basis_[r] : a > tab_[r * n_ + s]) {
        r = i;
      }
    }
    const double step = std::max(rhs_[r], 0.0) / tab_[r * n_ + s];
    streak = step * cost_[s] <= 1e-14 ? streak + 1 : 0;
    pivot(r, s);
  }
  return LpStatus::IterationLimit;
}

LpStatus SimplexLp::dual_phase(std::size_t limit) {
  const std::size_t m = basis_.size();
  while (pivots_ < limit) {
    std::size_t r = m;
    double worst = -tol;
    for (std::size_t i = 0; i < m; ++i) {
      if (rhs_[i] < worst) {
        worst = rhs_[i];
        r = i;
      }
    }
    if (r == m) return LpStatus::Optimal;
    const double* ar = &tab_[r * n_];
    double bound = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n_; ++j) {
      if (ar[j] < -tol) bound = std::min(bound, (std::min(cost_[j], 0.0) - kHarris) / ar[j]);
    }
    if (std::isinf(bound)) return LpStatus::Infeasible;
    std::size_t s = n_;
    for (std::size_t j = 0; j < n_; ++j) {
      if (ar[j] >= -tol || std::min(cost_[j], 0.0) / ar[j] > bound) continue;
      if (s == n_ || ar[j] < ar[s]) s = j;
    }
    pivot(r, s);
  }
  return LpStatus::IterationLimit;
}

void SimplexLp::shift_rhs(const std::vector<double>& delta) {
  // Raising h_k by d moves the basic solution by d times the column of
  // slack k (or just its own row when the slack is basic).
  const std::size_t m = basis_.size();
  for (std::size_t k = 0; k < m; ++k) {
    const double d = delta[k];
    const std::size_t var = n_ + k;
    if (is_basic_[var]) {
      rhs_[where_[var]] += d;
    } else {
      const std::size_t j = where_[var];
      for (std::size_t i = 0; i < m; ++i) rhs_[i] += tab_[i * n_ + j] * d;
    }
  }
}

LpStatus SimplexLp::run(std::size_t limit) {
  for (int round = 0; round < 20; ++round) {
    LpStatus st = dual_phase(limit);
    if (st != LpStatus::Optimal) return st;
    st = primal_phase(limit);
    if (st != LpStatus::Optimal) return st;
    bool feasible = true;
    for (double v : rhs_) {
      if (v < -tol) feasible = false;
    }
    if (feasible) return LpStatus::Optimal;
  }
  return LpStatus::IterationLimit;
}

LpStatus SimplexLp::solve(std::size_t max_pivots) {
  const std::size_t limit =
      pivots_ + (max_pivots != 0 ? max_pivots : 50 * (basis_.size() + n_) + 10000);
  // The revenue LPs are massively degenerate (almost every right-hand side
  // is 0), so solve a randomly perturbed copy first, then remove the
  // perturbation and repair the few rows that turn infeasible.
  std::vector<double> eps(basis_.size());
  std::uint64_t state = 0x9e3779b97f4a7c15ULL + basis_.size();
  for (auto& e : eps) {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    e = kPerturb * (1.0 + static_cast<double>(state >> 11) * 0x1.0p-53);
  }
  shift_rhs(eps);
  const LpStatus st = run(limit);
  for (auto& e : eps) e = -e;
  shift_rhs(eps);
  if (st != LpStatus::Optimal) return st;
  return run(limit);
}

std::vector<double> SimplexLp::primal() const {
  std::vector<double> x(n_, 0.0);
  for (std::size_t i = 0; i < basis_.size(); ++i) {
    if (basis_[i] < n_) x[basis_[i]] = std::max(rhs_[i], 0.0);
  }
  return x;
}

}  // namespace sepsell
