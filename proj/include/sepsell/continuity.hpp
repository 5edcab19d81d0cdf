#pragma once

// Prohorov distance between finite measures (l1 ground metric) and the
// revenue-continuity experiments built on it.

#include <optional>
#include <vector>

#include "sepsell/joint.hpp"

namespace sepsell {

class DiscreteMeasureKD {
 public:
  DiscreteMeasureKD(std::size_t dim, std::vector<std::vector<double>> points, std::vector<double> probs);
  static DiscreteMeasureKD from_joint(const FiniteJoint& j);

  std::size_t dim() const { return dim_; }
  const std::vector<std::vector<double>>& points() const { return points_; }
  const std::vector<double>& probs() const { return probs_; }
  std::size_t size() const { return points_.size(); }

 private:
  std::size_t dim_;
  std::vector<std::vector<double>> points_;
  std::vector<double> probs_;
};

double l1_distance(const std::vector<double>& a, const std::vector<double>& b);

/// A set A of atoms of one measure with P(A) > Q(B_rho(A)) + rho.
struct ViolatingSet {
  double rho;
  bool from_first;  // A is a subset of the first measure's support
  std::vector<std::size_t> atoms;
  double mass;           // P(A)
  double neighborhood;   // Q(B_rho(A)), open l1 ball
};

struct ProhorovResult {
  double distance;
  // Mass that can be moved along pairs closer than distance + 1e-9.
  double transport_above;
  /// Present when distance >= 1e-4: a set witnessing failure at distance - 1e-4.
  std::optional<ViolatingSet> witness;
};

/// Exact up to the 1e-9 rounding of probabilities used by the flow solver.
ProhorovResult prohorov(const DiscreteMeasureKD& mu, const DiscreteMeasureKD& nu);

/// Largest transportable mass using only pairs with l1 distance < rho.
double transportable_mass(const DiscreteMeasureKD& mu, const DiscreteMeasureKD& nu, double rho);

/// (2M + 1) sqrt(dist).
double revenue_continuity_bound(double M, double dist);

struct ContinuityResult {
  double rev_x;
  double rev_y;
  double gap;
  double dist;
  double bound;
  bool ok;
};

/// Both supports must satisfy ||x||_1 <= M.
ContinuityResult continuity_experiment(const FiniteJoint& x, const FiniteJoint& y, double M);

enum class TraceMode { Truncate, Smooth };

struct ConvergenceTrace {
  TraceMode mode;
  std::vector<double> params;  // M levels or eps values, in the order given
  std::vector<double> revenues;
  double target;               // revenue of the untouched instance
  std::vector<double> errors;  // |revenue - target|
  bool monotone;               // truncation: nondecreasing; smoothing: errors nonincreasing
  std::optional<double> slope; // least-squares slope of log error vs log eps
};

/// X with every point of l1 norm above M moved to the origin.
FiniteJoint truncate_joint(const FiniteJoint& x, double M);
/// X + eps U with U uniform on the unit square, as a g x g sub-grid per atom.
FiniteJoint smooth_joint(const FiniteJoint& x, double eps, int sub_grid);

ConvergenceTrace convergence_trace(const FiniteJoint& x, TraceMode mode, const std::vector<double>& params,
                                   int sub_grid = 4);

}  // namespace sepsell
