#pragma once

// Finite-support joint valuation for two goods.

#include <optional>
#include <vector>

#include "sepsell/distributions.hpp"

namespace sepsell {

struct Point2 {
  double x1;
  double x2;
};

class FiniteJoint {
 public:
  /// Duplicate points are merged; zero-probability points dropped.
  FiniteJoint(std::vector<Point2> points, std::vector<double> probs);

  /// Independent product of two purely atomic marginals.
  static FiniteJoint product(const Dist1D& d1, const Dist1D& d2);

  const std::vector<Point2>& points() const { return points_; }
  const std::vector<double>& probs() const { return probs_; }
  std::size_t size() const { return points_.size(); }

  /// True only for instances built by product().
  bool is_independent() const { return independent_; }

  /// Marginal of good i (1 or 2); projection when not a product.
  Dist1D marginal(int i) const;

  FiniteJoint scaled(double c) const;

 private:
  std::vector<Point2> points_;
  std::vector<double> probs_;
  bool independent_ = false;
  std::optional<Dist1D> m1_;
  std::optional<Dist1D> m2_;
};

}  // namespace sepsell
