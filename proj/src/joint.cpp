#include "sepsell/joint.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "accurate_sum.hpp"
#include "sepsell/error.hpp"

namespace sepsell {

FiniteJoint::FiniteJoint(std::vector<Point2> points, std::vector<double> probs) {
  if (points.size() != probs.size())
    throw Error(ErrorKind::BadParams, "points and probabilities differ in length");
  std::map<std::pair<double, double>, double> merged;
  detail::AccurateSum total;
  for (std::size_t k = 0; k < points.size(); ++k) {
    const auto& x = points[k];
    if (!std::isfinite(x.x1) || !std::isfinite(x.x2) || x.x1 < 0.0 || x.x2 < 0.0)
      throw Error(ErrorKind::BadParams, "valuations must be finite and nonnegative");
    if (!std::isfinite(probs[k]) || probs[k] < 0.0)
      throw Error(ErrorKind::BadParams, "probabilities must be nonnegative");
    total.add(probs[k]);
    if (probs[k] > 0.0) merged[{x.x1, x.x2}] += probs[k];
  }
  if (merged.empty() || std::abs(total.value() - 1.0) > 1e-12)
    throw Error(ErrorKind::BadParams, "probabilities must sum to 1");
  for (const auto& [x, p] : merged) {
    points_.push_back({x.first, x.second});
    probs_.push_back(p);
  }
}

FiniteJoint FiniteJoint::product(const Dist1D& d1, const Dist1D& d2) {
  if (d1.has_density() || d2.has_density())
    throw Error(ErrorKind::UnsupportedRepresentation, "product needs atomic marginals; discretize first");
  std::vector<Point2> pts;
  std::vector<double> pr;
  for (const auto& a : d1.atom_part()) {
    for (const auto& b : d2.atom_part()) {
      pts.push_back({a.value, b.value});
      pr.push_back(a.mass * b.mass);
    }
  }
  // Pairwise products of masses summing to 1 can drift past 1e-12.
  detail::AccurateSum total;
  for (double p : pr) total.add(p);
  for (double& p : pr) p /= total.value();
  FiniteJoint j(std::move(pts), std::move(pr));
  j.independent_ = true;
  j.m1_ = d1;
  j.m2_ = d2;
  return j;
}

Dist1D FiniteJoint::marginal(int i) const {
  if (i != 1 && i != 2) throw Error(ErrorKind::BadParams, "good index must be 1 or 2");
  if (i == 1 && m1_) return *m1_;
  if (i == 2 && m2_) return *m2_;
  std::vector<Atom> atoms;
  for (std::size_t k = 0; k < size(); ++k)
    atoms.push_back({i == 1 ? points_[k].x1 : points_[k].x2, probs_[k]});
  return Dist1D::atoms(std::move(atoms));
}

FiniteJoint FiniteJoint::scaled(double c) const {
  if (!(c > 0.0)) throw Error(ErrorKind::BadParams, "scale must be positive");
  std::vector<Point2> pts = points_;
  for (auto& x : pts) {
    x.x1 *= c;
    x.x2 *= c;
  }
  FiniteJoint j(std::move(pts), probs_);
  j.independent_ = independent_;
  if (m1_) j.m1_ = scale(*m1_, c);
  if (m2_) j.m2_ = scale(*m2_, c);
  return j;
}

}  // namespace sepsell
