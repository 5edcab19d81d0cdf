#pragma once

// Menu mechanisms for two goods. The buyer picks a payoff-maximizing entry;
// ties go to the highest payment, then the lowest index.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sepsell/joint.hpp"

namespace sepsell {

struct MenuEntry {
  double q1;
  double q2;
  double s;
};

class MenuMechanism {
 public:
  /// Appends the null entry (0, 0, 0) when it is missing.
  explicit MenuMechanism(std::vector<MenuEntry> entries);

  const std::vector<MenuEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  const MenuEntry& operator[](std::size_t k) const { return entries_[k]; }

 private:
  std::vector<MenuEntry> entries_;
};

std::size_t best_response(const MenuMechanism& m, Point2 x);

struct GridAssignment {
  std::vector<Point2> points;
  std::vector<double> q1;
  std::vector<double> q2;
  std::vector<double> s;
  std::vector<double> b;  // q.x - s
};

GridAssignment assign(const MenuMechanism& m, std::span<const Point2> points);

struct IcReport {
  bool ok = true;
  double worst = 0.0;
  std::size_t from = 0;  // x
  std::size_t to = 0;    // x-tilde, for IC witnesses
  std::string kind;      // "IC", "IR", "NPT" or empty
};

/// Checks b(y) - b(x) >= q(x).(y - x) for all ordered pairs, b >= 0, s >= 0.
IcReport verify_ic_ir_npt(const GridAssignment& g, double tol = 1e-9);

double revenue(const MenuMechanism& m, const FiniteJoint& j);

/// Entries (q1/l1, q2/l2, s): revenue of m on (X1/l1, X2/l2) equals revenue of
/// rescale(m) on X.
MenuMechanism rescale(const MenuMechanism& m, double lambda1, double lambda2);
/// Entries (l1 q1, l2 q2, s).
MenuMechanism rescale_inverse(const MenuMechanism& m, double lambda1, double lambda2);

MenuMechanism discount(const MenuMechanism& m, double alpha);

MenuMechanism separate_posted(double p1, double p2);
MenuMechanism bundle_posted(double p);

struct DiagonalProfile {
  std::vector<double> t;
  std::vector<double> phi1;
  std::vector<double> phi2;
  std::vector<double> Phi;
};

DiagonalProfile diagonal_profile(const MenuMechanism& m, std::span<const double> t_grid);

/// On [lo, hi) the buyer at (t, t) selects `entry`.
struct DiagonalPiece {
  double lo;
  double hi;
  std::size_t entry;
};

/// Exact best-response pieces along the diagonal over [0, t_max).
std::vector<DiagonalPiece> diagonal_pieces(const MenuMechanism& m, double t_max);

}  // namespace sepsell
