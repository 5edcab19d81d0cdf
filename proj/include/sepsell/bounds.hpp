#pragma once

// K-term machinery for a pair of independent goods with densities.
//
//   K1(t) = f2(t) (H1(t) - r1) - G1(t) G2(t)     (K2 symmetric)
//   L1(t) = G2(t) (H1(t) - r1),  L1' = -K1,  int_u^inf K1 = L1(u)
//
// When good j carries atoms (a capped tail, say), f_j is a measure and K_i
// gains point masses m_j(t) (H_i(t) - r_i). Every integral below includes
// them, over half-open intervals [a, b).

#include <optional>
#include <string>
#include <vector>

#include "sepsell/distributions.hpp"
#include "sepsell/mechanisms.hpp"

namespace sepsell {

class GoodPair {
 public:
  /// Both goods need a density and bounded support (cap unbounded ones).
  GoodPair(Dist1D d1, Dist1D d2);

  const Dist1D& dist(int i) const { return i == 1 ? d1_ : d2_; }
  double r(int i) const { return i == 1 ? r1_ : r2_; }
  double tau(int i) const { return i == 1 ? tau1_ : tau2_; }
  /// Largest support point of either good; every K vanishes beyond it.
  double upper() const { return upper_; }
  /// Union of both goods' breakpoints.
  const std::vector<double>& breakpoints() const { return breaks_; }

 private:
  Dist1D d1_;
  Dist1D d2_;
  double r1_, r2_, tau1_, tau2_, upper_;
  std::vector<double> breaks_;
};

/// Density part of K_i at t.
double k_fun(const GoodPair& p, int i, double t);
/// Point mass of the K_i measure at t.
double k_atom(const GoodPair& p, int i, double t);
double l_fun(const GoodPair& p, int i, double t);
/// f_j(t) (H_i(t) - r_i); nonpositive before tau_i, nonnegative after.
double m_fun(const GoodPair& p, int i, double t);
/// K_i / (f_j G_i); NaN where the denominator vanishes.
double kappa(const GoodPair& p, int i, double t);

/// Closed form of int_u^inf K_i.
double tail_integral_K(const GoodPair& p, int i, double u);
/// Quadrature of K_i over [a, b) plus its point masses there; b may be inf.
double integrate_K(const GoodPair& p, int i, double a, double b, double tol = 1e-8);
double integrate_max_K(const GoodPair& p, double a, double b, double tol = 1e-8);

/// lambda1 int_[a,c) max(K1,K2) + lambda1 int_[c,inf) (K1+K2)
///   + (lambda2 - lambda1) int_[b,inf) K2,   0 <= a <= b <= c <= inf.
double i_abc(const GoodPair& p, double lambda1, double lambda2, double a, double b, double c);

struct SupResult {
  double value;
  double a;
  double b;
  double c;
};

/// Exact maximization over a uniform grid of cut points (plus c = inf),
/// followed by coordinatewise refinement. A lower bound on the supremum.
SupResult sup_i(const GoodPair& p, double lambda1, double lambda2, int grid_n = 400);

double k_term_bound(double lambda1, double lambda2, double r1, double r2);

struct GeneralBound {
  double bound;   // (1 + 1/sqrt(e)) (R1 + R2)
  double chain;   // min over lambda in (0, 1] of R1 + R2 + R1/(lambda e) + lambda R2
  double lambda;  // minimizer, clipped to (0, 1]
};

GeneralBound theorem_general_bound(double R1, double R2);
double theorem_regular_bound(double r1, double r2);

struct NonsymmetricBounds {
  double appendix_b;  // (sqrt(R1) + sqrt(R2))^2
  double footnote;
  double best;
};

NonsymmetricBounds nonsymmetric_bounds(double R1, double R2);

struct SingleCrossingReport {
  bool holds = true;
  // Witness when it fails: K_i(u) > 0 and K_i(v) < 0 with u < v.
  double u = 0.0;
  double v = 0.0;
  double k_u = 0.0;
  double k_v = 0.0;
  double kappa_u = 0.0;
  double kappa_v = 0.0;
};

SingleCrossingReport single_crossing_check(const GoodPair& p, int i, int grid_n = 10001);

enum class BoundKind { General, Regular, Nonsymmetric, Footnote };

std::string to_string(BoundKind k);

struct BoundCertificate {
  double lambda1;
  double lambda2;
  double R1;
  double R2;
  double k_term;        // sup_i on the pair rescaled by 1/lambda
  double k_term_bound;  // its closed-form bound
  double instance_bound;  // R1 + R2 + k_term
  double total_bound;   // formula selected by `which`
  BoundKind which;
  SupResult argmax;
};

BoundCertificate certificate(const GoodPair& p, double lambda1, double lambda2, BoundKind which,
                             int grid_n = 400);

struct DecompositionResult {
  double lhs;
  double rhs;
  double slack;
  double k_integral;
};

/// lhs: revenue of `mech` on a `cells` x `cells` product discretization.
/// rhs: lambda1 r1 + lambda2 r2 + int (phi1 K1 + phi2 K2) along the diagonal.
DecompositionResult decomposition_check(const GoodPair& p, const MenuMechanism& mech, double lambda1,
                                        double lambda2, int cells = 400);

}  // namespace sepsell
