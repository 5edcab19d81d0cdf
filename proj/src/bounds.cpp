#include "sepsell/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sepsell/error.hpp"
#include "sepsell/joint.hpp"
#include "sepsell/quadrature.hpp"

namespace sepsell {

namespace {

const double kE = std::exp(1.0);

void check_good(int i) {
  if (i != 1 && i != 2) throw Error(ErrorKind::BadParams, "good index must be 1 or 2");
}

void check_lambdas(double l1, double l2) {
  if (!(l1 > 0.0 && l1 <= 1.0) || !(l2 > 0.0 && l2 <= 1.0))
    throw Error(ErrorKind::BadParams, "lambda must lie in (0, 1]");
  if (l1 > l2) throw Error(ErrorKind::BadOrdering, "need lambda1 <= lambda2");
}

// Atom locations of `d` inside [a, b).
std::vector<Atom> atoms_in(const Dist1D& d, double a, double b) {
  std::vector<Atom> out;
  for (const auto& at : d.atom_part()) {
    if (at.value >= a && at.value < b) out.push_back(at);
  }
  return out;
}

}  // namespace

GoodPair::GoodPair(Dist1D d1, Dist1D d2) : d1_(std::move(d1)), d2_(std::move(d2)) {
  if (!d1_.has_density() || !d2_.has_density())
    throw Error(ErrorKind::NoDensity, "both goods need a density");
  upper_ = std::max(d1_.support_upper(), d2_.support_upper());
  if (std::isinf(upper_)) throw Error(ErrorKind::BadParams, "unbounded support; apply a cap first");
  r1_ = myerson_optimal(d1_).revenue;
  r2_ = myerson_optimal(d2_).revenue;
  tau1_ = sepsell::tau(d1_, r1_);
  tau2_ = sepsell::tau(d2_, r2_);
  breaks_ = d1_.breakpoints();
  const auto b2 = d2_.breakpoints();
  breaks_.insert(breaks_.end(), b2.begin(), b2.end());
  std::sort(breaks_.begin(), breaks_.end());
  breaks_.erase(std::unique(breaks_.begin(), breaks_.end()), breaks_.end());
}

double k_fun(const GoodPair& p, int i, double t) {
  check_good(i);
  const int j = 3 - i;
  return density(p.dist(j), t) * (cumtail(p.dist(i), t) - p.r(i)) -
         tail(p.dist(1), t) * tail(p.dist(2), t);
}

double k_atom(const GoodPair& p, int i, double t) {
  check_good(i);
  const double m = atom_mass(p.dist(3 - i), t);
  return m == 0.0 ? 0.0 : m * (cumtail(p.dist(i), t) - p.r(i));
}

double l_fun(const GoodPair& p, int i, double t) {
  check_good(i);
  return tail(p.dist(3 - i), t) * (cumtail(p.dist(i), t) - p.r(i));
}

double m_fun(const GoodPair& p, int i, double t) {
  check_good(i);
  return density(p.dist(3 - i), t) * (cumtail(p.dist(i), t) - p.r(i));
}

double kappa(const GoodPair& p, int i, double t) {
  const double den = density(p.dist(3 - i), t) * tail(p.dist(i), t);
  if (den == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return k_fun(p, i, t) / den;
}

double tail_integral_K(const GoodPair& p, int i, double u) { return l_fun(p, i, u); }

double integrate_K(const GoodPair& p, int i, double a, double b, double tol) {
  check_good(i);
  if (!(a >= 0.0) || !(b >= a)) throw Error(ErrorKind::BadOrdering, "need 0 <= a <= b");
  const double hi = std::min(b, p.upper());
  double total = a < hi ? integrate([&](double t) { return k_fun(p, i, t); }, a, hi, tol, p.breakpoints()) : 0.0;
  for (const auto& at : atoms_in(p.dist(3 - i), a, b)) total += k_atom(p, i, at.value);
  return total;
}

double integrate_max_K(const GoodPair& p, double a, double b, double tol) {
  if (!(a >= 0.0) || !(b >= a)) throw Error(ErrorKind::BadOrdering, "need 0 <= a <= b");
  const double hi = std::min(b, p.upper());
  double total = a < hi ? integrate([&](double t) { return std::max(k_fun(p, 1, t), k_fun(p, 2, t)); }, a,
                                     hi, tol, p.breakpoints())
                         : 0.0;
  std::vector<double> spots;
  for (int g = 1; g <= 2; ++g)
    for (const auto& at : atoms_in(p.dist(g), a, b)) spots.push_back(at.value);
  std::sort(spots.begin(), spots.end());
  spots.erase(std::unique(spots.begin(), spots.end()), spots.end());
  for (double t : spots) total += std::max(k_atom(p, 1, t), k_atom(p, 2, t));
  return total;
}

double i_abc(const GoodPair& p, double lambda1, double lambda2, double a, double b, double c) {
  check_lambdas(lambda1, lambda2);
  if (!(a >= 0.0 && a <= b && b <= c)) throw Error(ErrorKind::BadOrdering, "need 0 <= a <= b <= c");
  double v = lambda1 * integrate_max_K(p, a, c);
  if (!std::isinf(c)) v += lambda1 * (integrate_K(p, 1, c, kInf) + integrate_K(p, 2, c, kInf));
  if (lambda2 > lambda1) v += (lambda2 - lambda1) * integrate_K(p, 2, b, kInf);
  return v;
}

SupResult sup_i(const GoodPair& p, double lambda1, double lambda2, int grid_n) {
  check_lambdas(lambda1, lambda2);
  if (grid_n < 1) throw Error(ErrorKind::BadParams, "grid_n must be positive");
  const double up = p.upper();
  // Cut positions 0..grid_n are grid points, grid_n + 1 stands for infinity.
  const int cuts = grid_n + 2;
  std::vector<double> pos(cuts);
  for (int k = 0; k <= grid_n; ++k) pos[k] = up * k / grid_n;
  pos[grid_n + 1] = kInf;
  std::vector<double> smax(cuts, 0.0), s12(cuts, 0.0), s2(cuts, 0.0);
  const double cell_tol = 1e-10;
  for (int k = 0; k + 1 < cuts; ++k) {
    const double lo = pos[k], hi = pos[k + 1];
    smax[k + 1] = smax[k] + integrate_max_K(p, lo, hi, cell_tol);
    const double k2 = integrate_K(p, 2, lo, hi, cell_tol);
    s12[k + 1] = s12[k] + integrate_K(p, 1, lo, hi, cell_tol) + k2;
    s2[k + 1] = s2[k] + k2;
  }
  const double t12 = s12.back(), t2 = s2.back();

  // I = lambda1 (smax[c] - smax[a]) + lambda1 (t12 - s12[c]) + (l2 - l1) (t2 - s2[b]).
  double best = -kInf;
  int ba = 0, bb = 0, bc = 0;
  double best_a = -kInf, best_ab = -kInf;
  int arg_a = 0, arg_ab_a = 0, arg_ab_b = 0;
  for (int k = 0; k < cuts; ++k) {
    const double va = -lambda1 * smax[k];
    if (va > best_a) {
      best_a = va;
      arg_a = k;
    }
    const double vab = best_a - (lambda2 - lambda1) * (s2[k] - t2);
    if (vab > best_ab) {
      best_ab = vab;
      arg_ab_a = arg_a;
      arg_ab_b = k;
    }
    const double v = best_ab + lambda1 * smax[k] + lambda1 * (t12 - s12[k]);
    if (v > best) {
      best = v;
      ba = arg_ab_a;
      bb = arg_ab_b;
      bc = k;
    }
  }

  SupResult res{i_abc(p, lambda1, lambda2, pos[ba], pos[bb], pos[bc]), pos[ba], pos[bb], pos[bc]};
  // Coordinate moves push the other cuts along to keep a <= b <= c.
  const double min_step = 1e-7 * up;
  for (int round = 0; round < 3; ++round) {
    for (int coord = 0; coord < 3; ++coord) {
      double h = up / grid_n;
      while (h > min_step) {
        bool moved = false;
        for (double dir : {-1.0, 1.0}) {
          double x[3] = {res.a, res.b, res.c};
          if (std::isinf(x[coord])) break;
          x[coord] = std::clamp(x[coord] + dir * h, 0.0, up);
          for (int k = coord + 1; k < 3; ++k) x[k] = std::max(x[k], x[k - 1]);
          for (int k = coord - 1; k >= 0; --k) x[k] = std::min(x[k], x[k + 1]);
          const double v = i_abc(p, lambda1, lambda2, x[0], x[1], x[2]);
          if (v > res.value) {
            res = {v, x[0], x[1], x[2]};
            moved = true;
            break;
          }
        }
        if (!moved) h *= 0.5;
      }
    }
  }
  return res;
}

double k_term_bound(double lambda1, double lambda2, double r1, double r2) {
  check_lambdas(lambda1, lambda2);
  if (!(r1 > 0.0) || !(r2 > 0.0)) throw Error(ErrorKind::BadParams, "revenues must be positive");
  return (lambda2 * r1 + lambda1 * r2 + lambda1 * (kE - 1.0) * std::min(r1, r2)) / kE;
}

GeneralBound theorem_general_bound(double R1, double R2) {
  if (!(R1 >= 0.0) || !(R2 >= 0.0)) throw Error(ErrorKind::BadParams, "revenues must be nonnegative");
  const double factor = 1.0 + 1.0 / std::sqrt(kE);
  GeneralBound g{factor * (R1 + R2), factor * (R1 + R2), 1.0 / std::sqrt(kE)};
  if (R1 <= 0.0 || R2 <= 0.0) return g;
  // Either good may play the role of good 1 in the chain.
  auto chain = [](double a, double b, double& lambda) {
    lambda = std::min(1.0, std::sqrt(a / (kE * b)));
    return a + b + a / (lambda * kE) + lambda * b;
  };
  double l12 = 0.0, l21 = 0.0;
  const double c12 = chain(R1, R2, l12);
  const double c21 = chain(R2, R1, l21);
  g.chain = std::min(c12, c21);
  g.lambda = c12 <= c21 ? l12 : l21;
  return g;
}

double theorem_regular_bound(double r1, double r2) {
  if (!(r1 >= 0.0) || !(r2 >= 0.0)) throw Error(ErrorKind::BadParams, "revenues must be nonnegative");
  return (1.0 + 1.0 / kE) * (r1 + r2);
}

NonsymmetricBounds nonsymmetric_bounds(double R1, double R2) {
  if (!(R1 >= 0.0) || !(R2 >= 0.0)) throw Error(ErrorKind::BadParams, "revenues must be nonnegative");
  const double g = std::sqrt(R1 * R2);
  NonsymmetricBounds nb;
  nb.appendix_b = (std::sqrt(R1) + std::sqrt(R2)) * (std::sqrt(R1) + std::sqrt(R2));
  nb.footnote = R1 + R2 + std::min(2.0 * g / std::sqrt(kE), 2.0 * g / kE + (1.0 - 1.0 / kE) * std::min(R1, R2));
  nb.best = std::min(nb.appendix_b, nb.footnote);
  return nb;
}

SingleCrossingReport single_crossing_check(const GoodPair& p, int i, int grid_n) {
  check_good(i);
  if (grid_n < 2) throw Error(ErrorKind::BadParams, "grid_n must be at least 2");
  SingleCrossingReport rep;
  bool seen_positive = false;
  for (int k = 0; k < grid_n; ++k) {
    const double t = p.upper() * k / grid_n;
    const double v = k_fun(p, i, t);
    if (!seen_positive && v > 1e-9) {
      seen_positive = true;
      rep.u = t;
      rep.k_u = v;
    } else if (seen_positive && v < -1e-9) {
      rep.holds = false;
      rep.v = t;
      rep.k_v = v;
      rep.kappa_u = kappa(p, i, rep.u);
      rep.kappa_v = kappa(p, i, t);
      return rep;
    }
  }
  return rep;
}

std::string to_string(BoundKind k) {
  switch (k) {
    case BoundKind::General: return "general";
    case BoundKind::Regular: return "regular";
    case BoundKind::Nonsymmetric: return "nonsymmetric";
    case BoundKind::Footnote: return "footnote";
  }
  return "unknown";
}

BoundCertificate certificate(const GoodPair& p, double lambda1, double lambda2, BoundKind which,
                             int grid_n) {
  check_lambdas(lambda1, lambda2);
  const double R1 = p.r(1), R2 = p.r(2);
  const bool unit = lambda1 == 1.0 && lambda2 == 1.0;
  const GoodPair scaled = unit ? p
                               : GoodPair(scale(p.dist(1), 1.0 / lambda1),
                                          scale(p.dist(2), 1.0 / lambda2));
  BoundCertificate c{};
  c.lambda1 = lambda1;
  c.lambda2 = lambda2;
  c.R1 = R1;
  c.R2 = R2;
  c.which = which;
  c.argmax = sup_i(scaled, lambda1, lambda2, grid_n);
  c.k_term = c.argmax.value;
  c.k_term_bound = k_term_bound(lambda1, lambda2, scaled.r(1), scaled.r(2));
  c.instance_bound = R1 + R2 + c.k_term;
  switch (which) {
    case BoundKind::General: c.total_bound = theorem_general_bound(R1, R2).bound; break;
    case BoundKind::Regular: c.total_bound = theorem_regular_bound(R1, R2); break;
    case BoundKind::Nonsymmetric: c.total_bound = nonsymmetric_bounds(R1, R2).appendix_b; break;
    case BoundKind::Footnote: c.total_bound = nonsymmetric_bounds(R1, R2).footnote; break;
  }
  return c;
}

DecompositionResult decomposition_check(const GoodPair& p, const MenuMechanism& mech, double lambda1,
                                        double lambda2, int cells) {
  if (!(lambda1 > 0.0 && lambda1 <= 1.0) || !(lambda2 > 0.0 && lambda2 <= 1.0))
    throw Error(ErrorKind::BadParams, "lambda must lie in (0, 1]");
  for (const auto& e : mech.entries()) {
    if (e.q1 > lambda1 + 1e-12 || e.q2 > lambda2 + 1e-12)
      throw Error(ErrorKind::QOutOfRange, "menu allocation exceeds lambda");
  }
  const FiniteJoint grid =
      FiniteJoint::product(discretize(p.dist(1), cells), discretize(p.dist(2), cells));
  DecompositionResult d{};
  d.lhs = revenue(mech, grid);
  for (const auto& piece : diagonal_pieces(mech, kInf)) {
    const auto& e = mech[piece.entry];
    if (e.q1 > 0.0) d.k_integral += e.q1 * integrate_K(p, 1, piece.lo, piece.hi);
    if (e.q2 > 0.0) d.k_integral += e.q2 * integrate_K(p, 2, piece.lo, piece.hi);
  }
  d.rhs = lambda1 * p.r(1) + lambda2 * p.r(2) + d.k_integral;
  d.slack = d.rhs - d.lhs;
  return d;
}

}  // namespace sepsell
