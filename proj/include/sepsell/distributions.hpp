#pragma once

// One-dimensional valuation distributions.
//
// Every distribution is stored twice: the user-facing representation (what was
// constructed, used for serialization and error semantics) and a canonical
// mixture of point masses plus analytic density segments. All numerical
// operations run on the canonical form, so truncation, capping, scaling and
// smoothing compose without special cases.
//
// Conventions:
//   cdf(t)  = P[X <= t]   (right-continuous)
//   tail(t) = P[X >= t]   (atoms at t count)
//   H(t)    = int_0^t tail(u) du = E[min{X, t}]

#include <limits>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace sepsell {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Atom {
  double value;
  double mass;
};

enum class SegmentShape {
  Constant,       // scale
  Exponential,    // scale * exp(-rate * (t - lo))
  InverseSquare,  // scale / t^2
};

/// Density piece on [lo, hi).
struct Segment {
  double lo;
  double hi;
  SegmentShape shape;
  double scale;
  double rate = 0.0;

  double density(double t) const;
  /// Mass on [a, b], lo <= a <= b <= hi.
  double mass(double a, double b) const;
  /// First moment on [a, b].
  double moment(double a, double b) const;
};

struct FiniteAtoms {
  std::vector<Atom> atoms;
};

struct PiecewiseUniform {
  std::vector<double> breakpoints;
  std::vector<double> densities;
};

struct UniformParams {
  double a;
  double b;
};

/// Exponential(rate) capped at `cap`: min(X, cap), so the tail mass beyond the
/// cap sits as an atom on it. cap = +inf gives the plain exponential.
struct ExponentialParams {
  double rate;
  double cap = kInf;
};

/// Equal-revenue valuation with tail min{r/t, 1}, capped: density r/t^2 on
/// [r, cap) and an atom of mass r/cap at cap.
struct EqualRevenueParams {
  double r;
  double cap;
};

/// General mixture; the result of truncation and capping.
struct MixedParams {
  std::vector<Atom> atoms;
  std::vector<Segment> segments;
};

using Representation = std::variant<FiniteAtoms, PiecewiseUniform, UniformParams,
                                    ExponentialParams, EqualRevenueParams, MixedParams>;

class Dist1D {
 public:
  static Dist1D atoms(std::vector<Atom> atoms);
  static Dist1D piecewise(std::vector<double> breakpoints, std::vector<double> densities);
  static Dist1D uniform(double a, double b);
  static Dist1D exponential(double rate, double cap = kInf);
  static Dist1D equal_revenue(double r, double cap);
  static Dist1D mixed(std::vector<Atom> atoms, std::vector<Segment> segments);

  const Representation& representation() const { return rep_; }
  std::string_view kind() const;

  /// False only when the distribution is purely atomic.
  bool has_density() const { return !segments_.empty(); }

  std::span<const Atom> atom_part() const { return atoms_; }
  std::span<const Segment> segments() const { return segments_; }

  double support_lower() const;
  double support_upper() const;

  /// Sorted, deduplicated: every segment end and every atom location.
  std::vector<double> breakpoints() const;

 private:
  Dist1D(Representation rep, std::vector<Atom> atoms, std::vector<Segment> segments);

  Representation rep_;
  std::vector<Atom> atoms_;
  std::vector<Segment> segments_;
};

struct MyersonSolution {
  double price;
  double revenue;
};

double cdf(const Dist1D& d, double t);
double tail(const Dist1D& d, double t);
/// Density of the absolutely continuous part (right-continuous at breakpoints).
double density(const Dist1D& d, double t);
double atom_mass(const Dist1D& d, double t);
double cumtail(const Dist1D& d, double t);
double mean(const Dist1D& d);

/// p * P[X >= p].
double posted_revenue(const Dist1D& d, double price);

/// Revenue-maximizing posted price. Ties go to the smallest optimizer.
MyersonSolution myerson_optimal(const Dist1D& d);

/// t - G(t)/f(t).
double virtual_value(const Dist1D& d, double t);

/// Grid test of a nondecreasing virtual value on the continuous support.
/// Semi-decision: a dip narrower than the grid spacing can be missed, although
/// every segment boundary (both one-sided limits) is always evaluated.
bool is_weakly_regular(const Dist1D& d, int grid_n = 10001);

/// Smallest t with H(t) = r (to 1e-10).
double tau(const Dist1D& d, double r);

Dist1D equal_revenue(double r, double cap);

/// Distribution of X * 1{X <= M}.
Dist1D truncate(const Dist1D& d, double M);

/// Distribution of X + eps * U with U ~ Uniform[0,1]; atomic input only.
Dist1D smooth(const Dist1D& d, double eps);

/// Distribution of factor * X.
Dist1D scale(const Dist1D& d, double factor);

/// Distribution of min{X, c}.
Dist1D cap(const Dist1D& d, double c);

/// Equal-width cells over the support, each cell's continuous mass placed at
/// its conditional mean; atoms are kept in place.
Dist1D discretize(const Dist1D& d, int cells);

}  // namespace sepsell
