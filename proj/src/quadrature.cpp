#include "sepsell/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "sepsell/error.hpp"

namespace sepsell {

namespace {

struct Panel {
  const std::function<double(double)>& f;

  static double simpson(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  }

  double refine(double a, double fa, double m, double fm, double b, double fb, double whole,
                double tol, int depth) const {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(a, m, fa, flm, fm);
    const double right = simpson(m, b, fm, frm, fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol || b - a < 1e-13 * std::max(1.0, std::abs(b)))
      return left + right + delta / 15.0;
    return refine(a, fa, lm, flm, m, fm, left, 0.5 * tol, depth - 1) +
           refine(m, fm, rm, frm, b, fb, right, 0.5 * tol, depth - 1);
  }
};

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double tol,
                 std::span<const double> breaks) {
  if (!std::isfinite(a) || !std::isfinite(b))
    throw Error(ErrorKind::BadParams, "quadrature needs a finite interval");
  if (b <= a) return 0.0;
  std::vector<double> cuts{a};
  for (double t : breaks) {
    if (t > a && t < b) cuts.push_back(t);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  cuts.push_back(b);

  const Panel p{f};
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double lo = cuts[k];
    const double hi = cuts[k + 1];
    const double share = tol * (hi - lo) / (b - a);
    // Evaluate just inside the panel so one-sided limits are used at the
    // boundaries, where integrands may jump.
    const double w = hi - lo;
    const double in_lo = lo + 1e-12 * w;
    const double in_hi = hi - 1e-12 * w;
    const double m = 0.5 * (lo + hi);
    const double flo = f(in_lo), fm = f(m), fhi = f(in_hi);
    const double whole = Panel::simpson(lo, hi, flo, fm, fhi);
    total += p.refine(lo, flo, m, fm, hi, fhi, whole, share, 40);
  }
  return total;
}

}  // namespace sepsell
