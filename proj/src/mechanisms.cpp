#include "sepsell/mechanisms.hpp"

#include <algorithm>
#include <cmath>

#include "sepsell/error.hpp"

namespace sepsell {

MenuMechanism::MenuMechanism(std::vector<MenuEntry> entries) : entries_(std::move(entries)) {
  bool has_null = false;
  for (auto& e : entries_) {
    for (double* q : {&e.q1, &e.q2}) {
      if (!(*q >= -1e-9 && *q <= 1.0 + 1e-9))
        throw Error(ErrorKind::BadParams, "allocation probabilities must lie in [0, 1]");
      *q = std::clamp(*q, 0.0, 1.0);
    }
    if (!std::isfinite(e.s)) throw Error(ErrorKind::BadParams, "payment must be finite");
    if (e.q1 == 0.0 && e.q2 == 0.0 && e.s == 0.0) has_null = true;
  }
  if (!has_null) entries_.push_back({0.0, 0.0, 0.0});
}

std::size_t best_response(const MenuMechanism& m, Point2 x) {
  double best = -kInf;
  double smax = 0.0;
  for (const auto& e : m.entries()) {
    best = std::max(best, e.q1 * x.x1 + e.q2 * x.x2 - e.s);
    smax = std::max(smax, std::abs(e.s));
  }
  const double tol = 1e-12 * (std::abs(x.x1) + std::abs(x.x2) + smax);
  std::size_t pick = 0;
  bool found = false;
  for (std::size_t k = 0; k < m.size(); ++k) {
    const auto& e = m[k];
    if (e.q1 * x.x1 + e.q2 * x.x2 - e.s < best - tol) continue;
    if (!found || e.s > m[pick].s) {
      pick = k;
      found = true;
    }
  }
  return pick;
}

GridAssignment assign(const MenuMechanism& m, std::span<const Point2> points) {
  GridAssignment g;
  g.points.assign(points.begin(), points.end());
  for (const auto& x : points) {
    const auto& e = m[best_response(m, x)];
    g.q1.push_back(e.q1);
    g.q2.push_back(e.q2);
    g.s.push_back(e.s);
    g.b.push_back(e.q1 * x.x1 + e.q2 * x.x2 - e.s);
  }
  return g;
}

IcReport verify_ic_ir_npt(const GridAssignment& g, double tol) {
  IcReport rep;
  auto record = [&](double v, std::size_t from, std::size_t to, const char* kind) {
    if (v > rep.worst) {
      rep.worst = v;
      rep.from = from;
      rep.to = to;
      rep.kind = kind;
    }
  };
  const std::size_t n = g.points.size();
  for (std::size_t i = 0; i < n; ++i) {
    record(-g.b[i], i, i, "IR");
    record(-g.s[i], i, i, "NPT");
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double gain = g.q1[i] * (g.points[j].x1 - g.points[i].x1) +
                          g.q2[i] * (g.points[j].x2 - g.points[i].x2);
      record(gain - (g.b[j] - g.b[i]), i, j, "IC");
    }
  }
  rep.ok = rep.worst <= tol;
  return rep;
}

double revenue(const MenuMechanism& m, const FiniteJoint& j) {
  double r = 0.0;
  for (std::size_t k = 0; k < j.size(); ++k) r += j.probs()[k] * m[best_response(m, j.points()[k])].s;
  return r;
}

namespace {

void check_lambda(double l1, double l2) {
  if (!(l1 > 0.0 && l1 <= 1.0) || !(l2 > 0.0 && l2 <= 1.0))
    throw Error(ErrorKind::BadParams, "lambda must lie in (0, 1]");
}

}  // namespace

MenuMechanism rescale(const MenuMechanism& m, double lambda1, double lambda2) {
  check_lambda(lambda1, lambda2);
  std::vector<MenuEntry> out;
  for (const auto& e : m.entries()) {
    if (e.q1 > lambda1 + 1e-12 || e.q2 > lambda2 + 1e-12)
      throw Error(ErrorKind::QOutOfRange, "menu allocation exceeds lambda");
    out.push_back({std::min(1.0, e.q1 / lambda1), std::min(1.0, e.q2 / lambda2), e.s});
  }
  return MenuMechanism(std::move(out));
}

MenuMechanism rescale_inverse(const MenuMechanism& m, double lambda1, double lambda2) {
  check_lambda(lambda1, lambda2);
  std::vector<MenuEntry> out;
  for (const auto& e : m.entries()) out.push_back({lambda1 * e.q1, lambda2 * e.q2, e.s});
  return MenuMechanism(std::move(out));
}

MenuMechanism discount(const MenuMechanism& m, double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw Error(ErrorKind::BadParams, "alpha must lie in [0, 1)");
  std::vector<MenuEntry> out = m.entries();
  for (auto& e : out) e.s *= 1.0 - alpha;
  return MenuMechanism(std::move(out));
}

MenuMechanism separate_posted(double p1, double p2) {
  if (!(p1 >= 0.0) || !(p2 >= 0.0)) throw Error(ErrorKind::BadParams, "prices must be nonnegative");
  return MenuMechanism({{0, 0, 0}, {1, 0, p1}, {0, 1, p2}, {1, 1, p1 + p2}});
}

MenuMechanism bundle_posted(double p) {
  if (!(p >= 0.0)) throw Error(ErrorKind::BadParams, "price must be nonnegative");
  return MenuMechanism({{0, 0, 0}, {1, 1, p}});
}

DiagonalProfile diagonal_profile(const MenuMechanism& m, std::span<const double> t_grid) {
  DiagonalProfile prof;
  for (double t : t_grid) {
    const auto& e = m[best_response(m, {t, t})];
    prof.t.push_back(t);
    prof.phi1.push_back(e.q1);
    prof.phi2.push_back(e.q2);
    prof.Phi.push_back((e.q1 + e.q2) * t - e.s);
  }
  return prof;
}

std::vector<DiagonalPiece> diagonal_pieces(const MenuMechanism& m, double t_max) {
  std::vector<DiagonalPiece> pieces;
  if (!(t_max > 0.0)) return pieces;
  std::size_t cur = best_response(m, {0.0, 0.0});
  double t = 0.0;
  // Walk the upper envelope of u_k(t) = (q1 + q2) t - s_k; each switch moves
  // to a strictly steeper line, so the walk ends after at most |menu| steps.
  while (t < t_max) {
    const double slope = m[cur].q1 + m[cur].q2;
    double next_t = kInf;
    std::size_t next = cur;
    for (std::size_t k = 0; k < m.size(); ++k) {
      const double sk = m[k].q1 + m[k].q2;
      if (sk <= slope) continue;
      const double cross = std::max(t, (m[k].s - m[cur].s) / (sk - slope));
      const double nslope = m[next].q1 + m[next].q2;
      if (cross < next_t || (cross == next_t && sk > nslope)) {
        next_t = cross;
        next = k;
      }
    }
    const double hi = std::min(next_t, t_max);
    if (hi > t) pieces.push_back({t, hi, cur});
    if (next == cur) break;
    t = hi;
    cur = next;
  }
  return pieces;
}

}  // namespace sepsell
