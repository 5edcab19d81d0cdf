#include "sepsell/optrev.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <sstream>

#include "sepsell/error.hpp"
#include "sepsell/simplex.hpp"

namespace sepsell {

namespace {

bool leq(const Point2& a, const Point2& b) { return a.x1 <= b.x1 && a.x2 <= b.x2; }

// Pairs (i, j) with x_i < x_j componentwise and nothing in between.
std::vector<std::pair<std::size_t, std::size_t>> covering_pairs(const std::vector<Point2>& pts) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || !leq(pts[i], pts[j])) continue;
      bool covered = true;
      for (std::size_t k = 0; k < n && covered; ++k) {
        if (k != i && k != j && leq(pts[i], pts[k]) && leq(pts[k], pts[j])) covered = false;
      }
      if (covered) out.emplace_back(i, j);
    }
  }
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

MenuMechanism OptRevSolution::menu() const {
  std::vector<MenuEntry> entries;
  for (std::size_t i = 0; i < q1.size(); ++i) entries.push_back({q1[i], q2[i], s[i]});
  return MenuMechanism(std::move(entries));
}

OptRevSolution solve_revenue_lp(const FiniteJoint& j, const LpOptions& opts) {
  const auto& pts = j.points();
  const auto& pr = j.probs();
  const std::size_t n = pts.size();

  std::vector<double> obj(3 * n);
  for (std::size_t i = 0; i < n; ++i) {
    obj[3 * i] = pr[i] * pts[i].x1;
    obj[3 * i + 1] = pr[i] * pts[i].x2;
    obj[3 * i + 2] = -pr[i];
  }
  SimplexLp lp(std::move(obj));
  for (std::size_t i = 0; i < n; ++i) {
    lp.add_row({{3 * i, 1.0}}, 1.0);
    lp.add_row({{3 * i + 1, 1.0}}, 1.0);
  }

  std::vector<char> have(n * n, 0);
  // q_i . (x_k - x_i) <= b_k - b_i
  auto add_ic = [&](std::size_t i, std::size_t k) {
    if (have[i * n + k]) return false;
    have[i * n + k] = 1;
    lp.add_row({{3 * i, pts[k].x1 - pts[i].x1},
                {3 * i + 1, pts[k].x2 - pts[i].x2},
                {3 * k + 2, -1.0},
                {3 * i + 2, 1.0}},
               0.0);
    return true;
  };

  if (opts.full) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k)
        if (i != k) add_ic(i, k);
  }
  const auto cover = covering_pairs(pts);
  for (const auto& [lo, hi] : cover) {
    add_ic(lo, hi);
    add_ic(hi, lo);
  }
  if (opts.npt) {
    for (std::size_t i = 0; i < n; ++i)
      lp.add_row({{3 * i + 2, 1.0}, {3 * i, -pts[i].x1}, {3 * i + 1, -pts[i].x2}}, 0.0);
  }
  if (opts.monotone) {
    for (const auto& [lo, hi] : cover) {
      lp.add_row({{3 * lo, pts[lo].x1},
                  {3 * lo + 1, pts[lo].x2},
                  {3 * lo + 2, -1.0},
                  {3 * hi, -pts[hi].x1},
                  {3 * hi + 1, -pts[hi].x2},
                  {3 * hi + 2, 1.0}},
                 0.0);
    }
  }

  OptRevSolution sol;
  std::vector<double> x;
  auto violation = [&](std::size_t i, std::size_t k) {
    return x[3 * i] * (pts[k].x1 - pts[i].x1) + x[3 * i + 1] * (pts[k].x2 - pts[i].x2) -
           (x[3 * k + 2] - x[3 * i + 2]);
  };
  for (;;) {
    const LpStatus st = lp.solve();
    if (st == LpStatus::IterationLimit)
      throw Error(ErrorKind::IterationLimit, "simplex pivot limit reached");
    if (st != LpStatus::Optimal) throw Error(ErrorKind::Degenerate, "LP reported unbounded or infeasible");
    x = lp.primal();
    ++sol.rounds;
    if (opts.full) break;
    std::size_t added = 0;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t arg = n;
      double worst = 1e-9;
      for (std::size_t k = 0; k < n; ++k) {
        if (k == i || have[i * n + k]) continue;
        const double v = violation(i, k);
        if (v > worst) {
          worst = v;
          arg = k;
        }
      }
      if (arg != n && add_ic(i, arg)) ++added;
    }
    if (added == 0) break;
    if (sol.rounds >= opts.max_rounds) {
      sol.status = SolveStatus::IterationLimit;
      break;
    }
  }

  sol.q1.resize(n);
  sol.q2.resize(n);
  sol.b.resize(n);
  sol.s.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    sol.q1[i] = std::clamp(x[3 * i], 0.0, 1.0);
    sol.q2[i] = std::clamp(x[3 * i + 1], 0.0, 1.0);
    sol.b[i] = x[3 * i + 2];
    sol.s[i] = sol.q1[i] * pts[i].x1 + sol.q2[i] * pts[i].x2 - sol.b[i];
    sol.value += pr[i] * sol.s[i];
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      if (i != k) sol.ic_violation = std::max(sol.ic_violation, violation(i, k));
  sol.rows = lp.num_rows();
  if (sol.status == SolveStatus::IterationLimit)
    throw Error(ErrorKind::IterationLimit, "row generation did not converge");
  if (sol.ic_violation > 1e-6)
    throw Error(ErrorKind::Degenerate, "LP solution violates IC by " + fmt(sol.ic_violation));
  return sol;
}

OptRevSolution rev_lp(const FiniteJoint& j, bool npt) {
  LpOptions o;
  o.npt = npt;
  return solve_revenue_lp(j, o);
}

OptRevSolution monrev_lp(const FiniteJoint& j, bool npt) {
  LpOptions o;
  o.npt = npt;
  o.monotone = true;
  return solve_revenue_lp(j, o);
}

double srev(const FiniteJoint& j) {
  return myerson_optimal(j.marginal(1)).revenue + myerson_optimal(j.marginal(2)).revenue;
}

RatioReport ratio_report(const FiniteJoint& j, bool regular, bool with_monrev) {
  RatioReport r;
  r.srev = srev(j);
  r.rev = rev_lp(j).value;
  if (with_monrev) r.monrev = monrev_lp(j).value;
  r.ratio = r.rev > 0.0 ? r.srev / r.rev : 1.0;
  if (j.is_independent()) {
    r.guarantee = regular ? kRegularGuarantee : kGeneralGuarantee;
    r.slack = r.ratio - *r.guarantee;
  }
  return r;
}

namespace {

struct Instance {
  std::vector<double> v1, p1, v2, p2;
};

std::vector<double> dirichlet(std::mt19937_64& rng, int k) {
  std::exponential_distribution<double> ex(1.0);
  std::vector<double> p(k);
  double tot = 0.0;
  for (auto& x : p) tot += (x = ex(rng) + 1e-3);
  for (auto& x : p) x /= tot;
  return p;
}

// Lattice draws put values on a value_max/8 grid and probabilities on
// multiples of 1/8; the LP value has kinks at such rational points.
constexpr int kLattice = 8;

std::vector<double> lattice_probs(std::mt19937_64& rng, int k) {
  std::vector<int> cuts(kLattice - 1);
  std::iota(cuts.begin(), cuts.end(), 1);
  std::shuffle(cuts.begin(), cuts.end(), rng);
  cuts.resize(k - 1);
  std::sort(cuts.begin(), cuts.end());
  cuts.push_back(kLattice);
  std::vector<double> p;
  int prev = 0;
  for (int c : cuts) {
    p.push_back(static_cast<double>(c - prev) / kLattice);
    prev = c;
  }
  return p;
}

Instance random_instance(const FamilySpec& spec, bool lattice, std::mt19937_64& rng) {
  const int k = spec.family == ScanFamily::PointMass ? 1 : std::max(1, spec.support_size);
  lattice = lattice && k <= kLattice;
  std::uniform_real_distribution<double> val(0.01 * spec.value_max, spec.value_max);
  std::uniform_int_distribution<int> step(1, kLattice);
  auto value = [&] { return lattice ? spec.value_max * step(rng) / kLattice : val(rng); };
  auto probs = [&] { return lattice ? lattice_probs(rng, k) : dirichlet(rng, k); };
  Instance in;
  for (int i = 0; i < k; ++i) in.v1.push_back(value());
  in.p1 = probs();
  if (spec.family == ScanFamily::IidAtoms || spec.family == ScanFamily::PointMass) {
    in.v2 = in.v1;
    in.p2 = in.p1;
    if (spec.family == ScanFamily::PointMass) in.v2 = {value()};
  } else {
    for (int i = 0; i < k; ++i) in.v2.push_back(value());
    in.p2 = probs();
  }
  return in;
}

Instance perturb(const Instance& base, const FamilySpec& spec, double sigma, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto jiggle_values = [&](std::vector<double> v) {
    for (auto& x : v) x = std::clamp(x * std::exp(sigma * gauss(rng)), 1e-3 * spec.value_max, spec.value_max);
    return v;
  };
  auto jiggle_probs = [&](std::vector<double> p) {
    double tot = 0.0;
    for (auto& x : p) tot += (x = std::max(1e-4, x * std::exp(sigma * gauss(rng))));
    for (auto& x : p) x /= tot;
    return p;
  };
  Instance in;
  in.v1 = jiggle_values(base.v1);
  in.p1 = jiggle_probs(base.p1);
  if (spec.family == ScanFamily::IidAtoms) {
    in.v2 = in.v1;
    in.p2 = in.p1;
  } else if (spec.family == ScanFamily::PointMass) {
    in.v2 = jiggle_values(base.v2);
    in.p2 = base.p2;
    in.p1 = base.p1;
  } else {
    in.v2 = jiggle_values(base.v2);
    in.p2 = jiggle_probs(base.p2);
  }
  return in;
}

Dist1D to_dist(const std::vector<double>& v, const std::vector<double>& p) {
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < v.size(); ++i) atoms.push_back({v[i], p[i]});
  return Dist1D::atoms(std::move(atoms));
}

}  // namespace

ScanResult scan_worst_ratio(const FamilySpec& spec, int budget, std::uint64_t seed) {
  if (spec.support_size < 1 || !(spec.value_max > 0.0))
    throw Error(ErrorKind::BadParams, "family needs support_size >= 1 and value_max > 0");
  ScanResult res;
  std::mt19937_64 rng(seed);
  const int random_phase = (budget + 1) / 2;
  Instance best_in;
  // Local steps use a log-uniform scale: the optimum is typically a kink of
  // the LP value, where any single step size stalls.
  std::uniform_real_distribution<double> log_sigma(std::log(1e-5), std::log(0.3));
  for (int it = 0; it < budget; ++it) {
    const bool local = it >= random_phase && res.best.has_value();
    Instance in;
    if (local) {
      in = perturb(best_in, spec, std::exp(log_sigma(rng)), rng);
    } else {
      in = random_instance(spec, it % 2 == 1, rng);
    }
    const FiniteJoint j = FiniteJoint::product(to_dist(in.v1, in.p1), to_dist(in.v2, in.p2));
    const double s = srev(j);
    const double r = rev_lp(j).value;
    const char* phase = local ? "local" : it % 2 == 1 && in.p1.size() <= kLattice ? "lattice" : "random";
    ScanSample sample{it, phase, in.v1, in.p1, in.v2, in.p2, s, r,
                      r > 0.0 ? s / r : 1.0};
    const bool improved = !res.best || sample.ratio < res.best->ratio;
    if (improved) {
      res.best = sample;
      best_in = in;
    }
    res.trace.push_back(std::move(sample));
  }
  return res;
}

std::string scan_trace_csv(const ScanResult& r) {
  auto join = [](const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ";" : "") + fmt(v[i]);
    return out;
  };
  std::ostringstream os;
  os << "iteration,phase,srev,rev,ratio,values1,probs1,values2,probs2\n";
  for (const auto& s : r.trace) {
    os << s.iteration << ',' << s.phase << ',' << fmt(s.srev) << ',' << fmt(s.rev) << ','
       << fmt(s.ratio) << ',' << join(s.values1) << ',' << join(s.probs1) << ',' << join(s.values2)
       << ',' << join(s.probs2) << '\n';
  }
  return os.str();
}

}  // namespace sepsell
