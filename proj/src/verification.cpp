#include "sepsell/verification.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

#include "sepsell/bounds.hpp"
#include "sepsell/continuity.hpp"
#include "sepsell/error.hpp"
#include "sepsell/optrev.hpp"
#include "sepsell/spec_io.hpp"

#ifndef SEPSELL_FIXTURE_DIR
#define SEPSELL_FIXTURE_DIR "tests/fixtures"
#endif

namespace sepsell {

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
int uniform_int(Rng& rng, int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); }

std::vector<double> dirichlet(Rng& rng, int n) {
  std::exponential_distribution<double> ex(1.0);
  std::vector<double> w(n);
  double total = 0.0;
  for (auto& x : w) total += (x = ex(rng) + 1e-3);
  for (auto& x : w) x /= total;
  return w;
}

Dist1D random_atoms(Rng& rng, int max_support, double vmax) {
  const int n = uniform_int(rng, 1, max_support);
  const auto p = dirichlet(rng, n);
  std::vector<Atom> atoms;
  for (int k = 0; k < n; ++k) atoms.push_back({uniform(rng, 0.0, vmax), p[k]});
  return Dist1D::atoms(std::move(atoms));
}

/// Bounded distribution with a density: uniform, capped exponential, capped
/// equal-revenue, or a random piecewise-uniform density.
Dist1D random_density(Rng& rng) {
  switch (uniform_int(rng, 0, 3)) {
    case 0: {
      const double a = uniform(rng, 0.0, 0.5);
      return Dist1D::uniform(a, a + uniform(rng, 0.3, 2.5));
    }
    case 1: {
      const double rate = uniform(rng, 0.5, 2.0);
      return Dist1D::exponential(rate, uniform(rng, 3.0, 8.0) / rate);
    }
    case 2: {
      const double r = uniform(rng, 0.3, 2.0);
      return Dist1D::equal_revenue(r, r * uniform(rng, 2.0, 15.0));
    }
    default: {
      const int cells = uniform_int(rng, 1, 4);
      std::vector<double> br{uniform(rng, 0.0, 0.5)};
      for (int k = 0; k < cells; ++k) br.push_back(br.back() + uniform(rng, 0.1, 1.0));
      const auto m = dirichlet(rng, cells);
      std::vector<double> dens;
      for (int k = 0; k < cells; ++k) dens.push_back(m[k] / (br[k + 1] - br[k]));
      return Dist1D::piecewise(std::move(br), std::move(dens));
    }
  }
}

struct GeneralInstance {
  double srev;
  double rev;
  double r1;
  double r2;
};

class Suite {
 public:
  explicit Suite(const VerifyOptions& o) : opts_(o) {}

  CriterionResult run(int id) {
    static const char* names[] = {"",
                                  "myerson-golden",
                                  "general-guarantee",
                                  "regular-guarantee",
                                  "bound-engine",
                                  "decomposition",
                                  "calculus-identities",
                                  "single-crossing",
                                  "monrev-chain",
                                  "continuity",
                                  "nonsymmetric-bound"};
    static const double limits[] = {0, 1, 120, 300, 180, 120, 30, 30, 120, 120, 120};
    CriterionResult r{id, names[id], false, "", 0.0, limits[id]};
    const auto t0 = std::chrono::steady_clock::now();
    try {
      switch (id) {
        case 1: r.pass = c1(r.detail); break;
        case 2: r.pass = c2(r.detail); break;
        case 3: r.pass = c3(r.detail); break;
        case 4: r.pass = c4(r.detail); break;
        case 5: r.pass = c5(r.detail); break;
        case 6: r.pass = c6(r.detail); break;
        case 7: r.pass = c7(r.detail); break;
        case 8: r.pass = c8(r.detail); break;
        case 9: r.pass = c9(r.detail); break;
        case 10: r.pass = c10(r.detail); break;
      }
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    // Criterion 10 reuses the instances solved for criterion 2.
    if (id == 10) r.seconds += c2_seconds_;
    if (id == 2) c2_seconds_ = r.seconds;
    if (r.seconds > r.limit_seconds) {
      r.pass = false;
      r.detail += " (over time budget)";
    }
    return r;
  }

 private:
  Rng rng_for(int id) const { return Rng(opts_.seed * 1000003ULL + static_cast<std::uint64_t>(id)); }

  static std::string fmt(const char* f, double a = 0, double b = 0, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
  }

  bool c1(std::string& detail) {
    const auto u = myerson_optimal(Dist1D::uniform(0.0, 1.0));
    const auto xn = myerson_optimal(Dist1D::atoms({{0.0, 0.9}, {10.0, 0.1}}));
    const auto er = myerson_optimal(Dist1D::equal_revenue(1.0, 10.0));
    const double err = std::max({std::abs(u.price - 0.5), std::abs(u.revenue - 0.25), std::abs(xn.price - 10.0),
                                 std::abs(xn.revenue - 1.0), std::abs(er.revenue - 1.0)});
    detail = fmt("uniform (%.12g, %.12g), X^10 (%.12g, %.12g)", u.price, u.revenue, xn.price, xn.revenue) +
             fmt(", equal-revenue %.12g; max error %.2e", er.revenue, err);
    return err <= 1e-9;
  }

  void ensure_general() {
    if (!general_.empty()) return;
    Rng rng = rng_for(2);
    for (int k = 0; k < 200; ++k) {
      const Dist1D d1 = random_atoms(rng, 8, 4.0), d2 = random_atoms(rng, 8, 4.0);
      const FiniteJoint j = FiniteJoint::product(d1, d2);
      general_.push_back(
          {srev(j), rev_lp(j).value, myerson_optimal(d1).revenue, myerson_optimal(d2).revenue});
    }
  }

  bool c2(std::string& detail) {
    ensure_general();
    double worst = kInf;
    for (const auto& g : general_) worst = std::min(worst, g.rev > 0.0 ? g.srev / g.rev : 1.0);
    detail = fmt("200 instances, min SRev/Rev %.6f vs guarantee %.6f", worst, kGeneralGuarantee);
    return worst >= kGeneralGuarantee - 1e-6;
  }

  bool c3(std::string& detail) {
    const std::vector<std::pair<const char*, Dist1D>> fam = {
        {"U", Dist1D::uniform(0.0, 1.0)},
        {"E", Dist1D::exponential(1.0, 10.0)},
        {"R", Dist1D::equal_revenue(1.0, 10.0)},
    };
    const double floor_ = kRegularGuarantee - 0.01;
    bool ok = true;
    double worst12 = kInf, worst16 = kInf;
    std::string bad;
    for (std::size_t a = 0; a < fam.size(); ++a) {
      for (std::size_t b = a; b < fam.size(); ++b) {
        double ratio[2];
        int idx = 0;
        for (int grid : {12, 16}) {
          const FiniteJoint j =
              FiniteJoint::product(discretize(fam[a].second, grid), discretize(fam[b].second, grid));
          ratio[idx++] = srev(j) / rev_lp(j).value;
        }
        worst12 = std::min(worst12, ratio[0]);
        worst16 = std::min(worst16, ratio[1]);
        // The shortfall below the guarantee may not grow as the grid refines.
        const double short12 = std::max(0.0, kRegularGuarantee - ratio[0]);
        const double short16 = std::max(0.0, kRegularGuarantee - ratio[1]);
        if (ratio[0] < floor_ || ratio[1] < floor_ || short16 > short12 + 1e-9) {
          ok = false;
          bad += std::string(" ") + fam[a].first + fam[b].first;
        }
      }
    }
    detail = fmt("6 pairs, min ratio %.6f (12x12), %.6f (16x16), floor %.6f", worst12, worst16, floor_);
    if (!ok) detail += "; failing:" + bad;
    return ok;
  }

  bool c4(std::string& detail) {
    Rng rng = rng_for(4);
    double worst_bound = -kInf, worst_brute = -kInf;
    for (int k = 0; k < 50; ++k) {
      const GoodPair p(random_density(rng), random_density(rng));
      const double l2 = uniform(rng, 0.3, 1.0);
      const double l1 = k % 5 == 0 ? l2 : uniform(rng, 0.1, l2);
      const SupResult s = sup_i(p, l1, l2);
      worst_bound = std::max(worst_bound, s.value - k_term_bound(l1, l2, p.r(1), p.r(2)));

      // Random step functions phi on 20 cells, phi_i in [0, lambda_i],
      // phi1 + phi2 nondecreasing; the last cell runs to infinity.
      const int cells = 20;
      std::vector<double> k1(cells), k2(cells);
      for (int c = 0; c < cells; ++c) {
        const double lo = p.upper() * c / cells;
        const double hi = c + 1 == cells ? kInf : p.upper() * (c + 1) / cells;
        k1[c] = integrate_K(p, 1, lo, hi, 1e-10);
        k2[c] = integrate_K(p, 2, lo, hi, 1e-10);
      }
      for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> tot(cells);
        for (auto& t : tot) t = uniform(rng, 0.0, l1 + l2);
        std::sort(tot.begin(), tot.end());
        double val = 0.0;
        for (int c = 0; c < cells; ++c) {
          const double lo = std::max(0.0, tot[c] - l2), hi = std::min(l1, tot[c]);
          const double f1 = uniform(rng, lo, hi);
          val += f1 * k1[c] + (tot[c] - f1) * k2[c];
        }
        worst_brute = std::max(worst_brute, val - s.value);
      }
    }
    detail = fmt("50 pairs, max sup_i - bound %.3e, max step-search - sup_i %.3e", worst_bound, worst_brute);
    return worst_bound <= 1e-6 && worst_brute <= 1e-6;
  }

  bool c5(std::string& detail) {
    const Dist1D two = smooth(Dist1D::atoms({{1.0, 0.5}, {2.0, 0.5}}), 0.2);
    const Dist1D uni = Dist1D::uniform(0.0, 1.0);
    const double inv_sqrt_e = 1.0 / std::sqrt(std::exp(1.0));
    double worst = kInf;
    for (const Dist1D* d : {&two, &uni}) {
      const Dist1D disc = discretize(*d, 12);
      const MenuMechanism menu = rev_lp(FiniteJoint::product(disc, disc)).menu();
      for (const auto& [l1, l2] : {std::pair{1.0, 1.0}, std::pair{inv_sqrt_e, 1.0}}) {
        // Change of units: the pair (X1 / l1, X2 / l2) with allocations scaled down.
        const GoodPair p(scale(*d, 1.0 / l1), scale(*d, 1.0 / l2));
        const auto res = decomposition_check(p, rescale_inverse(menu, l1, l2), l1, l2, 400);
        worst = std::min(worst, res.slack);
      }
    }
    detail = fmt("4 checks, min slack %.6f", worst);
    return worst >= -1e-3;
  }

  bool c6(std::string& detail) {
    Rng rng = rng_for(6);
    const std::vector<std::pair<Dist1D, Dist1D>> pairs = {
        {Dist1D::uniform(0.0, 1.0), Dist1D::uniform(0.0, 1.0)},
        {Dist1D::exponential(1.0, 10.0), Dist1D::equal_revenue(1.0, 10.0)},
        {Dist1D::uniform(0.0, 2.0), Dist1D::piecewise({0, 0.5, 0.9, 1}, {1.8, 0.05, 0.8})},
        {Dist1D::equal_revenue(0.5, 4.0), Dist1D::exponential(2.0, 3.0)},
    };
    double fd_err = 0.0, quad_err = 0.0;
    for (const auto& [a, b] : pairs) {
      const GoodPair p(a, b);
      const auto br = p.breakpoints();
      for (int i : {1, 2}) {
        for (int k = 0; k < 25; ++k) {
          double t;
          do {
            t = uniform(rng, 1e-3, p.upper());
          } while (std::any_of(br.begin(), br.end(), [&](double x) { return std::abs(x - t) < 1e-3; }));
          const double h = 1e-5;
          const double fd = (l_fun(p, i, t + h) - l_fun(p, i, t - h)) / (2 * h);
          fd_err = std::max(fd_err, std::abs(fd + k_fun(p, i, t)));
          quad_err = std::max(quad_err, std::abs(integrate_K(p, i, t, kInf, 1e-10) - tail_integral_K(p, i, t)));
        }
      }
    }
    const std::vector<Dist1D> dists = {
        Dist1D::uniform(0.0, 1.0),         Dist1D::exponential(1.0),
        Dist1D::exponential(2.0, 3.0),     Dist1D::equal_revenue(1.0, 10.0),
        Dist1D::atoms({{0.0, 0.9}, {10.0, 0.1}}),
        Dist1D::piecewise({0, 0.5, 0.9, 1}, {1.8, 0.05, 0.8}),
        truncate(Dist1D::equal_revenue(1.0, 10.0), 5.0),
    };
    double h_viol = -kInf, g_viol = -kInf;
    for (const auto& d : dists) {
      const double r = myerson_optimal(d).revenue;
      const double top = std::isfinite(d.support_upper()) ? 2.0 * d.support_upper() : 30.0;
      for (int k = 1; k <= 2000; ++k) {
        const double t = top * k / 2000.0;
        const double H = cumtail(d, t);
        h_viol = std::max(h_viol, t >= r ? H - (r + r * std::log(t / r)) : H - t);
        g_viol = std::max(g_viol, tail(d, t) - std::min(r / t, 1.0));
      }
    }
    detail = fmt("L' + K max %.2e, tail integral max %.2e, H excess %.2e, G excess %.2e", fd_err, quad_err, h_viol,
                 g_viol);
    return fd_err <= 1e-6 && quad_err <= 1e-7 && h_viol <= 1e-12 && g_viol <= 1e-12;
  }

  bool c7(std::string& detail) {
    const std::vector<Dist1D> reg = {Dist1D::uniform(0.0, 1.0), Dist1D::exponential(1.0, 10.0),
                                     Dist1D::equal_revenue(1.0, 10.0)};
    int checked = 0, held = 0;
    for (const auto& a : reg) {
      for (const auto& b : reg) {
        const GoodPair p(a, b);
        for (int i : {1, 2}) {
          ++checked;
          held += single_crossing_check(p, i).holds ? 1 : 0;
        }
      }
    }
    const std::string dir = opts_.fixture_dir.empty() ? default_fixture_dir() : opts_.fixture_dir;
    const Spec s = load_spec(dir + "/irregular_pair.spec");
    const auto& ps = std::get<ProductSpec>(s);
    const GoodPair irr(ps.d1, ps.d2);
    const auto rep = single_crossing_check(irr, 1);
    detail = fmt("%g/%g regular checks hold; irregular fixture holds=%g", held, checked, rep.holds ? 1 : 0);
    if (!rep.holds) detail += fmt(" (K1(%.4f) = %.3g, K1(%.4f) = %.3g)", rep.u, rep.k_u, rep.v, rep.k_v);
    return held == checked && !rep.holds;
  }

  bool c8(std::string& detail) {
    Rng rng = rng_for(8);
    double chain = -kInf;
    for (int k = 0; k < 40; ++k) {
      const FiniteJoint j = FiniteJoint::product(random_atoms(rng, 6, 4.0), random_atoms(rng, 6, 4.0));
      chain = std::max(chain, monrev_lp(j).value - rev_lp(j).value);
    }
    const std::vector<std::pair<Dist1D, Dist1D>> er = {
        {Dist1D::equal_revenue(1.0, 10.0), Dist1D::equal_revenue(1.0, 10.0)},
        {Dist1D::equal_revenue(1.0, 10.0), Dist1D::equal_revenue(2.0, 6.0)},
        {Dist1D::equal_revenue(0.5, 4.0), Dist1D::equal_revenue(1.0, 8.0)},
    };
    double worst = kInf;
    for (const auto& [a, b] : er) {
      const FiniteJoint j = FiniteJoint::product(discretize(a, 12), discretize(b, 12));
      const double mon = monrev_lp(j).value;
      chain = std::max(chain, mon - rev_lp(j).value);
      worst = std::min(worst, srev(j) / mon);
    }
    detail = fmt("max MonRev - Rev %.2e; equal-revenue min SRev/MonRev %.6f vs floor %.6f", chain, worst,
                 kRegularGuarantee - 0.01);
    return chain <= 1e-9 && worst >= kRegularGuarantee - 0.01;
  }

  static DiscreteMeasureKD random_measure(Rng& rng, int max_support, double side) {
    const int n = uniform_int(rng, 1, max_support);
    const auto p = dirichlet(rng, n);
    std::vector<std::vector<double>> pts;
    for (int k = 0; k < n; ++k) pts.push_back({uniform(rng, 0.0, side), uniform(rng, 0.0, side)});
    return DiscreteMeasureKD(2, std::move(pts), p);
  }

  static FiniteJoint to_finite(const DiscreteMeasureKD& m) {
    std::vector<Point2> pts;
    for (const auto& x : m.points()) pts.push_back({x[0], x[1]});
    return FiniteJoint(std::move(pts), m.probs());
  }

  bool c9(std::string& detail) {
    Rng rng = rng_for(9);
    double tri = -kInf, asym = 0.0, self = 0.0, sep = kInf;
    for (int k = 0; k < 100; ++k) {
      const auto a = random_measure(rng, 6, 1.0), b = random_measure(rng, 6, 1.0), c = random_measure(rng, 6, 1.0);
      const double ab = prohorov(a, b).distance, bc = prohorov(b, c).distance, ac = prohorov(a, c).distance;
      tri = std::max(tri, ac - ab - bc);
      asym = std::max(asym, std::abs(ab - prohorov(b, a).distance));
      std::vector<std::vector<double>> pts(a.points().rbegin(), a.points().rend());
      std::vector<double> pr(a.probs().rbegin(), a.probs().rend());
      self = std::max(self, prohorov(a, DiscreteMeasureKD(2, pts, pr)).distance);
      sep = std::min(sep, ab);
    }
    int ok = 0;
    double gap_ratio = 0.0;
    for (int k = 0; k < 100; ++k) {
      const auto x = to_finite(random_measure(rng, 6, 1.0)), y = to_finite(random_measure(rng, 6, 1.0));
      const auto e = continuity_experiment(x, y, 2.0);
      ok += e.ok ? 1 : 0;
      if (e.bound > 0.0) gap_ratio = std::max(gap_ratio, e.gap / e.bound);
    }
    double dirac = 0.0;
    for (int k = 0; k < 100; ++k) {
      const std::vector<double> x{uniform(rng, 0.0, 1.5), uniform(rng, 0.0, 1.5)};
      const std::vector<double> y{uniform(rng, 0.0, 1.5), uniform(rng, 0.0, 1.5)};
      const double d = prohorov(DiscreteMeasureKD(2, {x}, {1.0}), DiscreteMeasureKD(2, {y}, {1.0})).distance;
      dirac = std::max(dirac, std::abs(d - std::min(l1_distance(x, y), 1.0)));
    }
    detail = fmt("triangle excess %.2e, asymmetry %.1e, self %.1e, ", tri, asym, self) +
             fmt("min distinct %.3g; continuity ok %g/100 (max gap/bound %.3f); Dirac error %.1e", sep, ok, gap_ratio,
                 dirac);
    return tri <= 2e-6 && asym == 0.0 && self < 1e-6 && sep >= 1e-6 && ok == 100 && dirac <= 1e-6;
  }

  bool c10(std::string& detail) {
    ensure_general();
    double worst = -kInf;
    for (const auto& g : general_) {
      const double b = std::sqrt(g.r1) + std::sqrt(g.r2);
      worst = std::max(worst, g.rev - b * b);
    }
    const auto nb = nonsymmetric_bounds(1.0, 4.0);
    detail = fmt("max Rev - (sqrt r1 + sqrt r2)^2 %.2e over 200 instances; R=(1,4) bound %.12g vs %g", worst,
                 nb.appendix_b, 10.0);
    return worst <= 1e-8 && std::abs(nb.appendix_b - 9.0) <= 1e-12 && nb.appendix_b < 10.0;
  }

  VerifyOptions opts_;
  std::vector<GeneralInstance> general_;
  double c2_seconds_ = 0.0;
};

}  // namespace

std::string default_fixture_dir() { return SEPSELL_FIXTURE_DIR; }

std::vector<CriterionResult> run_acceptance(const VerifyOptions& opts,
                                            const std::function<void(const CriterionResult&)>& on_result) {
  Suite suite(opts);
  std::vector<CriterionResult> out;
  for (int id = 1; id <= 10; ++id) {
    out.push_back(suite.run(id));
    if (on_result) on_result(out.back());
  }
  return out;
}

std::string format_result(const CriterionResult& r) {
  char head[128];
  std::snprintf(head, sizeof head, "%s [%2d] %s (%.2f s, limit %.0f s): ", r.pass ? "PASS" : "FAIL", r.id,
                r.name.c_str(), r.seconds, r.limit_seconds);
  return head + r.detail;
}

}  // namespace sepsell
