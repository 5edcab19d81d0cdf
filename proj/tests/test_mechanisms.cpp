#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "sepsell/error.hpp"
#include "sepsell/mechanisms.hpp"

using namespace sepsell;
using doctest::Approx;

namespace {

FiniteJoint iid(std::vector<Atom> atoms) {
  const Dist1D d = Dist1D::atoms(std::move(atoms));
  return FiniteJoint::product(d, d);
}

bool same_entry(const MenuEntry& a, const MenuEntry& b) { return a.q1 == b.q1 && a.q2 == b.q2 && a.s == b.s; }

}  // namespace

TEST_CASE("best response and tie-breaking") {
  const MenuMechanism m1({{0, 0, 0}, {1, 1, 1}});
  CHECK(same_entry(m1[best_response(m1, {0.5, 0.5})], {1, 1, 1}));

  const MenuMechanism m2({{0, 0, 0}, {1, 0, 0.5}, {0, 1, 0.5}, {1, 1, 1}});
  CHECK(same_entry(m2[best_response(m2, {0.8, 0.2})], {1, 0, 0.5}));
  CHECK(same_entry(m2[best_response(m2, {0.0, 0.0})], {0, 0, 0}));
  CHECK(same_entry(m1[best_response(m1, {0.0, 0.0})], {0, 0, 0}));
}

TEST_CASE("null entry is appended and allocations are checked") {
  const MenuMechanism m({{1, 1, 3}});
  CHECK(m.size() == 2);
  bool has_null = false;
  for (const auto& e : m.entries()) has_null = has_null || same_entry(e, {0, 0, 0});
  CHECK(has_null);
  CHECK_THROWS_AS(MenuMechanism({{1.5, 0, 1}}), Error);
}

TEST_CASE("IC/IR/NPT verification") {
  GridAssignment g;
  g.points = {{1, 0}, {2, 0}};
  g.q1 = {1, 0};
  g.q2 = {0, 0};
  g.b = {0.5, 0};
  g.s = {0.5, 0};
  const IcReport r = verify_ic_ir_npt(g);
  CHECK_FALSE(r.ok);
  CHECK(r.worst == Approx(1.5).epsilon(1e-14));
  CHECK(r.from == 0);
  CHECK(r.to == 1);
  CHECK(r.kind == "IC");

  CHECK(verify_ic_ir_npt(GridAssignment{}).ok);

  const std::vector<Point2> pts{{0.2, 0.7}, {1.0, 1.0}, {0.6, 0.1}};
  CHECK(verify_ic_ir_npt(assign(separate_posted(0.5, 0.5), pts)).ok);
  CHECK(verify_ic_ir_npt(assign(separate_posted(0.5, 0.5), pts)).worst == 0.0);
}

TEST_CASE("menu-induced assignments are IC, IR and NPT") {
  gen::Rng rng(21);
  for (int k = 0; k < 60; ++k) {
    const MenuMechanism m = gen::menu(rng, 8, 3.0);
    std::vector<Point2> pts;
    const int n = gen::integer(rng, 1, 30);
    for (int i = 0; i < n; ++i) pts.push_back({gen::real(rng, 0, 4), gen::real(rng, 0, 4)});
    const GridAssignment g = assign(m, pts);
    for (std::size_t i = 0; i < pts.size(); ++i)
      CHECK(g.b[i] == Approx(g.q1[i] * pts[i].x1 + g.q2[i] * pts[i].x2 - g.s[i]).epsilon(1e-14));
    const IcReport r = verify_ic_ir_npt(g, 1e-12);
    CHECK(r.ok);
    CHECK(r.worst <= 1e-12);
  }
}

TEST_CASE("revenue") {
  CHECK(revenue(separate_posted(0.5, 0.5), iid({{0.25, 0.5}, {0.75, 0.5}})) == Approx(0.5).epsilon(1e-15));
  CHECK(revenue(MenuMechanism({}), iid({{1, 0.5}, {2, 0.5}})) == 0.0);
  CHECK(revenue(bundle_posted(3.0), iid({{1, 0.5}, {2, 0.5}})) == Approx(2.25).epsilon(1e-15));
  CHECK(revenue(separate_posted(0.0, 0.0), iid({{1, 0.5}, {2, 0.5}})) == 0.0);
}

TEST_CASE("posted menus") {
  const MenuMechanism s = separate_posted(0.5, 0.5);
  REQUIRE(s.size() == 4);
  CHECK(same_entry(s[0], {0, 0, 0}));
  CHECK(same_entry(s[1], {1, 0, 0.5}));
  CHECK(same_entry(s[2], {0, 1, 0.5}));
  CHECK(same_entry(s[3], {1, 1, 1}));
  const MenuMechanism b = bundle_posted(3.0);
  REQUIRE(b.size() == 2);
  CHECK(same_entry(b[0], {0, 0, 0}));
  CHECK(same_entry(b[1], {1, 1, 3}));
}

TEST_CASE("separate posting earns the sum of one-good posted revenues") {
  gen::Rng rng(22);
  for (int k = 0; k < 40; ++k) {
    const Dist1D d1 = gen::atoms(rng, 5, 4.0), d2 = gen::atoms(rng, 5, 4.0);
    const double p1 = gen::real(rng, 0, 4), p2 = gen::real(rng, 0, 4);
    const double expect = posted_revenue(d1, p1) + posted_revenue(d2, p2);
    CHECK(revenue(separate_posted(p1, p2), FiniteJoint::product(d1, d2)) == Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("rescale") {
  const MenuMechanism m({{0.5, 0.25, 1}});
  const MenuMechanism id = rescale(m, 1, 1);
  for (std::size_t k = 0; k < m.size(); ++k) CHECK(same_entry(id[k], m[k]));
  const MenuMechanism r = rescale(m, 0.5, 0.5);
  CHECK(same_entry(r[0], {1, 0.5, 1}));
  try {
    rescale(MenuMechanism({{0.6, 0, 1}}), 0.5, 1);
    FAIL("expected QOutOfRange");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::QOutOfRange);
  }
}

TEST_CASE("change of units identity") {
  gen::Rng rng(23);
  for (int k = 0; k < 40; ++k) {
    const double l1 = gen::real(rng, 0.2, 1.0), l2 = gen::real(rng, 0.2, 1.0);
    std::vector<MenuEntry> e;
    for (int i = 0; i < 5; ++i)
      e.push_back({gen::real(rng, 0, l1), gen::real(rng, 0, l2), gen::real(rng, 0, 2)});
    const MenuMechanism m(e);
    const FiniteJoint x = gen::joint(rng, 10, 3.0);
    std::vector<Point2> shrunk;
    for (const auto& p : x.points()) shrunk.push_back({p.x1 / l1, p.x2 / l2});
    const FiniteJoint xs(shrunk, x.probs());
    CHECK(revenue(m, xs) == Approx(revenue(rescale(m, l1, l2), x)).epsilon(1e-12));
    // rescale_inverse undoes rescale.
    const MenuMechanism back = rescale_inverse(rescale(m, l1, l2), l1, l2);
    for (std::size_t i = 0; i < m.size(); ++i) CHECK(back[i].q1 == Approx(m[i].q1).epsilon(1e-15));
  }
}

TEST_CASE("discount") {
  const MenuMechanism m({{1, 1, 2}});
  const MenuMechanism same = discount(m, 0.0);
  for (std::size_t k = 0; k < m.size(); ++k) CHECK(same_entry(same[k], m[k]));
  const MenuMechanism half = discount(m, 0.5);
  CHECK(same_entry(half[0], {1, 1, 1}));
  CHECK_THROWS_AS(discount(m, 1.0), Error);

  gen::Rng rng(24);
  for (int k = 0; k < 60; ++k) {
    const MenuMechanism r = gen::menu(rng, 6, 3.0);
    const FiniteJoint x = gen::joint(rng, 12, 3.0);
    const double alpha = gen::real(rng, 0.0, 0.9);
    CHECK(revenue(discount(r, alpha), x) >= (1 - alpha) * revenue(r, x) - 1e-12);
  }
}

TEST_CASE("one-good revenue bound for menus bounded by lambda") {
  // X2 = 0, X1 >= x0: E[s(X)] <= (lambda - q(x0)) Rev(X1) + s(x0).
  gen::Rng rng(25);
  for (int k = 0; k < 60; ++k) {
    const double lambda = gen::real(rng, 0.2, 1.0);
    std::vector<MenuEntry> e;
    const int n = gen::integer(rng, 1, 6);
    for (int i = 0; i < n; ++i) e.push_back({gen::real(rng, 0, lambda), 0.0, gen::real(rng, 0, 3)});
    const MenuMechanism m(e);
    const Dist1D x1 = gen::atoms(rng, 6, 4.0);
    const FiniteJoint x = FiniteJoint::product(x1, Dist1D::atoms({{0.0, 1.0}}));
    const double x0 = x1.support_lower();
    const auto& at0 = m[best_response(m, {x0, 0.0})];
    CHECK(revenue(m, x) <= (lambda - at0.q1) * myerson_optimal(x1).revenue + at0.s + 1e-12);
  }
}

TEST_CASE("best response is scale-consistent") {
  gen::Rng rng(26);
  for (int k = 0; k < 100; ++k) {
    const MenuMechanism m = gen::menu(rng, 6, 3.0);
    const Point2 x{gen::real(rng, 0, 3), gen::real(rng, 0, 3)};
    for (double c : {0.5, 2.0, 4.0}) {
      std::vector<MenuEntry> e = m.entries();
      for (auto& en : e) en.s *= c;
      CHECK(best_response(MenuMechanism(e), {x.x1 * c, x.x2 * c}) == best_response(m, x));
    }
  }
}

TEST_CASE("diagonal profile") {
  const std::vector<double> grid{0.0, 0.4, 0.5, 0.6, 1.0};
  const auto null = diagonal_profile(MenuMechanism({}), grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    CHECK(null.phi1[k] == 0.0);
    CHECK(null.Phi[k] == 0.0);
  }
  const auto b = diagonal_profile(bundle_posted(1.0), grid);
  CHECK(b.phi1[1] == 0.0);
  CHECK(b.phi2[1] == 0.0);
  CHECK(b.phi1[3] == 1.0);
  CHECK(b.phi2[3] == 1.0);
  CHECK(b.Phi[3] == Approx(0.2).epsilon(1e-14));
  const auto s = diagonal_profile(separate_posted(0.5, 0.5), grid);
  CHECK(s.phi1[2] == 1.0);
  CHECK(s.phi2[2] == 1.0);
}

TEST_CASE("diagonal allocation sum is nondecreasing and matches the exact pieces") {
  gen::Rng rng(27);
  std::vector<double> grid;
  for (int k = 0; k <= 400; ++k) grid.push_back(4.0 * k / 400);
  for (int k = 0; k < 50; ++k) {
    const MenuMechanism m = gen::menu(rng, 8, 3.0);
    const auto prof = diagonal_profile(m, grid);
    for (std::size_t i = 1; i < grid.size(); ++i)
      CHECK(prof.phi1[i] + prof.phi2[i] >= prof.phi1[i - 1] + prof.phi2[i - 1] - 1e-9);
    const auto pieces = diagonal_pieces(m, 4.0);
    REQUIRE_FALSE(pieces.empty());
    CHECK(pieces.front().lo == 0.0);
    CHECK(pieces.back().hi == 4.0);
    for (std::size_t i = 1; i < pieces.size(); ++i) CHECK(pieces[i].lo == pieces[i - 1].hi);
    // Away from switch points the pieces agree with pointwise best responses.
    for (const auto& pc : pieces) {
      if (pc.hi - pc.lo < 1e-6) continue;
      const double t = 0.5 * (pc.lo + pc.hi);
      const auto& e = m[best_response(m, {t, t})];
      CHECK(e.q1 + e.q2 == Approx(m[pc.entry].q1 + m[pc.entry].q2).epsilon(1e-12));
      CHECK(e.q1 * t + e.q2 * t - e.s == Approx(m[pc.entry].q1 * t + m[pc.entry].q2 * t - m[pc.entry].s).epsilon(1e-12));
    }
  }
}
