#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "sepsell/distributions.hpp"
#include "sepsell/error.hpp"
#include "sepsell/quadrature.hpp"

using namespace sepsell;
using doctest::Approx;

namespace {

Dist1D u01() { return Dist1D::uniform(0.0, 1.0); }
Dist1D er110() { return Dist1D::equal_revenue(1.0, 10.0); }
Dist1D point(double v) { return Dist1D::atoms({{v, 1.0}}); }

template <class F>
void expect_error(ErrorKind kind, F&& f) {
  try {
    f();
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == kind);
  }
}

std::vector<Dist1D> mixed_bag(gen::Rng& rng) {
  std::vector<Dist1D> out;
  for (int k = 0; k < 40; ++k) {
    switch (k % 4) {
      case 0: out.push_back(gen::atoms(rng, 6, 5.0)); break;
      case 1: out.push_back(gen::piecewise(rng, 4)); break;
      case 2: out.push_back(gen::density(rng)); break;
      default: out.push_back(truncate(gen::density(rng), gen::real(rng, 0.5, 3.0))); break;
    }
  }
  out.push_back(Dist1D::exponential(1.0));
  out.push_back(er110());
  return out;
}

}  // namespace

TEST_CASE("cdf and tail conventions") {
  CHECK(cdf(u01(), 0.5) == Approx(0.5).epsilon(1e-15));
  CHECK(cdf(point(1.0), 0.99) == 0.0);
  CHECK(cdf(point(1.0), 1.0) == 1.0);
  CHECK(tail(u01(), 0.25) == Approx(0.75).epsilon(1e-15));
  CHECK(tail(er110(), 4.0) == Approx(0.25).epsilon(1e-14));
  CHECK(tail(point(1.0), 1.0) == 1.0);
  CHECK(tail(u01(), 0.0) == 1.0);
  // Just below the cap only the compensating atom remains.
  CHECK(tail(er110(), 10.0 - 1e-12) == Approx(0.1).epsilon(1e-10));
  CHECK(tail(er110(), 10.0) == Approx(0.1).epsilon(1e-14));
}

TEST_CASE("cumulative tail") {
  CHECK(cumtail(u01(), 1.0) == Approx(0.5).epsilon(1e-14));
  CHECK(cumtail(er110(), 2.0) == Approx(1.0 + std::log(2.0)).epsilon(1e-13));
  CHECK(cumtail(er110(), 0.0) == 0.0);
  CHECK(cumtail(u01(), 0.0) == 0.0);
}

TEST_CASE("myerson golden values") {
  const auto u = myerson_optimal(u01());
  CHECK(std::abs(u.price - 0.5) < 1e-9);
  CHECK(std::abs(u.revenue - 0.25) < 1e-9);
  const auto xn = myerson_optimal(Dist1D::atoms({{0.0, 0.9}, {10.0, 0.1}}));
  CHECK(std::abs(xn.price - 10.0) < 1e-9);
  CHECK(std::abs(xn.revenue - 1.0) < 1e-9);
  const auto er = myerson_optimal(er110());
  CHECK(std::abs(er.price - 1.0) < 1e-9);
  CHECK(std::abs(er.revenue - 1.0) < 1e-9);
  const auto zero = myerson_optimal(point(0.0));
  CHECK(zero.price == 0.0);
  CHECK(zero.revenue == 0.0);
}

TEST_CASE("myerson agrees with a price-grid oracle") {
  gen::Rng rng(11);
  for (int k = 0; k < 30; ++k) {
    const Dist1D d = k % 2 ? gen::piecewise(rng, 4) : gen::density(rng);
    const auto m = myerson_optimal(d);
    double best = 0.0;
    const double top = std::isfinite(d.support_upper()) ? d.support_upper() : 20.0;
    for (int i = 0; i <= 20000; ++i) best = std::max(best, posted_revenue(d, top * i / 20000.0));
    CHECK(m.revenue >= best - 1e-12);
    CHECK(m.revenue <= best + 1e-3);
    CHECK(std::abs(m.revenue - m.price * tail(d, m.price)) <= 1e-12);
  }
}

TEST_CASE("virtual value") {
  CHECK(virtual_value(u01(), 0.75) == Approx(0.5).epsilon(1e-14));
  CHECK(virtual_value(Dist1D::exponential(1.0), 3.0) == Approx(2.0).epsilon(1e-12));
  CHECK(std::abs(virtual_value(u01(), 0.5)) < 1e-14);
  expect_error(ErrorKind::NoDensity, [] { virtual_value(point(1.0), 1.0); });
  expect_error(ErrorKind::ZeroDensity, [] { virtual_value(u01(), 2.0); });
}

TEST_CASE("weak regularity") {
  CHECK(is_weakly_regular(u01()));
  CHECK(is_weakly_regular(er110()));
  CHECK(is_weakly_regular(Dist1D::exponential(2.0)));
  // Low density followed by a high one: the virtual value jumps up, so this
  // is regular.
  CHECK(is_weakly_regular(Dist1D::piecewise({0.0, 1.0, 1.5}, {0.1, 1.8})));
  // High density followed by a low one drops the virtual value from 0.44 to -0.5.
  CHECK_FALSE(is_weakly_regular(Dist1D::piecewise({0.0, 0.5, 1.5}, {1.8, 0.1})));
  expect_error(ErrorKind::NoDensity, [] { is_weakly_regular(point(1.0)); });
}

TEST_CASE("tau") {
  CHECK(tau(u01(), 0.25) == Approx(1.0 - std::sqrt(0.5)).epsilon(1e-9));
  CHECK(std::abs(cumtail(u01(), tau(u01(), 0.25)) - 0.25) < 1e-10);
  CHECK(tau(er110(), 1.0) == Approx(1.0).epsilon(1e-9));
  expect_error(ErrorKind::Unreachable, [] { tau(u01(), 0.6); });
  gen::Rng rng(5);
  for (int k = 0; k < 30; ++k) {
    const Dist1D d = gen::density(rng);
    const double r = myerson_optimal(d).revenue;
    const double t = tau(d, r);
    CHECK(std::abs(cumtail(d, t) - r) < 1e-10);
    CHECK(t >= r - 1e-12);
  }
}

TEST_CASE("equal revenue construction") {
  const Dist1D d = equal_revenue(1.0, 10.0);
  CHECK(mean(d) == Approx(1.0 + std::log(10.0)).epsilon(1e-13));
  CHECK(atom_mass(d, 10.0) == Approx(0.1).epsilon(1e-15));
  for (int k = 0; k <= 900; ++k) {
    const double p = 1.0 + 9.0 * k / 900.0;
    CHECK(std::abs(posted_revenue(d, p) - 1.0) <= 1e-12);
  }
  const Dist1D d2 = equal_revenue(2.5, 7.0);
  for (int k = 0; k <= 100; ++k) {
    const double p = 2.5 + 4.5 * k / 100.0;
    CHECK(std::abs(posted_revenue(d2, p) - 2.5) <= 1e-12);
  }
  expect_error(ErrorKind::BadParams, [] { equal_revenue(2.0, 1.0); });
  expect_error(ErrorKind::BadParams, [] { equal_revenue(0.0, 1.0); });
}

TEST_CASE("truncate") {
  const Dist1D t = truncate(Dist1D::atoms({{0.0, 0.9}, {10.0, 0.1}}), 5.0);
  CHECK(cdf(t, 0.0) == Approx(1.0).epsilon(1e-15));
  CHECK(myerson_optimal(t).revenue == 0.0);
  const Dist1D same = truncate(u01(), 2.0);
  for (double x : {0.1, 0.5, 0.9}) CHECK(cdf(same, x) == Approx(cdf(u01(), x)).epsilon(1e-15));
  // Mass 0.2 above 5 falls to 0; price p in [1, 5] earns 1 - 0.2 p.
  const auto m = myerson_optimal(truncate(er110(), 5.0));
  CHECK(m.price == Approx(1.0).epsilon(1e-12));
  CHECK(m.revenue == Approx(0.8).epsilon(1e-12));
}

TEST_CASE("truncation revenue is nondecreasing in the level") {
  gen::Rng rng(7);
  for (int k = 0; k < 30; ++k) {
    const Dist1D d = k % 2 ? gen::atoms(rng, 6, 5.0) : gen::density(rng);
    double prev = 0.0;
    for (double M = 0.25; M <= 12.0; M *= 1.3) {
      const double r = myerson_optimal(truncate(d, M)).revenue;
      CHECK(r >= prev - 1e-12);
      prev = r;
    }
  }
}

TEST_CASE("smooth") {
  const Dist1D s = smooth(point(1.0), 0.5);
  CHECK(density(s, 1.2) == Approx(2.0).epsilon(1e-14));
  CHECK(density(s, 1.6) == 0.0);
  // Each atom spreads 0.5 over width 0.4 (density 1.25); the two cells
  // overlap on [0.2, 0.4], where the densities add.
  const Dist1D o = smooth(Dist1D::atoms({{0.0, 0.5}, {0.2, 0.5}}), 0.4);
  CHECK(density(o, 0.1) == Approx(1.25).epsilon(1e-14));
  CHECK(density(o, 0.3) == Approx(2.5).epsilon(1e-14));
  CHECK(density(o, 0.5) == Approx(1.25).epsilon(1e-14));
  CHECK(cdf(o, 0.6) == Approx(1.0).epsilon(1e-12));
  expect_error(ErrorKind::UnsupportedRepresentation, [] { smooth(u01(), 0.1); });

  gen::Rng rng(3);
  for (int k = 0; k < 30; ++k) {
    const Dist1D d = gen::atoms(rng, 6, 4.0);
    const double r = myerson_optimal(d).revenue;
    for (double eps : {0.1, 0.01, 0.001}) {
      const Dist1D sd = smooth(d, eps);
      CHECK(mean(sd) == Approx(mean(d) + eps / 2).epsilon(1e-12));
      const double rs = myerson_optimal(sd).revenue;
      CHECK(rs >= r - 1e-12);
      CHECK(rs <= r + 2 * eps);
    }
  }
}

TEST_CASE("mean") {
  CHECK(mean(u01()) == Approx(0.5).epsilon(1e-15));
  CHECK(mean(Dist1D::atoms({{0.0, 0.9}, {10.0, 0.1}})) == Approx(1.0).epsilon(1e-15));
  CHECK(mean(Dist1D::exponential(2.0)) == Approx(0.5).epsilon(1e-14));
  CHECK(mean(Dist1D::exponential(1.0, 3.0)) == Approx(1.0 - std::exp(-3.0)).epsilon(1e-14));
}

TEST_CASE("construction errors") {
  expect_error(ErrorKind::BadParams, [] { Dist1D::atoms({{1.0, 0.5}, {2.0, 0.4}}); });
  expect_error(ErrorKind::BadParams, [] { Dist1D::atoms({{-1.0, 1.0}}); });
  expect_error(ErrorKind::BadParams, [] { Dist1D::piecewise({0.0, 1.0, 1.0}, {0.5, 0.5}); });
  expect_error(ErrorKind::BadParams, [] { Dist1D::piecewise({0.0, 1.0}, {0.9}); });
  expect_error(ErrorKind::BadParams, [] { Dist1D::uniform(1.0, 1.0); });
  expect_error(ErrorKind::BadParams, [] { Dist1D::exponential(0.0); });
}

TEST_CASE("tail inequalities") {
  gen::Rng rng(1);
  for (const Dist1D& d : mixed_bag(rng)) {
    const double r = myerson_optimal(d).revenue;
    const double top = std::isfinite(d.support_upper()) ? 1.5 * d.support_upper() + 0.5 : 25.0;
    for (int k = 1; k <= 300; ++k) {
      const double t = top * k / 300.0;
      CHECK(tail(d, t) <= std::min(r / t, 1.0) + 1e-12);
      const double H = cumtail(d, t);
      if (r > 0.0 && t >= r) {
        CHECK(H <= r + r * std::log(t / r) + 1e-12);
      } else {
        CHECK(H <= t + 1e-12);
      }
    }
  }
}

TEST_CASE("cumulative tail matches quadrature of the tail") {
  gen::Rng rng(2);
  for (const Dist1D& d : mixed_bag(rng)) {
    const auto br = d.breakpoints();
    for (double t : {0.3, 1.0, 2.7}) {
      const double q = integrate([&](double u) { return tail(d, u); }, 0.0, t, 1e-10, br);
      CHECK(std::abs(cumtail(d, t) - q) < 1e-8);
    }
  }
}

TEST_CASE("cumulative tail equals E[min(X, t)]") {
  gen::Rng rng(4);
  for (int k = 0; k < 30; ++k) {
    const Dist1D a = gen::atoms(rng, 6, 5.0);
    const Dist1D p = gen::piecewise(rng, 4);
    for (double t : {0.2, 0.9, 1.7, 6.0}) {
      double ea = 0.0;
      for (const auto& at : a.atom_part()) ea += at.mass * std::min(at.value, t);
      CHECK(std::abs(cumtail(a, t) - ea) < 1e-12);
      // Per cell of density f on [l, h]: int min(x, t) f dx in closed form.
      const auto& rep = std::get<PiecewiseUniform>(p.representation());
      double ep = 0.0;
      for (std::size_t c = 0; c < rep.densities.size(); ++c) {
        const double l = rep.breakpoints[c], h = rep.breakpoints[c + 1], f = rep.densities[c];
        const double m = std::clamp(t, l, h);
        ep += f * ((m * m - l * l) / 2 + t * (h - m));
      }
      CHECK(std::abs(cumtail(p, t) - ep) < 1e-12);
    }
  }
}

TEST_CASE("discretize keeps mass and mean") {
  gen::Rng rng(9);
  for (int k = 0; k < 20; ++k) {
    const Dist1D d = gen::density(rng);
    const Dist1D g = discretize(d, 12);
    CHECK_FALSE(g.has_density());
    CHECK(mean(g) == Approx(mean(d)).epsilon(1e-12));
  }
  expect_error(ErrorKind::BadParams, [] { discretize(Dist1D::exponential(1.0), 8); });
}

TEST_CASE("scale and cap") {
  const Dist1D s = scale(u01(), 2.0);
  CHECK(tail(s, 1.0) == Approx(0.5).epsilon(1e-15));
  CHECK(myerson_optimal(s).revenue == Approx(0.5).epsilon(1e-12));
  const Dist1D c = cap(Dist1D::exponential(1.0), 2.0);
  CHECK(atom_mass(c, 2.0) == Approx(std::exp(-2.0)).epsilon(1e-14));
  CHECK(c.support_upper() == 2.0);
}
