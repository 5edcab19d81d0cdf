#include "sepsell/continuity.hpp"

#include <algorithm>
#include <cmath>

#include "accurate_sum.hpp"
#include "sepsell/error.hpp"
#include "sepsell/maxflow.hpp"
#include "sepsell/optrev.hpp"

namespace sepsell {

namespace {

constexpr double kUnit = 1e9;  // probability scale of integer flow capacities

std::int64_t to_units(double p) { return std::llround(p * kUnit); }

struct FlowProblem {
  const DiscreteMeasureKD& mu;
  const DiscreteMeasureKD& nu;
  std::vector<std::vector<double>> dist;
  std::int64_t mu_total = 0;
  std::int64_t nu_total = 0;

  FlowProblem(const DiscreteMeasureKD& a, const DiscreteMeasureKD& b) : mu(a), nu(b) {
    dist.assign(mu.size(), std::vector<double>(nu.size()));
    for (std::size_t i = 0; i < mu.size(); ++i)
      for (std::size_t j = 0; j < nu.size(); ++j) dist[i][j] = l1_distance(mu.points()[i], nu.points()[j]);
    for (double p : mu.probs()) mu_total += to_units(p);
    for (double q : nu.probs()) nu_total += to_units(q);
  }

  // Node layout: source, mu atoms, nu atoms, sink.
  template <class Admit>
  MaxFlowResult solve(Admit admit) const {
    const int n = static_cast<int>(mu.size()), m = static_cast<int>(nu.size());
    const int source = 0, sink = n + m + 1;
    const std::int64_t big = mu_total + nu_total + 1;
    std::vector<FlowEdge> edges;
    for (int i = 0; i < n; ++i) edges.push_back({source, 1 + i, to_units(mu.probs()[i])});
    for (int j = 0; j < m; ++j) edges.push_back({1 + n + j, sink, to_units(nu.probs()[j])});
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j)
        if (admit(dist[i][j])) edges.push_back({1 + i, 1 + n + j, big});
    return max_flow(n + m + 2, edges, source, sink);
  }

  // Worst Hall deficiency over both directions, in probability units.
  double deficiency(std::int64_t flow) const {
    return static_cast<double>(std::max(mu_total, nu_total) - flow) / kUnit;
  }
};

ViolatingSet witness_from_cut(const DiscreteMeasureKD& p, const DiscreteMeasureKD& q,
                              const std::vector<char>& side, bool first, double rho) {
  ViolatingSet w{rho, first, {}, 0.0, 0.0};
  detail::AccurateSum mass, hood;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (side[1 + i]) {
      w.atoms.push_back(i);
      mass.add(p.probs()[i]);
    }
  }
  for (std::size_t j = 0; j < q.size(); ++j) {
    for (std::size_t i : w.atoms) {
      if (l1_distance(p.points()[i], q.points()[j]) < rho) {
        hood.add(q.probs()[j]);
        break;
      }
    }
  }
  w.mass = mass.value();
  w.neighborhood = hood.value();
  return w;
}

}  // namespace

DiscreteMeasureKD::DiscreteMeasureKD(std::size_t dim, std::vector<std::vector<double>> points,
                                     std::vector<double> probs)
    : dim_(dim), points_(std::move(points)), probs_(std::move(probs)) {
  if (dim_ < 1) throw Error(ErrorKind::BadParams, "dimension must be at least 1");
  if (points_.size() != probs_.size() || points_.empty())
    throw Error(ErrorKind::BadParams, "need one probability per point");
  detail::AccurateSum total;
  for (std::size_t k = 0; k < points_.size(); ++k) {
    if (points_[k].size() != dim_) throw Error(ErrorKind::DimMismatch, "point has the wrong dimension");
    for (double c : points_[k])
      if (!(c >= 0.0) || !std::isfinite(c)) throw Error(ErrorKind::BadParams, "coordinates must be nonnegative");
    if (!(probs_[k] > 0.0)) throw Error(ErrorKind::BadParams, "probabilities must be positive");
    total.add(probs_[k]);
  }
  if (std::abs(total.value() - 1.0) > 1e-12) throw Error(ErrorKind::BadParams, "probabilities must sum to 1");
}

DiscreteMeasureKD DiscreteMeasureKD::from_joint(const FiniteJoint& j) {
  std::vector<std::vector<double>> pts;
  for (const auto& x : j.points()) pts.push_back({x.x1, x.x2});
  return DiscreteMeasureKD(2, std::move(pts), j.probs());
}

double l1_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d += std::abs(a[k] - b[k]);
  return d;
}

double transportable_mass(const DiscreteMeasureKD& mu, const DiscreteMeasureKD& nu, double rho) {
  if (mu.dim() != nu.dim()) throw Error(ErrorKind::DimMismatch, "measures differ in dimension");
  const FlowProblem fp(mu, nu);
  return static_cast<double>(fp.solve([&](double d) { return d < rho; }).value) / kUnit;
}

ProhorovResult prohorov(const DiscreteMeasureKD& mu, const DiscreteMeasureKD& nu) {
  if (mu.dim() != nu.dim()) throw Error(ErrorKind::DimMismatch, "measures differ in dimension");
  const FlowProblem fp(mu, nu);

  // For rho in (levels[k], levels[k+1]] the admissible pairs are those with
  // distance <= levels[k]; both Prohorov conditions then read
  // deficiency_k <= rho, so the distance is min_k max(levels[k], deficiency_k).
  std::vector<double> levels{0.0};
  for (const auto& row : fp.dist) levels.insert(levels.end(), row.begin(), row.end());
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  auto deficiency_at = [&](std::size_t k) {
    return fp.deficiency(fp.solve([&](double d) { return d <= levels[k]; }).value);
  };
  // max(levels[k], deficiency_k) is quasi-convex in k: find the first level
  // that is at least its deficiency.
  std::size_t lo = 0, hi = levels.size() - 1;
  if (levels[hi] < deficiency_at(hi)) {
    lo = hi;
  } else {
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (levels[mid] >= deficiency_at(mid)) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
  }
  double distance = std::max(levels[lo], deficiency_at(lo));
  if (lo > 0) distance = std::min(distance, std::max(levels[lo - 1], deficiency_at(lo - 1)));
  distance = std::min(1.0, distance);

  ProhorovResult res{distance, 0.0, std::nullopt};
  const double above = distance + 1e-9;
  res.transport_above = static_cast<double>(fp.solve([&](double d) { return d < above; }).value) / kUnit;
  if (distance >= 1e-4) {
    const double below = distance - 1e-4;
    const auto cut = fp.solve([&](double d) { return d < below; });
    // The source side of a minimum cut is a Hall-violating set of mu atoms;
    // the same flow read backwards gives one for nu.
    const FlowProblem back(nu, mu);
    const auto cut_back = back.solve([&](double d) { return d < below; });
    auto w1 = witness_from_cut(mu, nu, cut.source_side, true, below);
    auto w2 = witness_from_cut(nu, mu, cut_back.source_side, false, below);
    res.witness = (w1.mass - w1.neighborhood) >= (w2.mass - w2.neighborhood) ? w1 : w2;
  }
  return res;
}

double revenue_continuity_bound(double M, double dist) {
  if (!(M >= 1.0)) throw Error(ErrorKind::BadParams, "M must be at least 1");
  if (!(dist >= 0.0 && dist <= 1.0)) throw Error(ErrorKind::BadParams, "distance must lie in [0, 1]");
  return (2.0 * M + 1.0) * std::sqrt(dist);
}

ContinuityResult continuity_experiment(const FiniteJoint& x, const FiniteJoint& y, double M) {
  for (const FiniteJoint* j : {&x, &y}) {
    for (const auto& p : j->points()) {
      if (p.x1 + p.x2 > M * (1.0 + 1e-12))
        throw Error(ErrorKind::BadParams, "support point outside the l1 ball of radius M (out of contract)");
    }
  }
  ContinuityResult r{};
  r.rev_x = rev_lp(x).value;
  r.rev_y = rev_lp(y).value;
  r.gap = std::abs(r.rev_x - r.rev_y);
  r.dist = prohorov(DiscreteMeasureKD::from_joint(x), DiscreteMeasureKD::from_joint(y)).distance;
  r.bound = revenue_continuity_bound(M, r.dist);
  r.ok = r.gap <= r.bound + 1e-8;
  return r;
}

FiniteJoint truncate_joint(const FiniteJoint& x, double M) {
  if (!(M > 0.0)) throw Error(ErrorKind::BadParams, "truncation level must be positive");
  std::vector<Point2> pts = x.points();
  for (auto& p : pts) {
    if (p.x1 + p.x2 > M) p = {0.0, 0.0};
  }
  return FiniteJoint(std::move(pts), x.probs());
}

FiniteJoint smooth_joint(const FiniteJoint& x, double eps, int sub_grid) {
  if (!(eps > 0.0) || sub_grid < 1) throw Error(ErrorKind::BadParams, "need eps > 0 and sub_grid >= 1");
  std::vector<Point2> pts;
  std::vector<double> probs;
  const double w = 1.0 / (static_cast<double>(sub_grid) * sub_grid);
  for (std::size_t k = 0; k < x.size(); ++k) {
    for (int a = 0; a < sub_grid; ++a) {
      for (int b = 0; b < sub_grid; ++b) {
        pts.push_back({x.points()[k].x1 + eps * (a + 0.5) / sub_grid,
                       x.points()[k].x2 + eps * (b + 0.5) / sub_grid});
        probs.push_back(x.probs()[k] * w);
      }
    }
  }
  return FiniteJoint(std::move(pts), std::move(probs));
}

ConvergenceTrace convergence_trace(const FiniteJoint& x, TraceMode mode, const std::vector<double>& params,
                                   int sub_grid) {
  ConvergenceTrace tr;
  tr.mode = mode;
  tr.params = params;
  tr.target = rev_lp(x).value;
  for (double v : params) {
    const FiniteJoint y = mode == TraceMode::Truncate ? truncate_joint(x, v) : smooth_joint(x, v, sub_grid);
    tr.revenues.push_back(rev_lp(y).value);
    tr.errors.push_back(std::abs(tr.revenues.back() - tr.target));
  }
  // Monotonicity is judged along increasing M, or decreasing eps.
  std::vector<std::size_t> order(params.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return mode == TraceMode::Truncate ? params[a] < params[b] : params[a] > params[b];
  });
  tr.monotone = true;
  for (std::size_t k = 1; k < order.size(); ++k) {
    const std::size_t prev = order[k - 1], cur = order[k];
    if (mode == TraceMode::Truncate ? tr.revenues[cur] < tr.revenues[prev] - 1e-9
                                    : tr.errors[cur] > tr.errors[prev] + 1e-9)
      tr.monotone = false;
  }
  if (mode == TraceMode::Smooth) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t k = 0; k < params.size(); ++k)
      if (tr.errors[k] > 1e-12) pts.emplace_back(std::log(params[k]), std::log(tr.errors[k]));
    if (pts.size() >= 2) {
      double mx = 0.0, my = 0.0;
      for (const auto& [u, v] : pts) {
        mx += u;
        my += v;
      }
      mx /= pts.size();
      my /= pts.size();
      double sxy = 0.0, sxx = 0.0;
      for (const auto& [u, v] : pts) {
        sxy += (u - mx) * (v - my);
        sxx += (u - mx) * (u - mx);
      }
      if (sxx > 0.0) tr.slope = sxy / sxx;
    }
  }
  return tr;
}

}  // namespace sepsell
