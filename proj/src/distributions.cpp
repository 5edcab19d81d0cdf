#include "sepsell/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "accurate_sum.hpp"
#include "sepsell/error.hpp"

namespace sepsell {

namespace {

constexpr double kMassTol = 1e-12;

// exp(-rate * (t - lo)), zero at infinity.
double decay(double rate, double lo, double t) {
  if (std::isinf(t)) return 0.0;
  return std::exp(-rate * (t - lo));
}

std::vector<Atom> canonical_atoms(std::vector<Atom> atoms) {
  for (const auto& a : atoms) {
    if (!std::isfinite(a.value) || a.value < 0.0)
      throw Error(ErrorKind::BadParams, "atom values must be finite and nonnegative");
    if (!std::isfinite(a.mass) || a.mass < 0.0 || a.mass > 1.0 + kMassTol)
      throw Error(ErrorKind::BadParams, "atom masses must lie in [0, 1]");
  }
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& x, const Atom& y) { return x.value < y.value; });
  std::vector<Atom> out;
  for (const auto& a : atoms) {
    if (a.mass == 0.0) continue;
    if (!out.empty() && out.back().value == a.value) {
      out.back().mass += a.mass;
    } else {
      out.push_back(a);
    }
  }
  return out;
}

void validate_segments(std::vector<Segment>& segments) {
  std::sort(segments.begin(), segments.end(),
            [](const Segment& x, const Segment& y) { return x.lo < y.lo; });
  for (std::size_t k = 0; k < segments.size(); ++k) {
    const auto& s = segments[k];
    if (!(s.lo >= 0.0) || !(s.hi > s.lo) || !std::isfinite(s.lo))
      throw Error(ErrorKind::BadParams, "segment bounds must satisfy 0 <= lo < hi");
    if (!(s.scale >= 0.0) || !std::isfinite(s.scale))
      throw Error(ErrorKind::BadParams, "segment scale must be finite and nonnegative");
    if (s.shape == SegmentShape::Exponential && !(s.rate > 0.0))
      throw Error(ErrorKind::BadParams, "exponential segment needs a positive rate");
    if (s.shape == SegmentShape::InverseSquare && !(s.lo > 0.0))
      throw Error(ErrorKind::BadParams, "inverse-square segment must start above 0");
    if (s.shape != SegmentShape::Exponential && std::isinf(s.hi))
      throw Error(ErrorKind::BadParams, "only exponential segments may be unbounded");
    if (k > 0 && segments[k - 1].hi > s.lo + 1e-12 * std::max(1.0, s.lo))
      throw Error(ErrorKind::BadParams, "segments overlap");
  }
}

double total_mass(const std::vector<Atom>& atoms, const std::vector<Segment>& segments) {
  detail::AccurateSum m;
  for (const auto& a : atoms) m.add(a.mass);
  for (const auto& s : segments) m.add(s.mass(s.lo, s.hi));
  return m.value();
}

}  // namespace

double Segment::density(double t) const {
  switch (shape) {
    case SegmentShape::Constant: return scale;
    case SegmentShape::Exponential: return scale * decay(rate, lo, t);
    case SegmentShape::InverseSquare: return scale / (t * t);
  }
  return 0.0;
}

double Segment::mass(double a, double b) const {
  if (b <= a) return 0.0;
  switch (shape) {
    case SegmentShape::Constant: return scale * (b - a);
    case SegmentShape::Exponential: {
      const double ea = decay(rate, lo, a);
      if (std::isinf(b)) return scale / rate * ea;
      return -scale / rate * ea * std::expm1(-rate * (b - a));
    }
    case SegmentShape::InverseSquare: return scale * (b - a) / (a * b);
  }
  return 0.0;
}

double Segment::moment(double a, double b) const {
  if (b <= a) return 0.0;
  switch (shape) {
    case SegmentShape::Constant: return scale * (b - a) * (b + a) / 2.0;
    case SegmentShape::Exponential: {
      const double inv = 1.0 / rate;
      double m = (a * inv + inv * inv) * decay(rate, lo, a);
      if (!std::isinf(b)) m -= (b * inv + inv * inv) * decay(rate, lo, b);
      return scale * m;
    }
    case SegmentShape::InverseSquare: return scale * std::log(b / a);
  }
  return 0.0;
}

Dist1D::Dist1D(Representation rep, std::vector<Atom> atoms, std::vector<Segment> segments)
    : rep_(std::move(rep)), atoms_(canonical_atoms(std::move(atoms))), segments_(std::move(segments)) {
  validate_segments(segments_);
  if (atoms_.empty() && segments_.empty())
    throw Error(ErrorKind::BadParams, "distribution has no mass");
  const double m = total_mass(atoms_, segments_);
  if (std::abs(m - 1.0) > kMassTol) {
    std::ostringstream os;
    os.precision(17);
    os << "total mass " << m << " differs from 1";
    throw Error(ErrorKind::BadParams, os.str());
  }
}

Dist1D Dist1D::atoms(std::vector<Atom> atoms) {
  auto canon = canonical_atoms(atoms);
  return Dist1D(FiniteAtoms{canon}, canon, {});
}

Dist1D Dist1D::piecewise(std::vector<double> breakpoints, std::vector<double> densities) {
  if (breakpoints.size() < 2 || densities.size() + 1 != breakpoints.size())
    throw Error(ErrorKind::BadParams, "piecewise needs n+1 breakpoints for n densities");
  for (std::size_t k = 0; k + 1 < breakpoints.size(); ++k) {
    if (!(breakpoints[k] < breakpoints[k + 1]))
      throw Error(ErrorKind::BadParams, "breakpoints must be strictly increasing");
  }
  if (!(breakpoints.front() >= 0.0) || !std::isfinite(breakpoints.back()))
    throw Error(ErrorKind::BadParams, "breakpoints must be finite and nonnegative");
  std::vector<Segment> segs;
  for (std::size_t k = 0; k < densities.size(); ++k) {
    if (!(densities[k] >= 0.0) || !std::isfinite(densities[k]))
      throw Error(ErrorKind::BadParams, "densities must be finite and nonnegative");
    if (densities[k] > 0.0)
      segs.push_back({breakpoints[k], breakpoints[k + 1], SegmentShape::Constant, densities[k]});
  }
  return Dist1D(PiecewiseUniform{std::move(breakpoints), std::move(densities)}, {}, std::move(segs));
}

Dist1D Dist1D::uniform(double a, double b) {
  if (!(a >= 0.0) || !(b > a) || !std::isfinite(b))
    throw Error(ErrorKind::BadParams, "uniform needs 0 <= a < b < inf");
  return Dist1D(UniformParams{a, b}, {},
                {Segment{a, b, SegmentShape::Constant, 1.0 / (b - a)}});
}

Dist1D Dist1D::exponential(double rate, double cap) {
  if (!(rate > 0.0) || !std::isfinite(rate) || !(cap > 0.0))
    throw Error(ErrorKind::BadParams, "exponential needs rate > 0 and cap > 0");
  std::vector<Atom> atoms;
  if (std::isfinite(cap)) atoms.push_back({cap, std::exp(-rate * cap)});
  return Dist1D(ExponentialParams{rate, cap}, std::move(atoms),
                {Segment{0.0, cap, SegmentShape::Exponential, rate, rate}});
}

Dist1D Dist1D::equal_revenue(double r, double cap) {
  if (!(r > 0.0) || !(cap > r) || !std::isfinite(cap))
    throw Error(ErrorKind::BadParams, "equal_revenue needs 0 < r < cap < inf");
  return Dist1D(EqualRevenueParams{r, cap}, {{cap, r / cap}},
                {Segment{r, cap, SegmentShape::InverseSquare, r}});
}

Dist1D Dist1D::mixed(std::vector<Atom> atoms, std::vector<Segment> segments) {
  validate_segments(segments);
  auto canon = canonical_atoms(atoms);
  return Dist1D(MixedParams{canon, segments}, canon, segments);
}

std::string_view Dist1D::kind() const {
  struct Visitor {
    std::string_view operator()(const FiniteAtoms&) const { return "atoms"; }
    std::string_view operator()(const PiecewiseUniform&) const { return "piecewise"; }
    std::string_view operator()(const UniformParams&) const { return "uniform"; }
    std::string_view operator()(const ExponentialParams&) const { return "exponential"; }
    std::string_view operator()(const EqualRevenueParams&) const { return "equal_revenue"; }
    std::string_view operator()(const MixedParams&) const { return "mixed"; }
  };
  return std::visit(Visitor{}, rep_);
}

double Dist1D::support_lower() const {
  double lo = kInf;
  if (!atoms_.empty()) lo = atoms_.front().value;
  if (!segments_.empty()) lo = std::min(lo, segments_.front().lo);
  return lo;
}

double Dist1D::support_upper() const {
  double hi = 0.0;
  if (!atoms_.empty()) hi = atoms_.back().value;
  if (!segments_.empty()) hi = std::max(hi, segments_.back().hi);
  return hi;
}

std::vector<double> Dist1D::breakpoints() const {
  std::vector<double> out;
  for (const auto& a : atoms_) out.push_back(a.value);
  for (const auto& s : segments_) {
    out.push_back(s.lo);
    if (std::isfinite(s.hi)) out.push_back(s.hi);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double cdf(const Dist1D& d, double t) {
  if (t < 0.0) return 0.0;
  double p = 0.0;
  for (const auto& a : d.atom_part()) {
    if (a.value > t) break;
    p += a.mass;
  }
  for (const auto& s : d.segments()) {
    if (s.lo >= t) break;
    p += s.mass(s.lo, std::min(s.hi, t));
  }
  return std::clamp(p, 0.0, 1.0);
}

double tail(const Dist1D& d, double t) {
  if (t <= 0.0) return 1.0;
  double p = 0.0;
  for (const auto& a : d.atom_part()) {
    if (a.value >= t) p += a.mass;
  }
  for (const auto& s : d.segments()) {
    if (s.hi <= t) continue;
    p += s.mass(std::max(s.lo, t), s.hi);
  }
  return std::clamp(p, 0.0, 1.0);
}

double density(const Dist1D& d, double t) {
  double f = 0.0;
  for (const auto& s : d.segments()) {
    if (s.lo <= t && t < s.hi) f += s.density(t);
  }
  return f;
}

double atom_mass(const Dist1D& d, double t) {
  for (const auto& a : d.atom_part()) {
    if (a.value == t) return a.mass;
  }
  return 0.0;
}

double cumtail(const Dist1D& d, double t) {
  if (t <= 0.0) return 0.0;
  double h = 0.0;
  for (const auto& a : d.atom_part()) h += a.mass * std::min(a.value, t);
  for (const auto& s : d.segments()) {
    if (t >= s.hi) {
      h += s.moment(s.lo, s.hi);
    } else if (t > s.lo) {
      h += s.moment(s.lo, t) + t * s.mass(t, s.hi);
    } else {
      h += t * s.mass(s.lo, s.hi);
    }
  }
  return h;
}

double mean(const Dist1D& d) {
  double m = 0.0;
  for (const auto& a : d.atom_part()) m += a.mass * a.value;
  for (const auto& s : d.segments()) m += s.moment(s.lo, s.hi);
  if (!std::isfinite(m)) throw Error(ErrorKind::Infinite, "mean is infinite");
  return m;
}

double posted_revenue(const Dist1D& d, double price) { return price * tail(d, price); }

MyersonSolution myerson_optimal(const Dist1D& d) {
  std::vector<double> events = d.breakpoints();
  events.insert(events.begin(), 0.0);
  std::sort(events.begin(), events.end());
  events.erase(std::unique(events.begin(), events.end()), events.end());

  std::vector<double> candidates = events;

  // Interior stationary points of p * G(p) on each open interval between
  // events; G has no jumps there and a single density shape.
  auto interval_candidates = [&](double left, double right) {
    const Segment* seg = nullptr;
    for (const auto& s : d.segments()) {
      if (s.lo <= left && s.hi >= right) {
        seg = &s;
        break;
      }
    }
    if (seg == nullptr) return;
    switch (seg->shape) {
      case SegmentShape::Constant: {
        const double c = std::isinf(right) ? 0.0 : tail(d, right);
        const double p = (c + seg->scale * right) / (2.0 * seg->scale);
        if (p > left && p < right) candidates.push_back(p);
        break;
      }
      case SegmentShape::Exponential: {
        // g'(p) = G(p) - p f(p) is decreasing where g is concave (p < 2/rate).
        const double concave_end = std::min(right, 2.0 / seg->rate);
        if (concave_end <= left) return;
        auto slope = [&](double p) { return tail(d, p) - p * seg->density(p); };
        double lo = left, hi = concave_end;
        if (!(slope(lo) > 0.0) || !(slope(hi) < 0.0)) return;
        for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
          const double mid = 0.5 * (lo + hi);
          (slope(mid) > 0.0 ? lo : hi) = mid;
        }
        candidates.push_back(0.5 * (lo + hi));
        break;
      }
      case SegmentShape::InverseSquare:
        // p * G(p) is affine on the interval: endpoints suffice.
        break;
    }
  };
  for (std::size_t k = 0; k + 1 < events.size(); ++k) interval_candidates(events[k], events[k + 1]);
  if (std::isinf(d.support_upper())) interval_candidates(events.back(), kInf);

  std::sort(candidates.begin(), candidates.end());
  double best = 0.0;
  for (double p : candidates) best = std::max(best, posted_revenue(d, p));
  const double tol = 1e-12 * std::max(1.0, best);
  for (double p : candidates) {
    const double v = posted_revenue(d, p);
    if (v >= best - tol) return {p, v};
  }
  return {0.0, 0.0};
}

double virtual_value(const Dist1D& d, double t) {
  if (!d.has_density()) throw Error(ErrorKind::NoDensity, "virtual value needs a density");
  const double f = density(d, t);
  if (!(f > 0.0)) throw Error(ErrorKind::ZeroDensity, "density vanishes at t");
  return t - tail(d, t) / f;
}

bool is_weakly_regular(const Dist1D& d, int grid_n) {
  if (!d.has_density()) throw Error(ErrorKind::NoDensity, "regularity needs a density");
  if (grid_n < 2) throw Error(ErrorKind::BadParams, "grid_n must be at least 2");
  const auto segs = d.segments();
  for (std::size_t k = 0; k < segs.size(); ++k) {
    if (!(segs[k].scale > 0.0)) return false;
    if (k > 0 && std::abs(segs[k].lo - segs[k - 1].hi) > 1e-12 * std::max(1.0, segs[k].lo))
      return false;  // support is not an interval
  }
  const double lo = segs.front().lo;
  const double hi = segs.back().hi;
  // Atoms are tolerated only as a cap at the top of the continuous support.
  for (const auto& a : d.atom_part()) {
    if (a.value < hi) return false;
  }
  double top = hi;
  if (std::isinf(top)) top = lo + 40.0 / segs.back().rate;

  struct Sample {
    double t;
    int order;  // left limits sort before values at the same t
    double value;
  };
  std::vector<Sample> samples;
  for (int k = 0; k < grid_n; ++k) {
    const double t = lo + (top - lo) * static_cast<double>(k) / grid_n;
    if (t >= hi) break;
    samples.push_back({t, 1, virtual_value(d, t)});
  }
  for (const auto& s : segs) {
    samples.push_back({s.lo, 1, virtual_value(d, s.lo)});
    if (std::isfinite(s.hi)) samples.push_back({s.hi, 0, s.hi - tail(d, s.hi) / s.density(s.hi)});
  }
  std::sort(samples.begin(), samples.end(), [](const Sample& x, const Sample& y) {
    return x.t < y.t || (x.t == y.t && x.order < y.order);
  });
  for (std::size_t k = 1; k < samples.size(); ++k) {
    if (samples[k].value < samples[k - 1].value - 1e-9) return false;
  }
  return true;
}

double tau(const Dist1D& d, double r) {
  if (!(r > 0.0)) throw Error(ErrorKind::BadParams, "tau needs r > 0");
  const double m = mean(d);
  if (m < r - 1e-15 * std::max(1.0, r))
    throw Error(ErrorKind::Unreachable, "E[X] < r, so H never reaches r");
  const double target = r - 1e-13 * std::max(1.0, r);
  double lo = 0.0;
  double hi = d.support_upper();
  if (std::isinf(hi)) {
    hi = std::max(1.0, r);
    for (int it = 0; it < 2000 && cumtail(d, hi) < target; ++it) hi *= 2.0;
  }
  for (int it = 0; it < 400 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (cumtail(d, mid) >= target ? hi : lo) = mid;
  }
  return hi;
}

Dist1D equal_revenue(double r, double cap) { return Dist1D::equal_revenue(r, cap); }

Dist1D truncate(const Dist1D& d, double M) {
  if (!(M > 0.0)) throw Error(ErrorKind::BadParams, "truncation level must be positive");
  const double above = 1.0 - cdf(d, M);
  if (!(above > 0.0)) return d;
  std::vector<Atom> atoms{{0.0, above}};
  for (const auto& a : d.atom_part()) {
    if (a.value <= M) atoms.push_back(a);
  }
  if (d.segments().empty()) return Dist1D::atoms(std::move(atoms));
  std::vector<Segment> segs;
  for (auto s : d.segments()) {
    if (s.lo >= M) continue;
    s.hi = std::min(s.hi, M);
    segs.push_back(s);
  }
  return Dist1D::mixed(std::move(atoms), std::move(segs));
}

Dist1D smooth(const Dist1D& d, double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw Error(ErrorKind::BadParams, "eps must be positive");
  if (!std::holds_alternative<FiniteAtoms>(d.representation()))
    throw Error(ErrorKind::UnsupportedRepresentation, "smoothing applies to atomic distributions");
  std::vector<double> bounds;
  for (const auto& a : d.atom_part()) {
    bounds.push_back(a.value);
    bounds.push_back(a.value + eps);
  }
  std::sort(bounds.begin(), bounds.end());
  bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());
  auto index_of = [&](double v) {
    return static_cast<std::size_t>(std::lower_bound(bounds.begin(), bounds.end(), v) - bounds.begin());
  };
  std::vector<double> delta(bounds.size(), 0.0);
  for (const auto& a : d.atom_part()) {
    delta[index_of(a.value)] += a.mass / eps;
    delta[index_of(a.value + eps)] -= a.mass / eps;
  }
  std::vector<double> densities(bounds.size() - 1);
  double running = 0.0;
  for (std::size_t k = 0; k + 1 < bounds.size(); ++k) {
    running += delta[k];
    densities[k] = std::max(0.0, running);
    if (densities[k] < 1e-12 * (1.0 / eps)) densities[k] = 0.0;
  }
  return Dist1D::piecewise(std::move(bounds), std::move(densities));
}

Dist1D scale(const Dist1D& d, double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor))
    throw Error(ErrorKind::BadParams, "scale factor must be positive");
  const double c = factor;
  struct Visitor {
    double c;
    Dist1D operator()(const FiniteAtoms& x) const {
      auto atoms = x.atoms;
      for (auto& a : atoms) a.value *= c;
      return Dist1D::atoms(std::move(atoms));
    }
    Dist1D operator()(const PiecewiseUniform& x) const {
      auto b = x.breakpoints;
      auto f = x.densities;
      for (auto& v : b) v *= c;
      for (auto& v : f) v /= c;
      return Dist1D::piecewise(std::move(b), std::move(f));
    }
    Dist1D operator()(const UniformParams& x) const { return Dist1D::uniform(x.a * c, x.b * c); }
    Dist1D operator()(const ExponentialParams& x) const {
      return Dist1D::exponential(x.rate / c, x.cap * c);
    }
    Dist1D operator()(const EqualRevenueParams& x) const {
      return Dist1D::equal_revenue(x.r * c, x.cap * c);
    }
    Dist1D operator()(const MixedParams& x) const {
      auto atoms = x.atoms;
      for (auto& a : atoms) a.value *= c;
      auto segs = x.segments;
      for (auto& s : segs) {
        s.lo *= c;
        s.hi *= c;
        switch (s.shape) {
          case SegmentShape::Constant: s.scale /= c; break;
          case SegmentShape::Exponential:
            s.scale /= c;
            s.rate /= c;
            break;
          case SegmentShape::InverseSquare: s.scale *= c; break;
        }
      }
      return Dist1D::mixed(std::move(atoms), std::move(segs));
    }
  };
  return std::visit(Visitor{c}, d.representation());
}

Dist1D cap(const Dist1D& d, double c) {
  if (!(c > 0.0)) throw Error(ErrorKind::BadParams, "cap must be positive");
  if (c >= d.support_upper()) return d;
  if (const auto* e = std::get_if<ExponentialParams>(&d.representation()))
    return Dist1D::exponential(e->rate, std::min(e->cap, c));
  if (const auto* er = std::get_if<EqualRevenueParams>(&d.representation()); er && c > er->r)
    return Dist1D::equal_revenue(er->r, c);
  std::vector<Atom> atoms{{c, tail(d, c)}};
  for (const auto& a : d.atom_part()) {
    if (a.value < c) atoms.push_back(a);
  }
  std::vector<Segment> segs;
  for (auto s : d.segments()) {
    if (s.lo >= c) continue;
    s.hi = std::min(s.hi, c);
    segs.push_back(s);
  }
  if (segs.empty()) return Dist1D::atoms(std::move(atoms));
  return Dist1D::mixed(std::move(atoms), std::move(segs));
}

Dist1D discretize(const Dist1D& d, int cells) {
  if (cells < 1) throw Error(ErrorKind::BadParams, "need at least one cell");
  if (!d.has_density()) return Dist1D::atoms({d.atom_part().begin(), d.atom_part().end()});
  const double lo = d.support_lower();
  const double hi = d.support_upper();
  if (std::isinf(hi)) throw Error(ErrorKind::BadParams, "discretization needs bounded support; cap first");
  const double width = (hi - lo) / cells;
  std::vector<double> mass(cells, 0.0), moment(cells, 0.0);
  for (const auto& s : d.segments()) {
    for (int k = 0; k < cells; ++k) {
      const double a = std::max(s.lo, lo + width * k);
      const double b = std::min(s.hi, k + 1 == cells ? hi : lo + width * (k + 1));
      if (b <= a) continue;
      mass[k] += s.mass(a, b);
      moment[k] += s.moment(a, b);
    }
  }
  std::vector<Atom> atoms(d.atom_part().begin(), d.atom_part().end());
  for (int k = 0; k < cells; ++k) {
    if (mass[k] > 0.0) {
      const double cell_lo = lo + width * k;
      const double cell_hi = k + 1 == cells ? hi : lo + width * (k + 1);
      atoms.push_back({std::clamp(moment[k] / mass[k], cell_lo, cell_hi), mass[k]});
    }
  }
  return Dist1D::atoms(std::move(atoms));
}

}  // namespace sepsell
