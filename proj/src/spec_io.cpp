#include "sepsell/spec_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "sepsell/error.hpp"

namespace sepsell {

namespace {

struct Entry {
  std::string key;
  std::string value;
  int line;
};

struct Section {
  std::string name;
  std::vector<Entry> entries;

  std::vector<const Entry*> all(std::string_view key) const {
    std::vector<const Entry*> out;
    for (const auto& e : entries)
      if (e.key == key) out.push_back(&e);
    return out;
  }

  const Entry* find(std::string_view key) const {
    const auto hits = all(key);
    if (hits.size() > 1)
      throw Error(ErrorKind::Parse, "line " + std::to_string(hits[1]->line) + ": duplicate key '" +
                                        std::string(key) + "'");
    return hits.empty() ? nullptr : hits.front();
  }

  const Entry& require(std::string_view key) const {
    const Entry* e = find(key);
    if (!e) throw Error(ErrorKind::Parse, where() + "missing key '" + std::string(key) + "'");
    return *e;
  }

  void allow_only(std::initializer_list<std::string_view> keys) const {
    const std::set<std::string_view> ok(keys);
    for (const auto& e : entries)
      if (!ok.count(e.key))
        throw Error(ErrorKind::Parse, "line " + std::to_string(e.line) + ": unexpected key '" + e.key + "'");
  }

  std::string where() const { return name.empty() ? "" : "[" + name + "] "; }
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<Section> split_sections(std::string_view text) {
  std::vector<Section> out(1);
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']' || s.size() < 3)
        throw Error(ErrorKind::Parse, "line " + std::to_string(line) + ": malformed section header");
      out.push_back({trim(s.substr(1, s.size() - 2)), {}});
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::Parse, "line " + std::to_string(line) + ": expected 'key = value'");
    Entry e{trim(s.substr(0, eq)), trim(s.substr(eq + 1)), line};
    if (e.key.empty() || e.value.empty())
      throw Error(ErrorKind::Parse, "line " + std::to_string(line) + ": empty key or value");
    out.back().entries.push_back(std::move(e));
  }
  return out;
}

double to_number(const std::string& tok, int line) {
  double v = 0.0;
  const char* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc() || ptr != end || std::isnan(v))
    throw Error(ErrorKind::Parse, "line " + std::to_string(line) + ": bad number '" + tok + "'");
  return v;
}

std::vector<double> numbers(const Entry& e) {
  std::istringstream in(e.value);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) out.push_back(to_number(tok, e.line));
  return out;
}

std::vector<double> numbers(const Entry& e, std::size_t n) {
  auto v = numbers(e);
  if (v.size() != n)
    throw Error(ErrorKind::Parse, "line " + std::to_string(e.line) + ": expected " + std::to_string(n) +
                                      " numbers for '" + e.key + "'");
  return v;
}

double scalar(const Section& s, std::string_view key) { return numbers(s.require(key), 1)[0]; }

int integer(const Section& s, std::string_view key, int fallback) {
  const Entry* e = s.find(key);
  if (!e) return fallback;
  const double v = numbers(*e, 1)[0];
  if (v != std::floor(v) || std::abs(v) > 1e9)
    throw Error(ErrorKind::Parse, "line " + std::to_string(e->line) + ": '" + e->key + "' must be an integer");
  return static_cast<int>(v);
}

const char* shape_name(SegmentShape s) {
  switch (s) {
    case SegmentShape::Constant: return "constant";
    case SegmentShape::Exponential: return "exponential";
    case SegmentShape::InverseSquare: return "inverse_square";
  }
  return "constant";
}

Dist1D parse_dist(const Section& s) {
  const std::string kind = s.require("kind").value;
  if (kind == "atoms") {
    s.allow_only({"kind", "atom"});
    std::vector<Atom> atoms;
    for (const Entry* e : s.all("atom")) {
      const auto v = numbers(*e, 2);
      atoms.push_back({v[0], v[1]});
    }
    if (atoms.empty()) throw Error(ErrorKind::Parse, s.where() + "atoms need at least one 'atom' line");
    return Dist1D::atoms(std::move(atoms));
  }
  if (kind == "piecewise") {
    s.allow_only({"kind", "breakpoints", "densities"});
    return Dist1D::piecewise(numbers(s.require("breakpoints")), numbers(s.require("densities")));
  }
  if (kind == "uniform") {
    s.allow_only({"kind", "a", "b"});
    return Dist1D::uniform(scalar(s, "a"), scalar(s, "b"));
  }
  if (kind == "exponential") {
    s.allow_only({"kind", "rate", "cap"});
    return Dist1D::exponential(scalar(s, "rate"), s.find("cap") ? scalar(s, "cap") : kInf);
  }
  if (kind == "equal_revenue") {
    s.allow_only({"kind", "r", "cap"});
    return Dist1D::equal_revenue(scalar(s, "r"), scalar(s, "cap"));
  }
  if (kind == "mixed") {
    s.allow_only({"kind", "atom", "segment"});
    std::vector<Atom> atoms;
    std::vector<Segment> segs;
    for (const Entry* e : s.all("atom")) {
      const auto v = numbers(*e, 2);
      atoms.push_back({v[0], v[1]});
    }
    for (const Entry* e : s.all("segment")) {
      std::istringstream in(e->value);
      std::string lo, hi, shape, scale, rate;
      if (!(in >> lo >> hi >> shape >> scale >> rate) || (in >> std::ws, !in.eof()))
        throw Error(ErrorKind::Parse, "line " + std::to_string(e->line) + ": segment = lo hi shape scale rate");
      SegmentShape sh;
      if (shape == "constant") {
        sh = SegmentShape::Constant;
      } else if (shape == "exponential") {
        sh = SegmentShape::Exponential;
      } else if (shape == "inverse_square") {
        sh = SegmentShape::InverseSquare;
      } else {
        throw Error(ErrorKind::Parse, "line " + std::to_string(e->line) + ": unknown segment shape '" + shape + "'");
      }
      segs.push_back({to_number(lo, e->line), to_number(hi, e->line), sh, to_number(scale, e->line),
                      to_number(rate, e->line)});
    }
    return Dist1D::mixed(std::move(atoms), std::move(segs));
  }
  throw Error(ErrorKind::Parse, s.where() + "unknown distribution kind '" + kind + "'");
}

void write_line(std::ostringstream& out, std::string_view key, const std::vector<double>& vals) {
  out << key << " =";
  for (double v : vals) out << ' ' << format_number(v);
  out << '\n';
}

void write_dist(std::ostringstream& out, const Dist1D& d) {
  std::visit(
      [&](const auto& rep) {
        using T = std::decay_t<decltype(rep)>;
        if constexpr (std::is_same_v<T, FiniteAtoms>) {
          out << "kind = atoms\n";
          for (const auto& a : rep.atoms) write_line(out, "atom", {a.value, a.mass});
        } else if constexpr (std::is_same_v<T, PiecewiseUniform>) {
          out << "kind = piecewise\n";
          write_line(out, "breakpoints", rep.breakpoints);
          write_line(out, "densities", rep.densities);
        } else if constexpr (std::is_same_v<T, UniformParams>) {
          out << "kind = uniform\n";
          write_line(out, "a", {rep.a});
          write_line(out, "b", {rep.b});
        } else if constexpr (std::is_same_v<T, ExponentialParams>) {
          out << "kind = exponential\n";
          write_line(out, "rate", {rep.rate});
          if (std::isfinite(rep.cap)) write_line(out, "cap", {rep.cap});
        } else if constexpr (std::is_same_v<T, EqualRevenueParams>) {
          out << "kind = equal_revenue\n";
          write_line(out, "r", {rep.r});
          write_line(out, "cap", {rep.cap});
        } else {
          out << "kind = mixed\n";
          for (const auto& a : rep.atoms) write_line(out, "atom", {a.value, a.mass});
          for (const auto& sg : rep.segments) {
            out << "segment = " << format_number(sg.lo) << ' ' << format_number(sg.hi) << ' '
                << shape_name(sg.shape) << ' ' << format_number(sg.scale) << ' ' << format_number(sg.rate)
                << '\n';
          }
        }
      },
      d.representation());
}

const char* family_name(ScanFamily f) {
  switch (f) {
    case ScanFamily::IidAtoms: return "iid_atoms";
    case ScanFamily::IndependentAtoms: return "independent_atoms";
    case ScanFamily::PointMass: return "point_mass";
  }
  return "iid_atoms";
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

Spec parse_spec(std::string_view text) {
  const auto sections = split_sections(text);
  const Section& root = sections.front();
  const std::string kind = root.require("kind").value;

  auto no_sections = [&] {
    if (sections.size() > 1) throw Error(ErrorKind::Parse, "kind '" + kind + "' takes no sections");
  };

  if (kind == "product") {
    root.allow_only({"kind"});
    if (sections.size() != 3 || sections[1].name != "good1" || sections[2].name != "good2")
      throw Error(ErrorKind::Parse, "product needs sections [good1] and [good2], in that order");
    return ProductSpec{parse_dist(sections[1]), parse_dist(sections[2])};
  }
  if (kind == "joint") {
    no_sections();
    root.allow_only({"kind", "point"});
    std::vector<Point2> pts;
    std::vector<double> probs;
    for (const Entry* e : root.all("point")) {
      const auto v = numbers(*e, 3);
      pts.push_back({v[0], v[1]});
      probs.push_back(v[2]);
    }
    if (pts.empty()) throw Error(ErrorKind::Parse, "joint needs at least one 'point' line");
    return FiniteJoint(std::move(pts), std::move(probs));
  }
  if (kind == "measure") {
    no_sections();
    root.allow_only({"kind", "dim", "point"});
    const int dim = integer(root, "dim", 0);
    if (dim < 1) throw Error(ErrorKind::Parse, "measure needs 'dim' >= 1");
    std::vector<std::vector<double>> pts;
    std::vector<double> probs;
    for (const Entry* e : root.all("point")) {
      auto v = numbers(*e, static_cast<std::size_t>(dim) + 1);
      probs.push_back(v.back());
      v.pop_back();
      pts.push_back(std::move(v));
    }
    if (pts.empty()) throw Error(ErrorKind::Parse, "measure needs at least one 'point' line");
    return DiscreteMeasureKD(static_cast<std::size_t>(dim), std::move(pts), std::move(probs));
  }
  if (kind == "menu") {
    no_sections();
    root.allow_only({"kind", "entry"});
    std::vector<MenuEntry> entries;
    for (const Entry* e : root.all("entry")) {
      const auto v = numbers(*e, 3);
      entries.push_back({v[0], v[1], v[2]});
    }
    return MenuMechanism(std::move(entries));
  }
  if (kind == "family") {
    no_sections();
    root.allow_only({"kind", "family", "support_size", "value_max"});
    FamilySpec f;
    const std::string name = root.require("family").value;
    if (name == "iid_atoms") {
      f.family = ScanFamily::IidAtoms;
    } else if (name == "independent_atoms") {
      f.family = ScanFamily::IndependentAtoms;
    } else if (name == "point_mass") {
      f.family = ScanFamily::PointMass;
    } else {
      throw Error(ErrorKind::Parse, "unknown family '" + name + "'");
    }
    f.support_size = integer(root, "support_size", f.support_size);
    if (root.find("value_max")) f.value_max = scalar(root, "value_max");
    if (f.support_size < 1 || !(f.value_max > 0.0))
      throw Error(ErrorKind::BadParams, "family needs support_size >= 1 and value_max > 0");
    return f;
  }
  no_sections();
  return parse_dist(root);
}

Spec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Parse, "cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_spec(buf.str());
}

std::string serialize(const Spec& s) {
  std::ostringstream out;
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Dist1D>) {
          write_dist(out, v);
        } else if constexpr (std::is_same_v<T, ProductSpec>) {
          out << "kind = product\n\n[good1]\n";
          write_dist(out, v.d1);
          out << "\n[good2]\n";
          write_dist(out, v.d2);
        } else if constexpr (std::is_same_v<T, FiniteJoint>) {
          out << "kind = joint\n";
          for (std::size_t k = 0; k < v.size(); ++k)
            write_line(out, "point", {v.points()[k].x1, v.points()[k].x2, v.probs()[k]});
        } else if constexpr (std::is_same_v<T, DiscreteMeasureKD>) {
          out << "kind = measure\ndim = " << v.dim() << '\n';
          for (std::size_t k = 0; k < v.size(); ++k) {
            auto row = v.points()[k];
            row.push_back(v.probs()[k]);
            write_line(out, "point", row);
          }
        } else if constexpr (std::is_same_v<T, MenuMechanism>) {
          out << "kind = menu\n";
          for (const auto& e : v.entries()) write_line(out, "entry", {e.q1, e.q2, e.s});
        } else {
          out << "kind = family\nfamily = " << family_name(v.family) << "\nsupport_size = " << v.support_size
              << '\n';
          write_line(out, "value_max", {v.value_max});
        }
      },
      s);
  return out.str();
}

std::string spec_kind(const Spec& s) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Dist1D>) return std::string(v.kind());
        if constexpr (std::is_same_v<T, ProductSpec>) return "product";
        if constexpr (std::is_same_v<T, FiniteJoint>) return "joint";
        if constexpr (std::is_same_v<T, DiscreteMeasureKD>) return "measure";
        if constexpr (std::is_same_v<T, MenuMechanism>) return "menu";
        return "family";
      },
      s);
}

FiniteJoint to_joint(const Spec& s, int grid) {
  if (const auto* p = std::get_if<ProductSpec>(&s)) {
    auto atomic = [&](const Dist1D& d) { return d.has_density() ? discretize(d, grid) : d; };
    return FiniteJoint::product(atomic(p->d1), atomic(p->d2));
  }
  if (const auto* j = std::get_if<FiniteJoint>(&s)) return *j;
  throw Error(ErrorKind::Parse, "expected a product or joint spec, got '" + spec_kind(s) + "'");
}

}  // namespace sepsell
