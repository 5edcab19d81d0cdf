#include "sepsell/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "sepsell/bounds.hpp"
#include "sepsell/continuity.hpp"
#include "sepsell/error.hpp"
#include "sepsell/optrev.hpp"
#include "sepsell/spec_io.hpp"
#include "sepsell/verification.hpp"

namespace sepsell {

namespace {

using Json = nlohmann::ordered_json;

struct RunConfig {
  std::string input;
  std::string input2;
  std::uint64_t seed = 0;
  int grid = 0;  // 0: command default
  double tol = 1e-6;
  std::string out;
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  double cap = kInf;
  int budget = 1000;
  bool regular = false;
  std::string fixtures;
};

Json header(const std::string& command) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = command;
  return j;
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

/// Files are written only once everything has been computed, each through a
/// temporary name so that readers never see a partial file.
void write_outputs(const std::string& dir, const std::vector<std::pair<std::string, std::string>>& files) {
  if (dir.empty()) return;
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  for (const auto& [name, content] : files) {
    const fs::path target = fs::path(dir) / name;
    const fs::path tmp = fs::path(dir) / ("." + name + ".tmp");
    {
      std::ofstream f(tmp, std::ios::binary);
      if (!f) throw Error(ErrorKind::Parse, "cannot write '" + tmp.string() + "'");
      f << content;
    }
    fs::rename(tmp, target);
  }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Dist1D bounded(const Dist1D& d, double cap_at, int good) {
  if (std::isfinite(cap_at) && d.support_upper() > cap_at) return cap(d, cap_at);
  if (std::isinf(d.support_upper()))
    throw Error(ErrorKind::BadParams, "good " + std::to_string(good) + " has unbounded support; pass --cap");
  return d;
}

int cmd_price(const RunConfig& cfg, std::ostream& out) {
  const Spec s = load_spec(cfg.input);
  const auto* d = std::get_if<Dist1D>(&s);
  if (!d) throw Error(ErrorKind::Parse, "price expects a distribution spec, got '" + spec_kind(s) + "'");
  const auto m = myerson_optimal(*d);
  Json j = header("price");
  j["kind"] = std::string(d->kind());
  j["price"] = m.price;
  j["revenue"] = m.revenue;
  if (d->has_density()) j["weakly_regular"] = is_weakly_regular(*d);
  out << dump(j);
  write_outputs(cfg.out, {{"price.json", dump(j)}});
  return kExitOk;
}

int cmd_ratio(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Spec s = load_spec(cfg.input);
  const int grid = cfg.grid > 0 ? cfg.grid : 12;
  const FiniteJoint joint = to_joint(s, grid);
  bool regular = cfg.regular;
  if (regular) {
    if (const auto* p = std::get_if<ProductSpec>(&s)) {
      for (const Dist1D* d : {&p->d1, &p->d2}) {
        if (d->has_density() && !is_weakly_regular(*d)) {
          err << "warning: a marginal is not weakly regular; using the general guarantee\n";
          regular = false;
          break;
        }
      }
    }
  }
  const RatioReport r = ratio_report(joint, regular);
  const OptRevSolution sol = rev_lp(joint);
  Json j = header("ratio");
  j["points"] = joint.size();
  j["independent"] = joint.is_independent();
  j["srev"] = r.srev;
  j["rev"] = r.rev;
  j["monrev"] = r.monrev;
  j["ratio"] = r.ratio;
  j["guarantee"] = optional_number(r.guarantee);
  j["slack"] = optional_number(r.slack);
  const bool violated = r.slack && *r.slack < -1e-6;
  j["status"] = violated ? "guarantee-violation" : "ok";

  std::ostringstream csv;
  csv << "x1,x2,prob,q1,q2,s,b\n";
  for (std::size_t k = 0; k < joint.size(); ++k) {
    csv << format_number(joint.points()[k].x1) << ',' << format_number(joint.points()[k].x2) << ','
        << format_number(joint.probs()[k]) << ',' << format_number(sol.q1[k]) << ',' << format_number(sol.q2[k])
        << ',' << format_number(sol.s[k]) << ',' << format_number(sol.b[k]) << '\n';
  }
  out << dump(j);
  write_outputs(cfg.out, {{"ratio.json", dump(j)}, {"ratio_solution.csv", csv.str()}});
  return violated ? kExitGuarantee : kExitOk;
}

Json certificate_json(const BoundCertificate& c) {
  Json j;
  j["which"] = to_string(c.which);
  j["lambda1"] = c.lambda1;
  j["lambda2"] = c.lambda2;
  j["R1"] = c.R1;
  j["R2"] = c.R2;
  j["k_term"] = c.k_term;
  j["k_term_bound"] = c.k_term_bound;
  j["instance_bound"] = c.instance_bound;
  j["total_bound"] = c.total_bound;
  j["argmax"] = {{"a", c.argmax.a},
                 {"b", std::isfinite(c.argmax.b) ? Json(c.argmax.b) : Json("inf")},
                 {"c", std::isfinite(c.argmax.c) ? Json(c.argmax.c) : Json("inf")}};
  return j;
}

int cmd_bounds(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Spec s = load_spec(cfg.input);
  const auto* ps = std::get_if<ProductSpec>(&s);
  if (!ps) throw Error(ErrorKind::Parse, "bounds expects a product spec, got '" + spec_kind(s) + "'");
  if (cfg.lambda1 > cfg.lambda2)
    throw Error(ErrorKind::BadOrdering, "need lambda1 <= lambda2 (swap the goods instead)");
  const GoodPair pair(bounded(ps->d1, cfg.cap, 1), bounded(ps->d2, cfg.cap, 2));
  const int grid = cfg.grid > 0 ? cfg.grid : 400;

  const BoundCertificate general = certificate(pair, cfg.lambda1, cfg.lambda2, BoundKind::General, grid);
  std::vector<BoundCertificate> certs{general};
  const auto ns = nonsymmetric_bounds(general.R1, general.R2);
  auto variant = [&](BoundKind k, double total) {
    BoundCertificate c = general;
    c.which = k;
    c.total_bound = total;
    certs.push_back(c);
  };
  bool suppressed = false;
  if (cfg.regular) {
    if (is_weakly_regular(pair.dist(1)) && is_weakly_regular(pair.dist(2))) {
      variant(BoundKind::Regular, theorem_regular_bound(general.R1, general.R2));
    } else {
      err << "warning: --regular given but a marginal is not weakly regular; regular bound suppressed\n";
      suppressed = true;
    }
  }
  variant(BoundKind::Nonsymmetric, ns.appendix_b);
  variant(BoundKind::Footnote, ns.footnote);

  Json j = header("bounds");
  j["r1"] = pair.r(1);
  j["r2"] = pair.r(2);
  j["tau1"] = pair.tau(1);
  j["tau2"] = pair.tau(2);
  j["upper"] = pair.upper();
  j["chain_bound"] = theorem_general_bound(general.R1, general.R2).chain;
  j["regular_suppressed"] = suppressed;
  j["certificates"] = Json::array();
  for (const auto& c : certs) j["certificates"].push_back(certificate_json(c));
  j["k_term_ok"] = general.k_term <= general.k_term_bound + 1e-6;

  // K, L and the maximizing extreme phi, on the pair in rescaled units (the
  // one sup_i was evaluated on).
  const double l1 = cfg.lambda1, l2 = cfg.lambda2;
  const GoodPair sp = l1 == 1.0 && l2 == 1.0 ? pair : GoodPair(scale(pair.dist(1), 1.0 / l1), scale(pair.dist(2), 1.0 / l2));
  const auto& am = general.argmax;
  std::ostringstream csv;
  csv << "t,K1,K2,L1,L2,phi1,phi2\n";
  const int samples = 400;
  for (int k = 0; k <= samples; ++k) {
    const double t = sp.upper() * k / samples;
    const double K1 = k_fun(sp, 1, t), K2 = k_fun(sp, 2, t);
    double phi1 = 0.0, phi2 = 0.0;
    if (t >= am.c) {
      phi1 = phi2 = l1;
    } else if (t >= am.a) {
      (K1 >= K2 ? phi1 : phi2) = l1;
    }
    if (t >= am.b) phi2 += l2 - l1;
    csv << format_number(t) << ',' << format_number(K1) << ',' << format_number(K2) << ','
        << format_number(l_fun(sp, 1, t)) << ',' << format_number(l_fun(sp, 2, t)) << ',' << format_number(phi1)
        << ',' << format_number(phi2) << '\n';
  }
  out << dump(j);
  write_outputs(cfg.out, {{"bounds.json", dump(j)}, {"bounds_trace.csv", csv.str()}});
  return kExitOk;
}

Json sample_json(const ScanSample& s) {
  return Json{{"iteration", s.iteration}, {"phase", s.phase}, {"values1", s.values1}, {"probs1", s.probs1},
              {"values2", s.values2},     {"probs2", s.probs2}, {"srev", s.srev},      {"rev", s.rev},
              {"ratio", s.ratio}};
}

int cmd_scan(const RunConfig& cfg, std::ostream& out) {
  const Spec s = load_spec(cfg.input);
  const auto* fam = std::get_if<FamilySpec>(&s);
  if (!fam) throw Error(ErrorKind::Parse, "scan expects a family spec, got '" + spec_kind(s) + "'");
  if (cfg.budget < 0) throw Error(ErrorKind::BadParams, "budget must be nonnegative");
  const ScanResult r = scan_worst_ratio(*fam, cfg.budget, cfg.seed);
  Json j = header("scan");
  j["seed"] = cfg.seed;
  j["budget"] = cfg.budget;
  j["samples"] = r.trace.size();
  j["best"] = r.best ? sample_json(*r.best) : Json(nullptr);
  out << dump(j);
  write_outputs(cfg.out, {{"scan.json", dump(j)}, {"scan_trace.csv", scan_trace_csv(r)}});
  return kExitOk;
}

DiscreteMeasureKD load_measure(const std::string& path) {
  const Spec s = load_spec(path);
  if (const auto* m = std::get_if<DiscreteMeasureKD>(&s)) return *m;
  if (const auto* j = std::get_if<FiniteJoint>(&s)) return DiscreteMeasureKD::from_joint(*j);
  throw Error(ErrorKind::Parse, "expected a measure or joint spec in '" + path + "'");
}

int cmd_prohorov(const RunConfig& cfg, std::ostream& out) {
  const DiscreteMeasureKD a = load_measure(cfg.input), b = load_measure(cfg.input2);
  const ProhorovResult r = prohorov(a, b);
  Json j = header("prohorov");
  j["distance"] = r.distance;
  j["transport_above"] = r.transport_above;
  if (r.witness) {
    const auto& w = *r.witness;
    j["witness"] = {{"rho", w.rho},   {"from", w.from_first ? "first" : "second"},
                    {"atoms", w.atoms}, {"mass", w.mass},
                    {"neighborhood", w.neighborhood}};
  } else {
    j["witness"] = nullptr;
  }
  out << dump(j);
  write_outputs(cfg.out, {{"prohorov.json", dump(j)}});
  return kExitOk;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  VerifyOptions opts;
  opts.seed = cfg.seed;
  opts.fixture_dir = cfg.fixtures;
  const auto results = run_acceptance(opts, [&](const CriterionResult& r) { out << format_result(r) << std::endl; });
  Json j = header("verify");
  j["seed"] = cfg.seed;
  j["criteria"] = Json::array();
  bool all = true;
  for (const auto& r : results) {
    all = all && r.pass;
    j["criteria"].push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
  }
  j["pass"] = all;
  out << (all ? "all criteria passed" : "some criteria FAILED") << '\n';
  write_outputs(cfg.out, {{"verify.json", dump(j)}});
  return all ? kExitOk : kExitGuarantee;
}

int cmd_format(const RunConfig& cfg, std::ostream& out) {
  out << serialize(load_spec(cfg.input));
  return kExitOk;
}

int exit_code_for(ErrorKind k) {
  return k == ErrorKind::IterationLimit || k == ErrorKind::Degenerate ? kExitSolver : kExitInput;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Separate versus optimal selling of two goods: revenue LPs, bounds and checks", "sepsell"};
  app.require_subcommand(1);

  auto add_out = [&](CLI::App* c) { c->add_option("--out", cfg.out, "Directory for JSON and CSV outputs"); };

  auto* price = app.add_subcommand("price", "Myerson price and revenue of a distribution spec");
  price->add_option("file", cfg.input, "Distribution spec")->required();
  add_out(price);

  auto* ratio = app.add_subcommand("ratio", "SRev, Rev, MonRev and the guarantee slack of an instance");
  ratio->add_option("file", cfg.input, "Product or joint spec")->required();
  ratio->add_option("--grid", cfg.grid, "Cells per marginal when discretizing densities (default 12)")
      ->check(CLI::PositiveNumber);
  ratio->add_flag("--regular", cfg.regular, "Compare against the regular-marginals guarantee");
  add_out(ratio);

  auto* bounds = app.add_subcommand("bounds", "Bound certificates and K/L traces for a density pair");
  bounds->add_option("file", cfg.input, "Product spec with density marginals")->required();
  bounds->add_option("--lambda1", cfg.lambda1, "lambda1 in (0, 1]")->check(CLI::Range(0.0, 1.0));
  bounds->add_option("--lambda2", cfg.lambda2, "lambda2 in (0, 1], at least lambda1")->check(CLI::Range(0.0, 1.0));
  bounds->add_option("--cap", cfg.cap, "Cap applied to marginals extending beyond it")->check(CLI::PositiveNumber);
  bounds->add_option("--grid", cfg.grid, "Cut grid of the sup search (default 400)")->check(CLI::PositiveNumber);
  bounds->add_flag("--regular", cfg.regular, "Also certify the regular bound");
  add_out(bounds);

  auto* scan = app.add_subcommand("scan", "Random and local search for the worst SRev/Rev ratio");
  scan->add_option("file", cfg.input, "Family spec")->required();
  scan->add_option("--budget", cfg.budget, "Number of instances to evaluate");
  scan->add_option("--seed", cfg.seed, "Random seed");
  add_out(scan);

  auto* proh = app.add_subcommand("prohorov", "Prohorov distance between two finite measures");
  proh->add_option("first", cfg.input, "Measure or joint spec")->required();
  proh->add_option("second", cfg.input2, "Measure or joint spec")->required();
  add_out(proh);

  auto* verify = app.add_subcommand("verify", "Run the acceptance suite");
  verify->add_option("--seed", cfg.seed, "Random seed");
  verify->add_option("--fixtures", cfg.fixtures, "Fixture directory")->check(CLI::ExistingDirectory);
  verify->add_option("--tol", cfg.tol, "Reserved; criteria use fixed tolerances")->check(CLI::PositiveNumber);
  add_out(verify);

  auto* format = app.add_subcommand("format", "Print the canonical form of a spec file");
  format->add_option("file", cfg.input, "Any spec")->required();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }

  try {
    if (*price) return cmd_price(cfg, out);
    if (*ratio) return cmd_ratio(cfg, out, err);
    if (*bounds) return cmd_bounds(cfg, out, err);
    if (*scan) return cmd_scan(cfg, out);
    if (*proh) return cmd_prohorov(cfg, out);
    if (*verify) return cmd_verify(cfg, out);
    if (*format) return cmd_format(cfg, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace sepsell
