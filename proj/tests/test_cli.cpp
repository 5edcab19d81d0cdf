#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "generators.hpp"
#include "sepsell/cli.hpp"
#include "sepsell/error.hpp"
#include "sepsell/spec_io.hpp"

using namespace sepsell;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

const std::string kFixtures = SEPSELL_TEST_FIXTURES;

std::string fixture(const std::string& name) { return kFixtures + "/" + name; }

struct Run {
  int code;
  std::string out;
  std::string err;
  nlohmann::json json() const { return nlohmann::json::parse(out); }
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("sepsell_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string write_file(const fs::path& dir, const std::string& name, const std::string& text) {
  const fs::path p = dir / name;
  std::ofstream(p) << text;
  return p.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("price") {
  const Run r = run({"price", fixture("uniform.spec")});
  REQUIRE(r.code == kExitOk);
  const auto j = r.json();
  CHECK(j["schema_version"] == kSchemaVersion);
  CHECK(j["price"].get<double>() == Approx(0.5).epsilon(1e-12));
  CHECK(j["revenue"].get<double>() == Approx(0.25).epsilon(1e-12));
  CHECK(j["weakly_regular"] == true);

  const fs::path dir = scratch_dir("price");
  const Run a = run({"price", write_file(dir, "one.spec", "kind = atoms\natom = 1 1\n")});
  REQUIRE(a.code == kExitOk);
  CHECK(a.json()["price"].get<double>() == 1.0);
  CHECK(a.json()["revenue"].get<double>() == 1.0);
  CHECK_FALSE(a.json().contains("weakly_regular"));

  CHECK(run({"price", write_file(dir, "bad.spec", "kind = atoms\natom = 1\n")}).code == kExitInput);
  CHECK(run({"price", write_file(dir, "neg.spec", "kind = uniform\na = 1\nb = 0\n")}).code == kExitInput);
  CHECK(run({"price", (dir / "missing.spec").string()}).code == kExitInput);
  CHECK(run({"price", fixture("iid_12.spec")}).code == kExitInput);
}

TEST_CASE("ratio") {
  const Run r = run({"ratio", fixture("iid_12.spec")});
  REQUIRE(r.code == kExitOk);
  const auto j = r.json();
  CHECK(j["rev"].get<double>() == Approx(2.25).epsilon(1e-9));
  CHECK(j["srev"].get<double>() == Approx(2.0).epsilon(1e-12));
  CHECK(j["slack"].get<double>() > 0.0);
  CHECK(j["status"] == "ok");

  const Run pm = run({"ratio", fixture("point_mass.spec")});
  REQUIRE(pm.code == kExitOk);
  CHECK(pm.json()["ratio"].get<double>() == Approx(1.0).epsilon(1e-12));

  const Run corr = run({"ratio", fixture("correlated.spec")});
  REQUIRE(corr.code == kExitOk);
  CHECK(corr.json()["guarantee"].is_null());

  CHECK(run({"ratio", fixture("bad_probs.spec")}).code == kExitInput);
  CHECK(run({"ratio", fixture("uniform_pair.spec"), "--grid", "0"}).code == kExitInput);

  const Run g = run({"ratio", fixture("uniform_pair.spec"), "--grid", "8"});
  REQUIRE(g.code == kExitOk);
  CHECK(g.json()["rev"].get<double>() == Approx(0.597656250000).epsilon(1e-9));
}

TEST_CASE("ratio with --regular on an irregular marginal falls back") {
  const Run r = run({"ratio", fixture("irregular_pair.spec"), "--regular", "--grid", "6"});
  REQUIRE(r.code == kExitOk);
  CHECK(r.err.find("warning") != std::string::npos);
}

TEST_CASE("bounds") {
  const Run r = run({"bounds", fixture("uniform_pair.spec"), "--grid", "100"});
  REQUIRE(r.code == kExitOk);
  const auto j = r.json();
  CHECK(j["k_term_ok"] == true);
  CHECK(j["certificates"].size() >= 2);

  CHECK(run({"bounds", fixture("uniform_pair.spec"), "--lambda1", "1", "--lambda2", "0.5"}).code == kExitInput);
  CHECK(run({"bounds", fixture("er_pair.spec"), "--grid", "50"}).code == kExitOk);

  const Run irr = run({"bounds", fixture("irregular_pair.spec"), "--regular", "--grid", "50"});
  REQUIRE(irr.code == kExitOk);
  CHECK(irr.json()["regular_suppressed"] == true);
  CHECK(irr.err.find("warning") != std::string::npos);

  const fs::path dir = scratch_dir("bounds");
  const std::string exp = write_file(dir, "exp.spec",
                                     "kind = product\n[good1]\nkind = exponential\nrate = 1\n"
                                     "[good2]\nkind = uniform\na = 0\nb = 1\n");
  CHECK(run({"bounds", exp, "--grid", "50"}).code == kExitInput);
  CHECK(run({"bounds", exp, "--grid", "50", "--cap", "8"}).code == kExitOk);
}

TEST_CASE("scan") {
  const Run empty = run({"scan", fixture("iid_family.spec"), "--budget", "0"});
  REQUIRE(empty.code == kExitOk);
  CHECK(empty.json()["best"].is_null());
  CHECK(empty.json()["samples"] == 0);

  const Run r = run({"scan", fixture("iid_family.spec"), "--budget", "200", "--seed", "7"});
  REQUIRE(r.code == kExitOk);
  CHECK(r.json()["best"]["ratio"].get<double>() < 1.0);
  CHECK(r.out == run({"scan", fixture("iid_family.spec"), "--budget", "200", "--seed", "7"}).out);
}

TEST_CASE("prohorov") {
  const Run same = run({"prohorov", fixture("correlated.spec"), fixture("correlated.spec")});
  REQUIRE(same.code == kExitOk);
  CHECK(same.json()["distance"].get<double>() == 0.0);
  CHECK(same.json()["witness"].is_null());

  const Run d = run({"prohorov", fixture("dirac_0.spec"), fixture("xn10.spec")});
  REQUIRE(d.code == kExitOk);
  CHECK(d.json()["distance"].get<double>() == Approx(0.1).epsilon(1e-9));
  CHECK(d.json()["witness"]["mass"].get<double>() > d.json()["witness"]["neighborhood"].get<double>());

  CHECK(run({"prohorov", fixture("dirac_0.spec"), fixture("correlated.spec")}).code == kExitInput);
}

TEST_CASE("usage errors") {
  CHECK(run({}).code == kExitInput);
  CHECK(run({"frobnicate"}).code == kExitInput);
  CHECK(run({"price"}).code == kExitInput);
  CHECK(run({"--help"}).code == kExitOk);
}

TEST_CASE("outputs are deterministic and written to --out") {
  const fs::path dir = scratch_dir("out");
  const Run a = run({"ratio", fixture("iid_12.spec"), "--out", dir.string()});
  const Run b = run({"ratio", fixture("iid_12.spec")});
  REQUIRE(a.code == kExitOk);
  CHECK(a.out == b.out);
  CHECK(slurp(dir / "ratio.json") == a.out);
  CHECK(fs::exists(dir / "ratio_solution.csv"));

  const Run bd = run({"bounds", fixture("uniform_pair.spec"), "--grid", "60", "--out", dir.string()});
  REQUIRE(bd.code == kExitOk);
  CHECK(fs::exists(dir / "bounds.json"));
  CHECK(slurp(dir / "bounds_trace.csv").rfind("t,K1,K2,L1,L2,phi1,phi2", 0) == 0);
  CHECK(bd.out == run({"bounds", fixture("uniform_pair.spec"), "--grid", "60"}).out);

  for (const auto& e : fs::directory_iterator(dir)) CHECK(e.path().extension() != ".tmp");
}

TEST_CASE("spec files round-trip through the canonical form") {
  for (const auto& e : fs::directory_iterator(kFixtures)) {
    if (e.path().filename() == "bad_probs.spec") continue;
    CAPTURE(e.path().string());
    const std::string once = serialize(load_spec(e.path().string()));
    CHECK(serialize(parse_spec(once)) == once);
    const Run f = run({"format", e.path().string()});
    CHECK(f.code == kExitOk);
    CHECK(f.out == once);
  }

  gen::Rng rng(61);
  for (int k = 0; k < 50; ++k) {
    const Spec a = gen::atoms(rng, 6, 5.0), p = gen::piecewise(rng, 5);
    const Spec j = gen::joint(rng, 6, 3.0), m = gen::menu(rng, 4, 2.0);
    for (const Spec* s : {&a, &p, &j, &m}) {
      const std::string once = serialize(*s);
      CHECK(serialize(parse_spec(once)) == once);
    }
  }
}

TEST_CASE("spec parse errors") {
  CHECK_THROWS_AS(parse_spec("kind = uniform\na = 0\na = 1\nb = 2\n"), Error);
  CHECK_THROWS_AS(parse_spec("kind = uniform\nfoo = 1\n"), Error);
  CHECK_THROWS_AS(parse_spec("no equals sign\n"), Error);
  CHECK_THROWS_AS(parse_spec("kind = teapot\n"), Error);
  CHECK_NOTHROW(parse_spec("# comment\nkind = uniform\na = 0\nb = 1 # trailing\n"));
}
