#pragma once

// Optimal revenue for finite two-good valuations: the subgradient LP over
// (q1, q2, b) per support point, solved by IC row generation.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sepsell/joint.hpp"
#include "sepsell/mechanisms.hpp"

namespace sepsell {

enum class SolveStatus { Optimal, IterationLimit };

struct OptRevSolution {
  double value = 0.0;
  std::vector<double> q1;
  std::vector<double> q2;
  std::vector<double> b;
  std::vector<double> s;
  SolveStatus status = SolveStatus::Optimal;
  int rounds = 0;
  std::size_t rows = 0;
  double ic_violation = 0.0;

  /// Menu with one entry per support point.
  MenuMechanism menu() const;
};

struct LpOptions {
  bool npt = false;       // add s >= 0 rows
  bool monotone = false;  // add s(x) <= s(y) for covering pairs x <= y
  bool full = false;      // all pairwise IC rows up front, no row generation
  int max_rounds = 200;
};

/// Throws Error(IterationLimit) or Error(Degenerate) if the LP fails.
OptRevSolution solve_revenue_lp(const FiniteJoint& j, const LpOptions& opts);
OptRevSolution rev_lp(const FiniteJoint& j, bool npt = false);
OptRevSolution monrev_lp(const FiniteJoint& j, bool npt = false);

double srev(const FiniteJoint& j);

inline constexpr double kGeneralGuarantee = 0.6224593312018546;  // sqrt(e)/(sqrt(e)+1)
inline constexpr double kRegularGuarantee = 0.7310585786300049;  // e/(e+1)

struct RatioReport {
  double srev = 0.0;
  double rev = 0.0;
  double monrev = 0.0;
  double ratio = 1.0;
  std::optional<double> guarantee;  // empty when goods are not independent
  std::optional<double> slack;
};

RatioReport ratio_report(const FiniteJoint& j, bool regular = false, bool with_monrev = true);

enum class ScanFamily { IidAtoms, IndependentAtoms, PointMass };

struct FamilySpec {
  ScanFamily family = ScanFamily::IidAtoms;
  int support_size = 2;
  double value_max = 4.0;
};

struct ScanSample {
  int iteration;
  std::string phase;  // "random", "lattice" or "local"
  std::vector<double> values1, probs1, values2, probs2;
  double srev;
  double rev;
  double ratio;
};

struct ScanResult {
  std::vector<ScanSample> trace;
  std::optional<ScanSample> best;
};

ScanResult scan_worst_ratio(const FamilySpec& spec, int budget, std::uint64_t seed);
std::string scan_trace_csv(const ScanResult& r);

}  // namespace sepsell
