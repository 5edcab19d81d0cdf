#pragma once

// The acceptance suite: ten criteria, each with a numeric check and a time
// budget. Shared by `sepsell verify` and the acceptance test binary.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace sepsell {

struct VerifyOptions {
  std::uint64_t seed = 0;
  /// Directory holding irregular_pair.spec.
  std::string fixture_dir;
};

struct CriterionResult {
  int id;
  std::string name;
  bool pass;
  std::string detail;
  double seconds;
  double limit_seconds;
};

std::string default_fixture_dir();

/// Runs criteria 1..10 in order; `on_result` sees each result as it finishes.
std::vector<CriterionResult> run_acceptance(const VerifyOptions& opts,
                                            const std::function<void(const CriterionResult&)>& on_result = {});

/// "PASS  [3] name (1.23 s / 300 s): detail"
std::string format_result(const CriterionResult& r);

}  // namespace sepsell
