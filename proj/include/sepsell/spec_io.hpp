#pragma once

// Plain-text spec files.
//
//   # comment
//   kind = product
//   [good1]
//   kind = uniform
//   a = 0
//   b = 1
//   [good2]
//   kind = atoms
//   atom = 1 0.5
//   atom = 2 0.5
//
// Top-level kinds: atoms, piecewise, uniform, exponential, equal_revenue,
// mixed (one distribution); product (sections [good1], [good2]); joint
// (`point = x1 x2 prob`); measure (`dim = k`, `point = c1 .. ck prob`);
// menu (`entry = q1 q2 s`); family (scan configuration).

#include <string>
#include <string_view>
#include <variant>

#include "sepsell/continuity.hpp"
#include "sepsell/distributions.hpp"
#include "sepsell/joint.hpp"
#include "sepsell/mechanisms.hpp"
#include "sepsell/optrev.hpp"

namespace sepsell {

struct ProductSpec {
  Dist1D d1;
  Dist1D d2;
};

using Spec = std::variant<Dist1D, ProductSpec, FiniteJoint, DiscreteMeasureKD, MenuMechanism, FamilySpec>;

/// Throws Error(Parse) on syntax problems and the usual validation errors
/// (BadParams, ...) on invalid values.
Spec parse_spec(std::string_view text);
Spec load_spec(const std::string& path);

/// Canonical text form; parse_spec(serialize(s)) reproduces s.
std::string serialize(const Spec& s);

std::string spec_kind(const Spec& s);

/// Joint valuation for a product or joint spec. Marginals with a density are
/// discretized into `grid` cells first.
FiniteJoint to_joint(const Spec& s, int grid);

/// Shortest decimal form that reads back to the same double.
std::string format_number(double v);

}  // namespace sepsell
