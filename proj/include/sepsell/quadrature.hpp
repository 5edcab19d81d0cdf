#pragma once

#include <functional>
#include <span>

namespace sepsell {

/// Adaptive Simpson on [a, b] to absolute tolerance `tol`. Points in `breaks`
/// that fall inside (a, b) become mandatory panel boundaries.
double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-8,
                 std::span<const double> breaks = {});

}  // namespace sepsell
