#pragma once

#include <cmath>

namespace sepsell::detail {

// Neumaier-compensated running sum; fine discretizations and their products
// add up 1e4..1e5 probabilities that must total 1 to within 1e-12.
class AccurateSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    carry_ += std::abs(sum_) >= std::abs(v) ? (sum_ - t) + v : (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

}  // namespace sepsell::detail
