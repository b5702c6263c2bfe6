#pragma once

#include <cmath>

namespace rateq {

/// Neumaier compensated accumulator. Summation order is fixed by the caller
/// (row-major everywhere) so results are reproducible to the last bit.
class KahanSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      c_ += (sum_ - t) + x;
    else
      c_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + c_; }

 private:
  double sum_ = 0.0;
  double c_ = 0.0;
};

}  // namespace rateq
