#pragma once

#ifdef __FAST_MATH__
#error "compensated summation requires strict IEEE arithmetic (-ffast-math breaks it)"
#endif

#include <cmath>

namespace zetares {

// Neumaier variant of Kahan summation. Running sums stay reproducible
// across platforms as long as the add order is fixed.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) noexcept {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      carry += (sum - t) + x;
    } else {
      carry += (x - t) + sum;
    }
    sum = t;
  }

  // Folds another accumulator in; merge order must be fixed by the caller.
  void merge(const CompensatedSum& other) noexcept {
    add(other.sum);
    add(other.carry);
  }

  double value() const noexcept { return sum + carry; }
};

}  // namespace zetares
