#pragma once

namespace sievelab {

// Compensated (Kahan) accumulator.  The weight and product sums in this
// project mix terms of very different magnitude; extended precision plus
// compensation keeps them reproducible to well below the tolerances the
// tests assert.  Accumulation order still matters for bit-reproducibility,
// so callers must feed terms in a fixed order.
template <typename T = long double>
class KahanSum {
 public:
  void add(T value) {
    T y = value - comp_;
    T t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }

  T value() const { return sum_; }

 private:
  T sum_ = 0;
  T comp_ = 0;
};

}  // namespace sievelab
