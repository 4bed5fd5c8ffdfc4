#pragma once

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace diolab::detail {

/// Certified double bounds of a monotone function on the integers, sampled on
/// a geometric grid (ratio ~1 + 1/256). Between grid points the bounds come
/// from the neighbouring samples, so lookups cost a binary search and never
/// touch MPFR. Used only to skip work that cannot change a decision.
class MonotoneBounds {
 public:
  MonotoneBounds() = default;

  /// `eval(g, lo, hi)` must store a lower and an upper bound of f(g) in the
  /// 64-bit MPFR values `lo` and `hi`.
  template <class Eval>
  MonotoneBounds(std::uint64_t first, std::uint64_t last, bool increasing,
                 Eval eval)
      : increasing_(increasing) {
    mpfr_t lo, hi;
    mpfr_init2(lo, 64);
    mpfr_init2(hi, 64);
    std::uint64_t g = first;
    for (;;) {
      eval(g, lo, hi);
      grid_.push_back(g);
      lower_.push_back(mpfr_get_d(lo, MPFR_RNDD));
      upper_.push_back(mpfr_get_d(hi, MPFR_RNDU));
      if (g >= last) break;
      g = std::max(g + 1, g + g / 256);
      g = std::min(g, last);
    }
    mpfr_clear(lo);
    mpfr_clear(hi);
  }

  bool empty() const { return grid_.empty(); }

  std::pair<double, double> bounds(std::uint64_t b) const {
    auto it = std::upper_bound(grid_.begin(), grid_.end(), b);
    const std::size_t j = static_cast<std::size_t>(it - grid_.begin()) - 1;
    if (grid_[j] == b || j + 1 == grid_.size()) return {lower_[j], upper_[j]};
    if (increasing_) return {lower_[j], upper_[j + 1]};
    return {lower_[j + 1], upper_[j]};
  }

 private:
  bool increasing_ = true;
  std::vector<std::uint64_t> grid_;
  std::vector<double> lower_;
  std::vector<double> upper_;
};

/// x*y rounded toward zero for non-negative finite doubles.
inline double product_down(double x, double y) {
  const double p = x * y;
  return p > 0 ? std::nextafter(p, 0.0) : p;
}

}  // namespace diolab::detail
