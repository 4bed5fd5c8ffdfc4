#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <optional>

#include "diolab/ball.hpp"

namespace diolab {

/// Closed interval with MPFR endpoints. Every producer rounds lo down and hi
/// up, so the true value is always inside.
class Interval {
 public:
  explicit Interval(mpfr_prec_t prec = 64);
  Interval(const Interval& other);
  Interval(Interval&& other) noexcept;
  Interval& operator=(const Interval& other);
  Interval& operator=(Interval&& other) noexcept;
  ~Interval();

  mpfr_prec_t precision() const { return mpfr_get_prec(lo_); }
  /// Changes the precision; endpoint values are invalidated.
  void set_precision(mpfr_prec_t prec);

  mpfr_ptr lo() { return lo_; }
  mpfr_ptr hi() { return hi_; }
  mpfr_srcptr lo() const { return lo_; }
  mpfr_srcptr hi() const { return hi_; }

  void set(const mpq_class& exact);
  void set_abs();  // |x|
  bool contains_zero() const;
  BallValue to_ball(int bits) const;

 private:
  mpfr_t lo_;
  mpfr_t hi_;
};

/// A value that is either known exactly (rational) or only enclosed.
struct Quantity {
  std::optional<mpq_class> exact;
  Interval approx;

  BallValue to_ball(int bits) const;
  bool is_zero() const { return exact && sgn(*exact) == 0; }
};

enum class Order { less, equal, greater, unknown };

/// Certified comparison; `unknown` when the enclosures overlap.
Order compare(const Quantity& x, const Quantity& y);
Order compare(const Quantity& x, const mpq_class& y);

/// Enclosure of a quantity at precision `prec` (exact values are rounded
/// outward; approximate ones are copied).
Interval enclose(const Quantity& q, mpfr_prec_t prec);

}  // namespace diolab
