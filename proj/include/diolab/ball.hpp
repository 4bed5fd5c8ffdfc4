#pragma once

#include <gmpxx.h>

#include <string>

namespace diolab {

/// Certified enclosure [center - radius, center + radius] of a real.
///
/// Center and radius are exact rationals (dyadic for interval-derived balls),
/// so the enclosure itself introduces no rounding. A radius of zero means the
/// center is the exact value.
struct BallValue {
  mpq_class center;
  mpq_class radius;
  int bits = 0;

  static BallValue exact(const mpq_class& value, int bits = 0);

  mpq_class lower() const { return center - radius; }
  mpq_class upper() const { return center + radius; }
  bool is_exact() const { return sgn(radius) == 0; }
  bool contains(const mpq_class& x) const;
  /// True when every point of `inner` lies in this ball.
  bool contains(const BallValue& inner) const;
  double approx() const { return center.get_d(); }
};

/// Scientific notation with `digits` significant digits, round-half-even.
/// Zero prints as "0".
std::string format_significant(const mpq_class& x, int digits);

/// Like format_significant but rounds the magnitude up, for radii.
std::string format_upper(const mpq_class& x, int digits);

}  // namespace diolab
