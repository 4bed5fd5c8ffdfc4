#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "diolab/ball.hpp"
#include "diolab/interval.hpp"

namespace diolab {

/// (p + q*sqrt(d)) / r with d > 1 square-free, q > 0 and gcd(p, q, r) = 1.
struct QuadraticSurd {
  mpz_class p;
  mpz_class q;
  mpz_class d;
  mpz_class r;
};

enum class NamedConstant { pi, euler_e };

/// A finite decimal read literally: the true value lies within half a unit
/// of the last written digit.
struct DecimalLiteral {
  mpq_class value;
  mpq_class uncertainty;
  std::string digits;  // as written, including any sign
};

enum class RealKind { rational, quadratic, named_constant, decimal_literal };

/// Exact symbolic description of a target real.
class RealSpec {
 public:
  static RealSpec rational(const mpz_class& p, const mpz_class& q);
  static RealSpec rational(const mpq_class& value);
  /// Normalizes to canonical form; reclassifies as rational when q = 0 or d
  /// is a perfect square.
  static RealSpec quadratic(const mpz_class& p, const mpz_class& q,
                            const mpz_class& d, const mpz_class& r);
  static RealSpec constant(NamedConstant c);
  static RealSpec decimal(std::string_view digits);

  RealKind kind() const;
  bool is_irrational() const {
    return kind() == RealKind::quadratic || kind() == RealKind::named_constant;
  }
  /// Rational and decimal specs are evaluated exactly.
  bool is_exact() const { return !is_irrational(); }

  const mpq_class& as_rational() const { return std::get<mpq_class>(value_); }
  const QuadraticSurd& as_quadratic() const {
    return std::get<QuadraticSurd>(value_);
  }
  NamedConstant as_constant() const { return std::get<NamedConstant>(value_); }
  const DecimalLiteral& as_decimal() const {
    return std::get<DecimalLiteral>(value_);
  }

  /// Canonical text in the parse_real grammar.
  std::string text() const;

  /// alpha + m. Named constants cannot be shifted and throw.
  RealSpec shifted(const mpz_class& m) const;
  /// -alpha. Named constants cannot be negated and throw.
  RealSpec negated() const;

  friend bool operator==(const RealSpec& a, const RealSpec& b) {
    return a.text() == b.text();
  }

 private:
  using Value = std::variant<mpq_class, QuadraticSurd, NamedConstant,
                             DecimalLiteral>;
  explicit RealSpec(Value v) : value_(std::move(v)) {}
  Value value_;
};

/// Parses `rat:<p>/<q>`, `quad:(<P>+<Q>*sqrt(<D>))/<R>`, `pi`, `e`, or
/// `dec:[-]<digits>[.<digits>]`. Throws ParseError.
RealSpec parse_real(std::string_view text);

/// Reads a plain decimal ("0.3", "-2", "1.25") as an exact rational.
mpq_class parse_decimal_rational(std::string_view text);

/// Reads "p/q" or an integer as an exact rational.
mpq_class parse_fraction(std::string_view text);

/// Enclosure of alpha with width at most 2^-abs_bits. Decimal literals return
/// their full uncertainty interval regardless of abs_bits.
Interval enclose(const RealSpec& spec, int abs_bits);

/// Certified ball with radius <= 2^(1-bits). Throws PrecisionError when a
/// decimal literal cannot supply `bits`, std::invalid_argument for bits < 2.
BallValue eval(const RealSpec& spec, int bits);

struct ContinuedFraction {
  mpz_class a0;
  std::vector<mpz_class> terms;  // a1, a2, ... all >= 1
  bool terminated = false;

  std::size_t size() const { return 1 + terms.size(); }
  const mpz_class& operator[](std::size_t i) const {
    return i == 0 ? a0 : terms[i - 1];
  }
};

/// First n partial quotients (a0 counts as one), each certified. Rationals
/// stop early with terminated = true. Throws CertificationError carrying the
/// certified prefix length when a decimal literal cannot support n terms.
ContinuedFraction cf_expand(const RealSpec& spec, std::size_t n);

struct Convergent {
  mpz_class p;
  mpz_class q;
};

std::vector<Convergent> convergents(const ContinuedFraction& cf);

}  // namespace diolab
