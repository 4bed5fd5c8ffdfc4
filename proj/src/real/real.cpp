#include "diolab/real.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>
#include <string>

#include "constants.hpp"
#include "diolab/errors.hpp"

namespace diolab {
namespace {

long bit_length(const mpz_class& x) {
  return sgn(x) == 0 ? 0 : static_cast<long>(mpz_sizeinbase(x.get_mpz_t(), 2));
}

mpz_class pow10(unsigned long e) {
  mpz_class p;
  mpz_ui_pow_ui(p.get_mpz_t(), 10, e);
  return p;
}

// Square-free decomposition d = f^2 * core. Trial division up to the cube
// root leaves a cofactor with at most two prime factors, which carries a
// square part only if it is itself a perfect square.
std::pair<mpz_class, mpz_class> square_free(const mpz_class& d) {
  mpz_class root3;
  mpz_root(root3.get_mpz_t(), d.get_mpz_t(), 3);
  if (root3 > 10000000) {
    throw ParseError("radicand " + d.get_str() + " is too large to normalize");
  }
  mpz_class rest = d;
  mpz_class f = 1;
  mpz_class core = 1;
  const unsigned long limit = root3.get_ui() + 1;
  for (unsigned long p = 2; p <= limit; p += (p == 2 ? 1 : 2)) {
    unsigned long e = 0;
    while (mpz_divisible_ui_p(rest.get_mpz_t(), p)) {
      mpz_divexact_ui(rest.get_mpz_t(), rest.get_mpz_t(), p);
      ++e;
    }
    for (unsigned long i = 0; i < e / 2; ++i) f *= p;
    if (e % 2 == 1) core *= p;
  }
  if (mpz_perfect_square_p(rest.get_mpz_t())) {
    mpz_class s;
    mpz_sqrt(s.get_mpz_t(), rest.get_mpz_t());
    f *= s;
  } else {
    core *= rest;
  }
  return {f, core};
}

std::string decimal_text(const mpq_class& value, unsigned long frac_digits) {
  const mpz_class scale = pow10(frac_digits);
  mpz_class n = value.get_num() * scale / value.get_den();
  const bool negative = sgn(n) < 0;
  if (negative) n = -n;
  std::string digits = n.get_str();
  if (frac_digits > 0) {
    if (digits.size() <= frac_digits) {
      digits.insert(0, frac_digits + 1 - digits.size(), '0');
    }
    digits.insert(digits.size() - frac_digits, ".");
  }
  return (negative ? "-" : "") + digits;
}

class Cursor {
 public:
  Cursor(std::string_view text, std::string_view whole)
      : text_(text), whole_(whole) {}

  void expect(std::string_view token) {
    if (text_.substr(0, token.size()) != token) {
      fail("expected '" + std::string(token) + "'");
    }
    text_.remove_prefix(token.size());
  }

  mpz_class integer() {
    std::size_t n = 0;
    if (n < text_.size() && text_[n] == '-') ++n;
    const std::size_t first_digit = n;
    while (n < text_.size() && std::isdigit(static_cast<unsigned char>(text_[n]))) {
      ++n;
    }
    if (n == first_digit) fail("expected an integer");
    mpz_class value(std::string(text_.substr(0, n)), 10);
    text_.remove_prefix(n);
    return value;
  }

  void finish() {
    if (!text_.empty()) fail("unexpected trailing text");
  }

  [[noreturn]] void fail(const std::string& why) const {
    throw ParseError("malformed real spec '" + std::string(whole_) + "': " +
                     why + " at '" + std::string(text_) + "'");
  }

 private:
  std::string_view text_;
  std::string_view whole_;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

// Splits "[-]digits[.digits]" into (value, fractional digit count).
std::pair<mpq_class, unsigned long> read_decimal(std::string_view text) {
  std::string_view s = text;
  bool negative = false;
  if (!s.empty() && s.front() == '-') {
    negative = true;
    s.remove_prefix(1);
  }
  const auto dot = s.find('.');
  const std::string_view whole = s.substr(0, dot);
  const std::string_view frac =
      dot == std::string_view::npos ? std::string_view{} : s.substr(dot + 1);
  auto all_digits = [](std::string_view d) {
    return !d.empty() && std::all_of(d.begin(), d.end(), [](char c) {
      return std::isdigit(static_cast<unsigned char>(c)) != 0;
    });
  };
  if (!all_digits(whole) || (dot != std::string_view::npos && !all_digits(frac))) {
    throw ParseError("malformed decimal '" + std::string(text) + "'");
  }
  mpz_class n(std::string(whole) + std::string(frac), 10);
  mpq_class value(n, pow10(frac.size()));
  value.canonicalize();
  if (negative) value = -value;
  return {value, frac.size()};
}

}  // namespace

// ---------------------------------------------------------------------------
// RealSpec

RealSpec RealSpec::rational(const mpz_class& p, const mpz_class& q) {
  if (sgn(q) == 0) throw ParseError("rational with zero denominator");
  mpq_class v(p, q);
  v.canonicalize();
  return RealSpec(Value(v));
}

RealSpec RealSpec::rational(const mpq_class& value) {
  mpq_class v = value;
  v.canonicalize();
  return RealSpec(Value(v));
}

RealSpec RealSpec::quadratic(const mpz_class& p, const mpz_class& q,
                             const mpz_class& d, const mpz_class& r) {
  if (sgn(r) == 0) throw ParseError("quadratic with zero denominator R");
  if (sgn(d) < 0) throw ParseError("quadratic with negative radicand " + d.get_str());
  if (sgn(q) == 0 || sgn(d) == 0) return rational(p, r);
  auto [f, core] = square_free(d);
  mpz_class qq = q * f;
  if (core == 1) return rational(p + qq, r);
  mpz_class pp = p;
  mpz_class rr = r;
  if (sgn(qq) < 0) {
    pp = -pp;
    qq = -qq;
    rr = -rr;
  }
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), pp.get_mpz_t(), qq.get_mpz_t());
  mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), rr.get_mpz_t());
  pp /= g;
  qq /= g;
  rr /= g;
  return RealSpec(Value(QuadraticSurd{pp, qq, core, rr}));
}

RealSpec RealSpec::constant(NamedConstant c) { return RealSpec(Value(c)); }

RealSpec RealSpec::decimal(std::string_view digits) {
  auto [value, frac] = read_decimal(digits);
  mpq_class u(mpz_class(1), 2 * pow10(frac));
  u.canonicalize();
  return RealSpec(Value(DecimalLiteral{value, u, std::string(digits)}));
}

RealKind RealSpec::kind() const {
  return static_cast<RealKind>(value_.index());
}

std::string RealSpec::text() const {
  switch (kind()) {
    case RealKind::rational: {
      const mpq_class& v = as_rational();
      return "rat:" + v.get_num().get_str() + "/" + v.get_den().get_str();
    }
    case RealKind::quadratic: {
      const QuadraticSurd& s = as_quadratic();
      return "quad:(" + s.p.get_str() + "+" + s.q.get_str() + "*sqrt(" +
             s.d.get_str() + "))/" + s.r.get_str();
    }
    case RealKind::named_constant:
      return as_constant() == NamedConstant::pi ? "pi" : "e";
    case RealKind::decimal_literal:
      return "dec:" + as_decimal().digits;
  }
  return {};
}

RealSpec RealSpec::shifted(const mpz_class& m) const {
  switch (kind()) {
    case RealKind::rational:
      return rational(as_rational() + m);
    case RealKind::quadratic: {
      const QuadraticSurd& s = as_quadratic();
      return quadratic(s.p + m * s.r, s.q, s.d, s.r);
    }
    case RealKind::decimal_literal: {
      const DecimalLiteral& d = as_decimal();
      const auto dot = d.digits.find('.');
      const unsigned long frac =
          dot == std::string::npos ? 0 : d.digits.size() - dot - 1;
      return decimal(decimal_text(d.value + m, frac));
    }
    case RealKind::named_constant:
      break;
  }
  throw std::invalid_argument("named constants cannot be shifted");
}

RealSpec RealSpec::negated() const {
  switch (kind()) {
    case RealKind::rational:
      return rational(-as_rational());
    case RealKind::quadratic: {
      const QuadraticSurd& s = as_quadratic();
      return quadratic(-s.p, -s.q, s.d, s.r);
    }
    case RealKind::decimal_literal: {
      const DecimalLiteral& d = as_decimal();
      const auto dot = d.digits.find('.');
      const unsigned long frac =
          dot == std::string::npos ? 0 : d.digits.size() - dot - 1;
      return decimal(decimal_text(-d.value, frac));
    }
    case RealKind::named_constant:
      break;
  }
  throw std::invalid_argument("named constants cannot be negated");
}

// ---------------------------------------------------------------------------
// Parsing

RealSpec parse_real(std::string_view raw) {
  const std::string_view text = trim(raw);
  if (text == "pi") return RealSpec::constant(NamedConstant::pi);
  if (text == "e") return RealSpec::constant(NamedConstant::euler_e);
  if (text.starts_with("rat:")) {
    Cursor c(text.substr(4), text);
    mpz_class p = c.integer();
    c.expect("/");
    mpz_class q = c.integer();
    c.finish();
    if (sgn(q) == 0) c.fail("denominator must be nonzero");
    return RealSpec::rational(p, q);
  }
  if (text.starts_with("quad:")) {
    Cursor c(text.substr(5), text);
    c.expect("(");
    mpz_class p = c.integer();
    c.expect("+");
    mpz_class q = c.integer();
    c.expect("*sqrt(");
    mpz_class d = c.integer();
    c.expect("))/");
    mpz_class r = c.integer();
    c.finish();
    if (sgn(r) == 0) c.fail("R must be nonzero");
    if (sgn(d) < 0) c.fail("D must be non-negative");
    return RealSpec::quadratic(p, q, d, r);
  }
  if (text.starts_with("dec:")) {
    try {
      return RealSpec::decimal(text.substr(4));
    } catch (const ParseError&) {
      throw ParseError("malformed real spec '" + std::string(text) +
                       "': expected dec:[-]<digits>[.<digits>]");
    }
  }
  throw ParseError("unrecognized real spec '" + std::string(text) +
                   "' (expected rat:, quad:, dec:, pi or e)");
}

mpq_class parse_decimal_rational(std::string_view text) {
  return read_decimal(trim(text)).first;
}

mpq_class parse_fraction(std::string_view raw) {
  const std::string_view text = trim(raw);
  Cursor c(text, text);
  mpz_class p = c.integer();
  mpz_class q = 1;
  if (!text.empty() && text.find('/') != std::string_view::npos) {
    c.expect("/");
    q = c.integer();
  }
  c.finish();
  if (sgn(q) == 0) throw ParseError("fraction '" + std::string(text) + "' has zero denominator");
  mpq_class v(p, q);
  v.canonicalize();
  return v;
}

// ---------------------------------------------------------------------------
// Enclosures

namespace {

Interval enclose_rational(const mpq_class& v, int abs_bits) {
  const long mag = bit_length(v.get_num()) - bit_length(v.get_den()) + 1;
  Interval out(abs_bits + std::max(0L, mag) + 8);
  out.set(v);
  return out;
}

Interval enclose_quadratic(const QuadraticSurd& s, int abs_bits) {
  mpz_class root;
  mpz_sqrt(root.get_mpz_t(), s.d.get_mpz_t());
  const mpz_class bound = abs(s.p) + s.q * (root + 1) + 1;
  const mpfr_prec_t prec =
      std::max<long>(abs_bits + bit_length(bound) + 16, bit_length(s.d) + 2);
  Interval out(prec);
  mpfr_set_z(out.lo(), s.d.get_mpz_t(), MPFR_RNDN);  // exact
  mpfr_sqrt(out.hi(), out.lo(), MPFR_RNDU);
  mpfr_sqrt(out.lo(), out.lo(), MPFR_RNDD);
  mpfr_mul_z(out.lo(), out.lo(), s.q.get_mpz_t(), MPFR_RNDD);
  mpfr_mul_z(out.hi(), out.hi(), s.q.get_mpz_t(), MPFR_RNDU);
  mpfr_add_z(out.lo(), out.lo(), s.p.get_mpz_t(), MPFR_RNDD);
  mpfr_add_z(out.hi(), out.hi(), s.p.get_mpz_t(), MPFR_RNDU);
  if (sgn(s.r) > 0) {
    mpfr_div_z(out.lo(), out.lo(), s.r.get_mpz_t(), MPFR_RNDD);
    mpfr_div_z(out.hi(), out.hi(), s.r.get_mpz_t(), MPFR_RNDU);
  } else {
    mpfr_swap(out.lo(), out.hi());
    mpfr_div_z(out.lo(), out.lo(), s.r.get_mpz_t(), MPFR_RNDD);
    mpfr_div_z(out.hi(), out.hi(), s.r.get_mpz_t(), MPFR_RNDU);
  }
  return out;
}

Interval enclose_constant(NamedConstant c, int abs_bits) {
  long shift = abs_bits + 24 + bit_length(mpz_class(abs_bits));
  for (;;) {
    const detail::FixedEnclosure f = detail::fixed_constant(c, shift);
    // width 2*error*2^-shift must not exceed 2^-abs_bits
    if (bit_length(f.error) + 1 <= shift - abs_bits) {
      Interval out(shift + 8);
      const mpz_class lo = f.value - f.error;
      const mpz_class hi = f.value + f.error;
      mpfr_set_z_2exp(out.lo(), lo.get_mpz_t(), -shift, MPFR_RNDD);
      mpfr_set_z_2exp(out.hi(), hi.get_mpz_t(), -shift, MPFR_RNDU);
      return out;
    }
    shift += 16;
  }
}

Interval enclose_decimal(const DecimalLiteral& d, int abs_bits) {
  const long mag = bit_length(d.value.get_num()) - bit_length(d.value.get_den()) + 1;
  Interval out(abs_bits + std::max(0L, mag) + 8);
  const mpq_class lo = d.value - d.uncertainty;
  const mpq_class hi = d.value + d.uncertainty;
  mpfr_set_q(out.lo(), lo.get_mpq_t(), MPFR_RNDD);
  mpfr_set_q(out.hi(), hi.get_mpq_t(), MPFR_RNDU);
  return out;
}

}  // namespace

Interval enclose(const RealSpec& spec, int abs_bits) {
  switch (spec.kind()) {
    case RealKind::rational: return enclose_rational(spec.as_rational(), abs_bits);
    case RealKind::quadratic: return enclose_quadratic(spec.as_quadratic(), abs_bits);
    case RealKind::named_constant: return enclose_constant(spec.as_constant(), abs_bits);
    case RealKind::decimal_literal: return enclose_decimal(spec.as_decimal(), abs_bits);
  }
  throw std::logic_error("unreachable");
}

BallValue eval(const RealSpec& spec, int bits) {
  if (bits < 2) throw std::invalid_argument("eval needs bits >= 2");
  mpq_class contract;  // 2^-bits
  mpz_class two_bits;
  mpz_ui_pow_ui(two_bits.get_mpz_t(), 2, static_cast<unsigned long>(bits));
  contract = mpq_class(mpz_class(1), two_bits);

  if (spec.kind() == RealKind::decimal_literal) {
    const DecimalLiteral& d = spec.as_decimal();
    if (d.uncertainty > 2 * contract) {
      throw PrecisionError("decimal literal '" + d.digits + "' carries fewer than " +
                           std::to_string(bits) + " bits");
    }
    return BallValue{d.value, d.uncertainty, bits};
  }
  if (spec.kind() == RealKind::rational) {
    const mpq_class& v = spec.as_rational();
    const mpz_class& den = v.get_den();
    if (mpz_popcount(den.get_mpz_t()) == 1 && den <= two_bits) {
      return BallValue::exact(v, bits);
    }
  }
  // A tight enclosure re-centered inside a ball of radius 2^-bits, so that
  // balls at increasing precision nest.
  const Interval tight = enclose(spec, bits + 40);
  BallValue b = tight.to_ball(bits);
  b.radius = contract;
  return b;
}

// ---------------------------------------------------------------------------
// Continued fractions

namespace {

ContinuedFraction expand_rational(const mpq_class& v, std::size_t n) {
  ContinuedFraction cf;
  mpz_class p = v.get_num();
  mpz_class q = v.get_den();
  for (std::size_t i = 0; i < n; ++i) {
    mpz_class a, r;
    mpz_fdiv_qr(a.get_mpz_t(), r.get_mpz_t(), p.get_mpz_t(), q.get_mpz_t());
    if (i == 0) {
      cf.a0 = a;
    } else {
      cf.terms.push_back(a);
    }
    if (sgn(r) == 0) {
      cf.terminated = true;
      break;
    }
    p = q;
    q = r;
  }
  return cf;
}

// Complete quotients (m + sqrt(d)) / q with q | d - m^2 stay exact forever.
ContinuedFraction expand_quadratic(const QuadraticSurd& s, std::size_t n) {
  mpz_class m = s.p;
  mpz_class d = s.q * s.q * s.d;
  mpz_class q = s.r;
  if (!mpz_divisible_p(mpz_class(d - m * m).get_mpz_t(), q.get_mpz_t())) {
    const mpz_class aq = abs(q);
    m *= aq;
    d *= q * q;
    q *= aq;
  }
  mpz_class root;
  mpz_sqrt(root.get_mpz_t(), d.get_mpz_t());
  ContinuedFraction cf;
  for (std::size_t i = 0; i < n; ++i) {
    mpz_class a;
    if (sgn(q) > 0) {
      const mpz_class num = m + root;
      mpz_fdiv_q(a.get_mpz_t(), num.get_mpz_t(), q.get_mpz_t());
    } else {
      const mpz_class num = -m - root - 1;
      const mpz_class den = -q;
      mpz_fdiv_q(a.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    }
    if (i == 0) {
      cf.a0 = a;
    } else {
      cf.terms.push_back(a);
    }
    m = a * q - m;
    const mpz_class rem = d - m * m;
    mpz_divexact(q.get_mpz_t(), rem.get_mpz_t(), q.get_mpz_t());
  }
  return cf;
}

// Returns the number of terms certified at this precision.
std::size_t expand_interval(const RealSpec& spec, std::size_t n, int bits,
                            ContinuedFraction& cf) {
  Interval x = enclose(spec, bits);
  const mpfr_prec_t prec = x.precision() + 16;
  Interval next(prec);
  mpz_class a_lo, a_hi;
  cf = ContinuedFraction{};
  for (std::size_t i = 0; i < n; ++i) {
    mpfr_get_z(a_lo.get_mpz_t(), x.lo(), MPFR_RNDD);
    mpfr_get_z(a_hi.get_mpz_t(), x.hi(), MPFR_RNDD);
    if (a_lo != a_hi) return i;
    if (i == 0) {
      cf.a0 = a_lo;
    } else {
      cf.terms.push_back(a_lo);
    }
    if (i + 1 == n) return n;
    mpfr_sub_z(next.lo(), x.lo(), a_lo.get_mpz_t(), MPFR_RNDD);
    mpfr_sub_z(next.hi(), x.hi(), a_lo.get_mpz_t(), MPFR_RNDU);
    if (mpfr_sgn(next.lo()) <= 0) return i + 1;
    x.set_precision(prec);
    mpfr_ui_div(x.lo(), 1, next.hi(), MPFR_RNDD);
    mpfr_ui_div(x.hi(), 1, next.lo(), MPFR_RNDU);
  }
  return n;
}

ContinuedFraction expand_decimal(const DecimalLiteral& d, std::size_t n) {
  mpq_class lo = d.value - d.uncertainty;
  mpq_class hi = d.value + d.uncertainty;
  ContinuedFraction cf;
  std::size_t certified = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mpz_class a_lo, a_hi;
    mpz_fdiv_q(a_lo.get_mpz_t(), lo.get_num_mpz_t(), lo.get_den_mpz_t());
    mpz_fdiv_q(a_hi.get_mpz_t(), hi.get_num_mpz_t(), hi.get_den_mpz_t());
    if (a_lo != a_hi) break;
    if (i == 0) {
      cf.a0 = a_lo;
    } else {
      cf.terms.push_back(a_lo);
    }
    certified = i + 1;
    if (certified == n) return cf;
    mpq_class f_lo = lo - a_lo;
    mpq_class f_hi = hi - a_lo;
    if (sgn(f_lo) == 0) break;
    lo = 1 / f_hi;
    hi = 1 / f_lo;
  }
  throw CertificationError("decimal literal '" + d.digits + "' certifies only " +
                               std::to_string(certified) + " of " +
                               std::to_string(n) + " partial quotients",
                           certified);
}

}  // namespace

ContinuedFraction cf_expand(const RealSpec& spec, std::size_t n) {
  if (n == 0) throw std::invalid_argument("cf_expand needs n >= 1");
  switch (spec.kind()) {
    case RealKind::rational: return expand_rational(spec.as_rational(), n);
    case RealKind::quadratic: return expand_quadratic(spec.as_quadratic(), n);
    case RealKind::decimal_literal: return expand_decimal(spec.as_decimal(), n);
    case RealKind::named_constant: break;
  }
  ContinuedFraction cf;
  std::size_t best = 0;
  for (int bits = 64; bits <= (1 << 22); bits *= 2) {
    best = expand_interval(spec, n, bits, cf);
    if (best == n) return cf;
  }
  throw CertificationError("could not certify " + std::to_string(n) +
                               " partial quotients of " + spec.text(),
                           best);
}

std::vector<Convergent> convergents(const ContinuedFraction& cf) {
  std::vector<Convergent> out;
  out.reserve(cf.size());
  mpz_class p_prev = 1, q_prev = 0;
  mpz_class p = cf.a0, q = 1;
  out.push_back({p, q});
  for (const mpz_class& a : cf.terms) {
    mpz_class p_next = a * p + p_prev;
    mpz_class q_next = a * q + q_prev;
    p_prev = std::move(p);
    q_prev = std::move(q);
    p = std::move(p_next);
    q = std::move(q_next);
    out.push_back({p, q});
  }
  return out;
}

}  // namespace diolab
