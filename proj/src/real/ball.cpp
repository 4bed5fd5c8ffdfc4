#include "diolab/ball.hpp"

#include <cmath>
#include <cstdio>
#include <string>

namespace diolab {
namespace {

mpq_class pow10(long e) {
  mpz_class p;
  mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(e < 0 ? -e : e));
  return e < 0 ? mpq_class(mpz_class(1), p) : mpq_class(p);
}

// floor(log10(x)) for x > 0.
long decimal_exponent(const mpq_class& x) {
  const long nb = static_cast<long>(mpz_sizeinbase(x.get_num_mpz_t(), 2));
  const long db = static_cast<long>(mpz_sizeinbase(x.get_den_mpz_t(), 2));
  long e = static_cast<long>(std::floor((nb - db) * 0.30102999566398120));
  while (x < pow10(e)) --e;
  while (x >= pow10(e + 1)) ++e;
  return e;
}

enum class Rounding { half_even, up };

mpz_class round_scaled(const mpq_class& x, Rounding mode) {
  mpz_class q, r;
  mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), x.get_num_mpz_t(),
              x.get_den_mpz_t());
  if (sgn(r) == 0) return q;
  if (mode == Rounding::up) return q + 1;
  const int c = cmp(mpz_class(2 * r), mpz_class(x.get_den_mpz_t()));
  if (c > 0 || (c == 0 && mpz_odd_p(q.get_mpz_t()))) return q + 1;
  return q;
}

std::string format(const mpq_class& x, int digits, Rounding mode) {
  if (sgn(x) == 0) return "0";
  const mpq_class ax = abs(x);
  long e = decimal_exponent(ax);
  mpz_class n = round_scaled(ax * pow10(digits - 1 - e), mode);
  mpz_class limit;
  mpz_ui_pow_ui(limit.get_mpz_t(), 10, static_cast<unsigned long>(digits));
  if (n >= limit) {
    n = round_scaled(mpq_class(n, 10), mode);
    ++e;
  }
  const std::string ds = n.get_str();
  std::string out = sgn(x) < 0 ? "-" : "";
  out += ds[0];
  if (ds.size() > 1) {
    out += '.';
    out.append(ds, 1, std::string::npos);
  }
  char exp[32];
  std::snprintf(exp, sizeof exp, "e%c%02ld", e < 0 ? '-' : '+', e < 0 ? -e : e);
  return out + exp;
}

}  // namespace

BallValue BallValue::exact(const mpq_class& value, int bits) {
  return BallValue{value, mpq_class(0), bits};
}

bool BallValue::contains(const mpq_class& x) const {
  return lower() <= x && x <= upper();
}

bool BallValue::contains(const BallValue& inner) const {
  return lower() <= inner.lower() && inner.upper() <= upper();
}

std::string format_significant(const mpq_class& x, int digits) {
  return format(x, digits, Rounding::half_even);
}

std::string format_upper(const mpq_class& x, int digits) {
  return format(x, digits, Rounding::up);
}

}  // namespace diolab
