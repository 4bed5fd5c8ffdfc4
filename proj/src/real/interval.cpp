#include "diolab/interval.hpp"

#include <algorithm>

namespace diolab {

Interval::Interval(mpfr_prec_t prec) {
  mpfr_init2(lo_, prec);
  mpfr_init2(hi_, prec);
  mpfr_set_zero(lo_, 1);
  mpfr_set_zero(hi_, 1);
}

Interval::Interval(const Interval& other) {
  mpfr_init2(lo_, other.precision());
  mpfr_init2(hi_, other.precision());
  mpfr_set(lo_, other.lo_, MPFR_RNDN);
  mpfr_set(hi_, other.hi_, MPFR_RNDN);
}

Interval::Interval(Interval&& other) noexcept {
  mpfr_init2(lo_, MPFR_PREC_MIN);
  mpfr_init2(hi_, MPFR_PREC_MIN);
  mpfr_swap(lo_, other.lo_);
  mpfr_swap(hi_, other.hi_);
}

Interval& Interval::operator=(const Interval& other) {
  if (this != &other) {
    set_precision(other.precision());
    mpfr_set(lo_, other.lo_, MPFR_RNDN);
    mpfr_set(hi_, other.hi_, MPFR_RNDN);
  }
  return *this;
}

Interval& Interval::operator=(Interval&& other) noexcept {
  mpfr_swap(lo_, other.lo_);
  mpfr_swap(hi_, other.hi_);
  return *this;
}

Interval::~Interval() {
  mpfr_clear(lo_);
  mpfr_clear(hi_);
}

void Interval::set_precision(mpfr_prec_t prec) {
  if (precision() != prec) {
    mpfr_set_prec(lo_, prec);
    mpfr_set_prec(hi_, prec);
  }
}

void Interval::set(const mpq_class& exact) {
  mpfr_set_q(lo_, exact.get_mpq_t(), MPFR_RNDD);
  mpfr_set_q(hi_, exact.get_mpq_t(), MPFR_RNDU);
}

void Interval::set_abs() {
  if (mpfr_sgn(lo_) >= 0) return;
  if (mpfr_sgn(hi_) <= 0) {
    mpfr_swap(lo_, hi_);
    mpfr_neg(lo_, lo_, MPFR_RNDD);
    mpfr_neg(hi_, hi_, MPFR_RNDU);
    return;
  }
  mpfr_neg(lo_, lo_, MPFR_RNDU);
  if (mpfr_cmp(lo_, hi_) > 0) mpfr_swap(lo_, hi_);
  mpfr_set_zero(lo_, 1);
}

bool Interval::contains_zero() const {
  return mpfr_sgn(lo_) <= 0 && mpfr_sgn(hi_) >= 0;
}

BallValue Interval::to_ball(int bits) const {
  mpq_class lo, hi;
  mpfr_get_q(lo.get_mpq_t(), lo_);
  mpfr_get_q(hi.get_mpq_t(), hi_);
  return BallValue{(lo + hi) / 2, (hi - lo) / 2, bits};
}

BallValue Quantity::to_ball(int bits) const {
  if (exact) return BallValue::exact(*exact, bits);
  return approx.to_ball(bits);
}

namespace {
Order flip(Order o) {
  switch (o) {
    case Order::less: return Order::greater;
    case Order::greater: return Order::less;
    default: return o;
  }
}
}  // namespace

Order compare(const Quantity& x, const mpq_class& y) {
  if (x.exact) {
    const int c = cmp(*x.exact, y);
    return c < 0 ? Order::less : c > 0 ? Order::greater : Order::equal;
  }
  if (mpfr_cmp_q(x.approx.hi(), y.get_mpq_t()) < 0) return Order::less;
  if (mpfr_cmp_q(x.approx.lo(), y.get_mpq_t()) > 0) return Order::greater;
  if (mpfr_cmp_q(x.approx.lo(), y.get_mpq_t()) == 0 &&
      mpfr_cmp_q(x.approx.hi(), y.get_mpq_t()) == 0) {
    return Order::equal;
  }
  return Order::unknown;
}

Order compare(const Quantity& x, const Quantity& y) {
  if (y.exact) return compare(x, *y.exact);
  if (x.exact) return flip(compare(y, *x.exact));
  if (mpfr_cmp(x.approx.hi(), y.approx.lo()) < 0) return Order::less;
  if (mpfr_cmp(x.approx.lo(), y.approx.hi()) > 0) return Order::greater;
  if (mpfr_equal_p(x.approx.lo(), x.approx.hi()) &&
      mpfr_equal_p(y.approx.lo(), y.approx.hi()) &&
      mpfr_equal_p(x.approx.lo(), y.approx.lo())) {
    return Order::equal;
  }
  return Order::unknown;
}

Interval enclose(const Quantity& q, mpfr_prec_t prec) {
  if (!q.exact) return q.approx;
  Interval out(prec);
  out.set(*q.exact);
  return out;
}

}  // namespace diolab
