#include "evaluator.hpp"

#include <stdexcept>
#include <string>

#include "diolab/errors.hpp"

namespace diolab::detail {
namespace {

long bit_length(const mpz_class& x) {
  return sgn(x) == 0 ? 0 : static_cast<long>(mpz_sizeinbase(x.get_mpz_t(), 2));
}

// Bits needed for |alpha| * bmax^k, rounded up generously.
long magnitude_bits(const RealSpec& spec, int k, std::uint64_t bmax) {
  const Interval a = enclose(spec, 8);
  mpz_class top;
  mpfr_t t;
  mpfr_init2(t, 64);
  mpfr_abs(t, a.lo(), MPFR_RNDU);
  if (mpfr_cmpabs(a.hi(), t) > 0) mpfr_abs(t, a.hi(), MPFR_RNDU);
  mpfr_get_z(top.get_mpz_t(), t, MPFR_RNDU);
  mpfr_clear(t);
  return bit_length(top + 1) + k * bit_length(mpz_class(std::to_string(bmax)));
}

}  // namespace

Evaluator::Evaluator(const RealSpec& spec, int k, std::uint64_t bmax,
                     int base_bits)
    : scratch_(64) {
  if (k != 1 && k != 2) throw std::invalid_argument("k must be 1 or 2");
  if (bmax == 0) throw std::invalid_argument("bound must be >= 1");
  if (k == 2 && bmax > (std::uint64_t{1} << 32)) {
    throw std::invalid_argument("bound too large for k = 2");
  }
  auto shared = std::make_shared<Shared>(Shared{spec, k, base_bits, {}, {}, {}, {}});
  const long mag = magnitude_bits(spec, k, bmax);
  if (mag > 61) {
    throw std::overflow_error("numerators for " + spec.text() +
                              " exceed 62 bits at this bound");
  }
  for (int level = 0; level < kLevels; ++level) {
    shared->precision.push_back((base_bits << level) + mag + 16);
  }
  switch (spec.kind()) {
    case RealKind::rational:
      shared->exact = spec.as_rational();
      break;
    case RealKind::decimal_literal:
      shared->exact = spec.as_decimal().value;
      shared->uncertainty = spec.as_decimal().uncertainty;
      break;
    default:
      for (int level = 0; level < kLevels; ++level) {
        shared->alpha.push_back(enclose(spec, base_bits << level));
      }
  }
  shared_ = std::move(shared);
}

void Evaluator::exact_offset(std::uint64_t b, Quantity& out) {
  const mpq_class& alpha = *shared_->exact;
  bk_ = static_cast<unsigned long>(b);
  if (shared_->k == 2) bk_ *= bk_;
  num_ = alpha.get_num() * bk_;
  mpz_fdiv_qr(q_.get_mpz_t(), rem_.get_mpz_t(), num_.get_mpz_t(),
              alpha.get_den_mpz_t());
  const int c = cmp(mpz_class(2 * rem_), alpha.get_den());
  if (c > 0 || (c == 0 && mpz_odd_p(q_.get_mpz_t()))) {
    ++q_;
    rem_ -= alpha.get_den();
  }
  if (!out.exact) out.exact.emplace();
  mpq_set_num(out.exact->get_mpq_t(), rem_.get_mpz_t());
  mpq_set_den(out.exact->get_mpq_t(), alpha.get_den_mpz_t());
  out.exact->canonicalize();
}

int Evaluator::nearest(std::uint64_t b, int level, std::int64_t& a,
                       Quantity& offset) {
  if (exact()) {
    exact_offset(b, offset);
    // offset = alpha*b^k - a with a = q_
    a = q_.get_si();
    return level;
  }
  offset.exact.reset();
  const std::uint64_t bk = power_k(b, shared_->k);
  Interval& x = offset.approx;
  for (; level < kLevels; ++level) {
    const Interval& alpha = shared_->alpha[level];
    x.set_precision(shared_->precision[level]);
    mpfr_mul_ui(x.lo(), alpha.lo(), bk, MPFR_RNDD);
    mpfr_mul_ui(x.hi(), alpha.hi(), bk, MPFR_RNDU);
    scratch_.set_precision(shared_->precision[level]);
    mpfr_rint(scratch_.lo(), x.lo(), MPFR_RNDN);
    const long candidate = mpfr_get_si(scratch_.lo(), MPFR_RNDN);
    mpfr_sub_si(x.lo(), x.lo(), candidate, MPFR_RNDD);
    mpfr_sub_si(x.hi(), x.hi(), candidate, MPFR_RNDU);
    // irrational alpha never sits on a half-integer, so a strict test
    // eventually succeeds
    if (mpfr_cmp_d(x.lo(), -0.5) > 0 && mpfr_cmp_d(x.hi(), 0.5) < 0) {
      a = candidate;
      note_level(level);
      return level;
    }
  }
  throw CertificationError("rounding of alpha*b^k undecided for " +
                               shared_->spec.text() + " at b=" +
                               std::to_string(b),
                           0, b);
}

void Evaluator::offset(std::uint64_t b, std::int64_t a, int level,
                       Quantity& out) {
  if (exact()) {
    const mpq_class& alpha = *shared_->exact;
    bk_ = static_cast<unsigned long>(b);
    if (shared_->k == 2) bk_ *= bk_;
    if (!out.exact) out.exact.emplace();
    *out.exact = alpha * mpq_class(bk_) - mpq_class(mpz_class(static_cast<long>(a)));
    return;
  }
  note_level(level);
  out.exact.reset();
  const std::uint64_t bk = power_k(b, shared_->k);
  const Interval& alpha = shared_->alpha[level];
  out.approx.set_precision(shared_->precision[level]);
  mpfr_mul_ui(out.approx.lo(), alpha.lo(), bk, MPFR_RNDD);
  mpfr_mul_ui(out.approx.hi(), alpha.hi(), bk, MPFR_RNDU);
  mpfr_sub_si(out.approx.lo(), out.approx.lo(), a, MPFR_RNDD);
  mpfr_sub_si(out.approx.hi(), out.approx.hi(), a, MPFR_RNDU);
}

bool Evaluator::rounding_robust(std::uint64_t b, const Quantity& offset) const {
  if (!shared_->uncertainty) return true;
  mpz_class bk = static_cast<unsigned long>(b);
  if (shared_->k == 2) bk *= bk;
  const mpq_class slack = mpq_class(1, 2) - abs(*offset.exact);
  return slack > *shared_->uncertainty * bk;
}

}  // namespace diolab::detail
