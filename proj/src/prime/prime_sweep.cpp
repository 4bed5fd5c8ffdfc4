#include <mpfr.h>

#include "diolab/interval.hpp"
#include "diolab/prime.hpp"

namespace diolab {

namespace {

// -ln(err)/ln(p) over the error ball; empty when the ball reaches zero.
std::optional<BallValue> exponent(const BallValue& err, std::uint64_t p) {
  if (p < 2 || sgn(err.lower()) <= 0) return std::nullopt;
  const int bits = std::max(err.bits, 64);
  const mpfr_prec_t prec = bits + 32;
  Interval e(prec), l(prec), out(prec);
  e.set(err.lower());
  mpfr_set_q(e.hi(), err.upper().get_mpq_t(), MPFR_RNDU);
  // -ln e is decreasing in e
  mpfr_log(out.lo(), e.hi(), MPFR_RNDU);
  mpfr_log(out.hi(), e.lo(), MPFR_RNDD);
  mpfr_neg(out.lo(), out.lo(), MPFR_RNDD);
  mpfr_neg(out.hi(), out.hi(), MPFR_RNDU);
  mpfr_log_ui(l.lo(), p, MPFR_RNDD);
  mpfr_log_ui(l.hi(), p, MPFR_RNDU);
  // numerator may have either sign only if err > 1, which cannot happen here
  if (mpfr_sgn(out.lo()) >= 0) {
    mpfr_div(out.lo(), out.lo(), l.hi(), MPFR_RNDD);
    mpfr_div(out.hi(), out.hi(), l.lo(), MPFR_RNDU);
  } else {
    mpfr_div(out.lo(), out.lo(), l.lo(), MPFR_RNDD);
    mpfr_div(out.hi(), out.hi(), l.lo(), MPFR_RNDU);
  }
  return out.to_ball(bits);
}

}  // namespace

PrimeSweepResult prime_sweep(const RealSpec& spec, std::uint64_t pmax,
                             int threads) {
  const std::vector<std::uint64_t> denominators = sieve(pmax, threads);
  SweepOptions options;
  options.threads = threads;
  const SweepResult sweep =
      sweep_denominators(spec, NormalizationRule::hurwitz(), denominators, options);

  PrimeSweepResult out;
  out.denominators = denominators.size();
  out.exact_hit = sweep.exact_hit;
  out.trust_bound = sweep.trust_bound;
  out.max_bits = sweep.max_bits;
  for (const ApproxSample& s : sweep.records) {
    PrimeSample ps;
    ps.p = s.b;
    ps.z = s.a;
    ps.error = s.error;
    ps.tau = exponent(s.error, s.b);
    ps.is_record = true;
    ps.untrusted = s.untrusted;
    if (ps.tau) {
      if (!out.tau_min || cmp(ps.tau->center, out.tau_min->center) < 0) out.tau_min = ps.tau;
      if (!out.tau_max || cmp(ps.tau->center, out.tau_max->center) > 0) out.tau_max = ps.tau;
      out.tau_last = ps.tau;
    }
    out.records.push_back(std::move(ps));
  }
  return out;
}

}  // namespace diolab
