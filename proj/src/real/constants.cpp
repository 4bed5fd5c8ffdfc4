#include "constants.hpp"

namespace diolab::detail {
namespace {

// 2^shift * arctan(1/x). Each truncated term is off by less than one unit and
// the alternating tail after the first zero term is below one unit.
FixedEnclosure arctan_inverse(unsigned long x, long shift) {
  mpz_class power;
  mpz_ui_pow_ui(power.get_mpz_t(), 2, static_cast<unsigned long>(shift));
  mpz_class t = power / x;  // floor(2^shift / x^(2n+1)), exact by nesting
  const unsigned long x2 = x * x;
  mpz_class sum = 0;
  unsigned long n = 0;
  while (sgn(t) != 0) {
    mpz_class term = t / (2 * n + 1);
    if (n % 2 == 0) {
      sum += term;
    } else {
      sum -= term;
    }
    mpz_fdiv_q_ui(t.get_mpz_t(), t.get_mpz_t(), x2);
    ++n;
  }
  return {sum, mpz_class(n + 1), shift};
}

// Machin: pi = 16 atan(1/5) - 4 atan(1/239).
FixedEnclosure pi_fixed(long shift) {
  const FixedEnclosure a = arctan_inverse(5, shift);
  const FixedEnclosure b = arctan_inverse(239, shift);
  return {16 * a.value - 4 * b.value, 16 * a.error + 4 * b.error, shift};
}

// e = sum 1/n!. t_n = floor(2^shift / n!) exactly; the tail after the first
// zero term is below one unit.
FixedEnclosure e_fixed(long shift) {
  mpz_class t;
  mpz_ui_pow_ui(t.get_mpz_t(), 2, static_cast<unsigned long>(shift));
  mpz_class sum = 0;
  unsigned long n = 0;
  while (sgn(t) != 0) {
    sum += t;
    ++n;
    mpz_fdiv_q_ui(t.get_mpz_t(), t.get_mpz_t(), n);
  }
  return {sum, mpz_class(n + 1), shift};
}

}  // namespace

FixedEnclosure fixed_constant(NamedConstant c, long shift) {
  return c == NamedConstant::pi ? pi_fixed(shift) : e_fixed(shift);
}

}  // namespace diolab::detail
