#pragma once

#include <gmpxx.h>

#include "diolab/real.hpp"

namespace diolab::detail {

/// value / 2^shift with |true - value| <= error (both in units of 2^-shift).
struct FixedEnclosure {
  mpz_class value;
  mpz_class error;
  long shift = 0;
};

/// Series evaluation of a named constant with the truncation and rounding
/// error accumulated into `error`.
FixedEnclosure fixed_constant(NamedConstant c, long shift);

}  // namespace diolab::detail
