#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "diolab/interval.hpp"
#include "diolab/real.hpp"

namespace diolab::detail {

/// Computes the nearest numerator a = round(alpha * b^k) and the signed offset
/// alpha * b^k - a. Irrational targets use interval arithmetic at a ladder of
/// precisions bits(0) < bits(1) < ... ; rational and decimal targets use exact
/// rationals (the decimal's written value, with its uncertainty kept aside).
///
/// Copies share the precomputed enclosures of alpha and own their scratch, so
/// one copy per worker thread is the intended use.
class Evaluator {
 public:
  static constexpr int kLevels = 5;  // escalation stops at 16x the start

  Evaluator(const RealSpec& spec, int k, std::uint64_t bmax, int base_bits);

  int k() const { return shared_->k; }
  int bits(int level) const { return shared_->base_bits << level; }
  mpfr_prec_t precision(int level) const { return shared_->precision[level]; }
  bool exact() const { return shared_->exact.has_value(); }
  const std::optional<mpq_class>& uncertainty() const {
    return shared_->uncertainty;
  }
  const RealSpec& spec() const { return shared_->spec; }

  /// Starts at `level` and escalates until the rounding is certified.
  /// Returns the level used. Throws CertificationError at the last level.
  int nearest(std::uint64_t b, int level, std::int64_t& a, Quantity& offset);

  /// Offset for a caller-chosen numerator.
  void offset(std::uint64_t b, std::int64_t a, int level, Quantity& out);

  /// Decimal literals: whether every alpha within the uncertainty rounds to
  /// the same numerator. Always true for other kinds.
  bool rounding_robust(std::uint64_t b, const Quantity& offset) const;

  int max_level_used() const { return max_level_; }
  void note_level(int level) {
    if (level > max_level_) max_level_ = level;
  }

 private:
  struct Shared {
    RealSpec spec;
    int k = 1;
    int base_bits = 64;
    std::vector<Interval> alpha;          // irrational only, per level
    std::vector<mpfr_prec_t> precision;   // working precision per level
    std::optional<mpq_class> exact;
    std::optional<mpq_class> uncertainty;
  };

  void exact_offset(std::uint64_t b, Quantity& out);

  std::shared_ptr<const Shared> shared_;
  int max_level_ = 0;
  mpz_class num_, bk_, rem_, q_;
  Interval scratch_;
};

/// b^k as an unsigned 64-bit value; k is 1 or 2 and b <= 2^32 when k = 2.
inline std::uint64_t power_k(std::uint64_t b, int k) {
  return k == 1 ? b : b * b;
}

}  // namespace diolab::detail
