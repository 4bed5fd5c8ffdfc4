#include <omp.h>

#include <algorithm>
#include <exception>
#include <stdexcept>
#include <string>

#include "bounds_table.hpp"
#include "diolab/approx.hpp"
#include "diolab/errors.hpp"
#include "evaluator.hpp"

namespace diolab {

using detail::Evaluator;

namespace {

template <class Block>
void for_blocks(std::uint64_t bmax, int threads, Block&& body) {
  constexpr std::uint64_t kBlock = 8192;
  const std::uint64_t nblocks = (bmax + kBlock - 1) / kBlock;
  std::vector<std::exception_ptr> errors(nblocks);
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(1, threads))
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(nblocks); ++i) {
    const std::uint64_t begin = 1 + static_cast<std::uint64_t>(i) * kBlock;
    const std::uint64_t end = std::min(begin + kBlock, bmax + 1);
    try {
      body(static_cast<std::size_t>(i), begin, end);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

Quantity exact_quantity(const mpq_class& v) {
  Quantity q;
  q.exact = v;
  return q;
}

// ---------------------------------------------------------------------------
// |alpha - a/b| < c/b^2, i.e. b*|alpha*b - a| < c

class HurwitzKernel {
 public:
  HurwitzKernel(const Evaluator& evaluator, const std::vector<Quantity>& threshold)
      : evaluator_(evaluator), threshold_(threshold) {}

  enum class Verdict { yes, no, undecided };

  Verdict decide(std::uint64_t b, std::int64_t a, int level, Quantity& d) {
    for (bool first = true; level < Evaluator::kLevels; ++level, first = false) {
      if (!first) evaluator_.offset(b, a, level, d);
      const Quantity& c = threshold_[level];
      if (d.exact) {
        const mpq_class s = abs(*d.exact) * mpq_class(mpz_class(static_cast<unsigned long>(b)));
        const Order o = compare(exact_quantity(s), c);
        if (o == Order::unknown) continue;
        if (const auto& u = evaluator_.uncertainty()) {
          const mpq_class slack = *u * mpq_class(mpz_class(static_cast<unsigned long>(b)) *
                                                 mpz_class(static_cast<unsigned long>(b)));
          const Order lo = compare(exact_quantity(s - slack), c);
          const Order hi = compare(exact_quantity(s + slack), c);
          if (lo == Order::unknown || hi == Order::unknown) continue;
          const bool agree = (lo == Order::less) == (o == Order::less) &&
                             (hi == Order::less) == (o == Order::less);
          if (!agree) return Verdict::undecided;
        }
        return o == Order::less ? Verdict::yes : Verdict::no;
      }
      s_.exact.reset();
      s_.approx = d.approx;
      s_.approx.set_abs();
      mpfr_mul_ui(s_.approx.lo(), s_.approx.lo(), b, MPFR_RNDD);
      mpfr_mul_ui(s_.approx.hi(), s_.approx.hi(), b, MPFR_RNDU);
      const Order o = compare(s_, c);
      if (o == Order::unknown) continue;
      evaluator_.note_level(level);
      return o == Order::less ? Verdict::yes : Verdict::no;
    }
    return Verdict::undecided;
  }

  Evaluator& evaluator() { return evaluator_; }

 private:
  Evaluator evaluator_;
  const std::vector<Quantity>& threshold_;
  Quantity s_;
};

// ---------------------------------------------------------------------------
// |alpha - a/b^2| < 1/b^(2+theta), i.e. |alpha*b^2 - a| < b^-theta

class PowerKernel {
 public:
  PowerKernel(const Evaluator& evaluator, const mpq_class& theta,
              const detail::MonotoneBounds& table)
      : evaluator_(evaluator), theta_(theta), table_(table) {}

  enum class Verdict { yes, no, undecided };

  Verdict decide(std::uint64_t b) {
    std::int64_t a = 0;
    const int level = evaluator_.nearest(b, 0, a, d_);
    if (d_.exact) return decide_exact(b);
    const auto [lo, hi] = table_.bounds(b);
    t_ = d_.approx;
    t_.set_abs();
    if (mpfr_get_d(t_.hi(), MPFR_RNDU) < lo) return Verdict::yes;
    if (mpfr_get_d(t_.lo(), MPFR_RNDD) >= hi) return Verdict::no;
    for (int l = level; l < Evaluator::kLevels; ++l) {
      if (l != level) {
        evaluator_.offset(b, a, l, d_);
        t_ = d_.approx;
        t_.set_abs();
      }
      const Order o = compare_log(t_, b, evaluator_.precision(l));
      if (o == Order::unknown) continue;
      evaluator_.note_level(l);
      return o == Order::less ? Verdict::yes : Verdict::no;
    }
    return Verdict::undecided;
  }

  Evaluator& evaluator() { return evaluator_; }

 private:
  // ln t against -theta ln b.
  Order compare_log(const Interval& t, std::uint64_t b, mpfr_prec_t prec) {
    if (mpfr_sgn(t.lo()) <= 0) return Order::unknown;
    lt_.set_precision(prec);
    rhs_.set_precision(prec);
    th_.set_precision(prec);
    mpfr_log(lt_.lo(), t.lo(), MPFR_RNDD);
    mpfr_log(lt_.hi(), t.hi(), MPFR_RNDU);
    th_.set(theta_);
    mpfr_log_ui(rhs_.lo(), b, MPFR_RNDU);  // rhs.lo <- -theta_hi * ln_hi
    mpfr_log_ui(rhs_.hi(), b, MPFR_RNDD);  // rhs.hi <- -theta_lo * ln_lo
    mpfr_mul(rhs_.lo(), rhs_.lo(), th_.hi(), MPFR_RNDU);
    mpfr_mul(rhs_.hi(), rhs_.hi(), th_.lo(), MPFR_RNDD);
    mpfr_neg(rhs_.lo(), rhs_.lo(), MPFR_RNDD);
    mpfr_neg(rhs_.hi(), rhs_.hi(), MPFR_RNDU);
    if (mpfr_cmp(lt_.hi(), rhs_.lo()) < 0) return Order::less;
    if (mpfr_cmp(lt_.lo(), rhs_.hi()) >= 0) return Order::greater;
    return Order::unknown;
  }

  // Exact t: t^q * b^p < 1 with theta = p/q, after cheaper log checks.
  bool exact_less(const mpq_class& t, std::uint64_t b) {
    if (sgn(t) <= 0) return true;
    Interval ti(64);
    for (mpfr_prec_t prec = 64; prec <= 4096; prec *= 2) {
      ti.set_precision(prec);
      ti.set(t);
      const Order o = compare_log(ti, b, prec);
      if (o != Order::unknown) return o == Order::less;
    }
    const unsigned long p = theta_.get_num().get_ui();
    const unsigned long q = theta_.get_den().get_ui();
    mpz_class lhs, rhs, bp;
    mpz_pow_ui(lhs.get_mpz_t(), t.get_num_mpz_t(), q);
    mpz_ui_pow_ui(bp.get_mpz_t(), b, p);
    lhs *= bp;
    mpz_pow_ui(rhs.get_mpz_t(), t.get_den_mpz_t(), q);
    return lhs < rhs;
  }

  Verdict decide_exact(std::uint64_t b) {
    const mpq_class t = abs(*d_.exact);
    const bool hit = exact_less(t, b);
    if (const auto& u = evaluator_.uncertainty()) {
      const mpq_class slack = *u * mpq_class(mpz_class(static_cast<unsigned long>(b)) *
                                             mpz_class(static_cast<unsigned long>(b)));
      if (exact_less(t - slack, b) != hit || exact_less(t + slack, b) != hit) {
        return Verdict::undecided;
      }
    }
    return hit ? Verdict::yes : Verdict::no;
  }

  Evaluator evaluator_;
  mpq_class theta_;
  const detail::MonotoneBounds& table_;
  Quantity d_;
  Interval t_, lt_, rhs_, th_;
};

}  // namespace

HurwitzResult hurwitz_solutions(const RealSpec& spec, const RealSpec& c,
                                std::uint64_t bmax, int threads) {
  if (bmax == 0) throw std::invalid_argument("bound must be >= 1");
  if (c.kind() == RealKind::decimal_literal) {
    throw std::invalid_argument("threshold must be exact (rational or quadratic)");
  }
  if (sgn(eval(c, 64).lower()) <= 0) {
    throw std::invalid_argument("threshold must be positive");
  }
  const int base_bits = initial_precision(2, bmax);
  Evaluator evaluator(spec, 1, bmax, base_bits);
  std::vector<Quantity> threshold(Evaluator::kLevels);
  for (int level = 0; level < Evaluator::kLevels; ++level) {
    if (c.kind() == RealKind::rational) {
      threshold[level].exact = c.as_rational();
    } else {
      threshold[level].approx = enclose(c, evaluator.bits(level) + 16);
    }
  }
  const bool nearest_only =
      compare(threshold[Evaluator::kLevels - 1], mpq_class(1, 2)) == Order::less ||
      compare(threshold[Evaluator::kLevels - 1], mpq_class(1, 2)) == Order::equal;
  const mpq_class c_upper = eval(c, 64).upper();
  mpz_class c_ceil;
  mpz_cdiv_q(c_ceil.get_mpz_t(), c_upper.get_num_mpz_t(), c_upper.get_den_mpz_t());

  const std::uint64_t nblocks = (bmax + 8191) / 8192;
  std::vector<HurwitzResult> parts(nblocks);
  for_blocks(bmax, threads, [&](std::size_t index, std::uint64_t begin,
                                std::uint64_t end) {
    HurwitzKernel kernel(evaluator, threshold);
    HurwitzResult& part = parts[index];
    Quantity d;
    for (std::uint64_t b = begin; b < end; ++b) {
      std::int64_t a = 0;
      const int level = kernel.evaluator().nearest(b, 0, a, d);
      std::int64_t first = a, last = a;
      if (!nearest_only) {
        const std::int64_t reach = static_cast<std::int64_t>(
            mpz_class(c_ceil / static_cast<unsigned long>(b)).get_si() + 1);
        first = a - reach;
        last = a + reach;
      }
      for (std::int64_t cand = first; cand <= last; ++cand) {
        if (cand != a) {
          kernel.evaluator().offset(b, cand, level, d);
        } else if (cand != first) {
          kernel.evaluator().nearest(b, 0, a, d);
        }
        switch (kernel.decide(b, cand, level, d)) {
          case HurwitzKernel::Verdict::yes: part.solutions.push_back({cand, b}); break;
          case HurwitzKernel::Verdict::undecided: part.undecided.push_back({cand, b}); break;
          case HurwitzKernel::Verdict::no: break;
        }
      }
    }
    part.max_bits = kernel.evaluator().bits(kernel.evaluator().max_level_used());
  });
  HurwitzResult out;
  out.max_bits = base_bits;
  for (HurwitzResult& part : parts) {
    out.solutions.insert(out.solutions.end(), part.solutions.begin(), part.solutions.end());
    out.undecided.insert(out.undecided.end(), part.undecided.begin(), part.undecided.end());
    out.max_bits = std::max(out.max_bits, part.max_bits);
  }
  return out;
}

ZaharescuResult zaharescu_count(const RealSpec& spec, const mpq_class& theta,
                                std::uint64_t bmax, int threads,
                                std::size_t witness_cap) {
  if (bmax == 0) throw std::invalid_argument("bound must be >= 1");
  if (sgn(theta) <= 0 || theta >= mpq_class(2, 3)) {
    throw std::invalid_argument("theta must lie in the open range (0, 2/3)");
  }
  const int base_bits = initial_precision(3, bmax);
  Evaluator evaluator(spec, 2, bmax, base_bits);
  Interval th(64);
  th.set(theta);
  const detail::MonotoneBounds table(
      1, bmax, false, [&](std::uint64_t g, mpfr_ptr lo, mpfr_ptr hi) {
        // g^-theta = exp(-theta ln g)
        mpfr_log_ui(lo, g, MPFR_RNDU);
        mpfr_log_ui(hi, g, MPFR_RNDD);
        mpfr_mul(lo, lo, th.hi(), MPFR_RNDU);
        mpfr_mul(hi, hi, th.lo(), MPFR_RNDD);
        mpfr_neg(lo, lo, MPFR_RNDD);
        mpfr_neg(hi, hi, MPFR_RNDU);
        mpfr_exp(lo, lo, MPFR_RNDD);
        mpfr_exp(hi, hi, MPFR_RNDU);
      });

  const std::uint64_t nblocks = (bmax + 8191) / 8192;
  std::vector<ZaharescuResult> parts(nblocks);
  for_blocks(bmax, threads, [&](std::size_t index, std::uint64_t begin,
                                std::uint64_t end) {
    PowerKernel kernel(evaluator, theta, table);
    ZaharescuResult& part = parts[index];
    for (std::uint64_t b = begin; b < end; ++b) {
      switch (kernel.decide(b)) {
        case PowerKernel::Verdict::yes:
          ++part.count;
          if (part.witnesses.size() < witness_cap) part.witnesses.push_back(b);
          break;
        case PowerKernel::Verdict::undecided: part.undecided.push_back(b); break;
        case PowerKernel::Verdict::no: break;
      }
    }
    part.max_bits = kernel.evaluator().bits(kernel.evaluator().max_level_used());
  });
  ZaharescuResult out;
  out.max_bits = base_bits;
  for (ZaharescuResult& part : parts) {
    out.count += part.count;
    for (std::uint64_t w : part.witnesses) {
      if (out.witnesses.size() < witness_cap) out.witnesses.push_back(w);
    }
    out.undecided.insert(out.undecided.end(), part.undecided.begin(), part.undecided.end());
    out.max_bits = std::max(out.max_bits, part.max_bits);
  }
  return out;
}

}  // namespace diolab
