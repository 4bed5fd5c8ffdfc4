#include <omp.h>

#include <algorithm>
#include <exception>
#include <stdexcept>
#include <string>

#include "diolab/approx.hpp"
#include "diolab/errors.hpp"
#include "engine.hpp"

namespace diolab {

using detail::Evaluator;
using detail::Point;
using detail::SampleEngine;
using detail::Tracker;

void NormalizationRule::validate() const {
  if (k != 1 && k != 2) throw std::invalid_argument("k must be 1 or 2");
  if (score_exponent <= k) {
    throw std::invalid_argument("score exponent must exceed k");
  }
  if (log_epsilon && sgn(*log_epsilon) <= 0) {
    throw std::invalid_argument("log epsilon must be positive");
  }
}

int initial_precision(int score_exponent, std::uint64_t bmax) {
  mpz_class x = static_cast<unsigned long>(bmax);
  mpz_pow_ui(x.get_mpz_t(), x.get_mpz_t(), static_cast<unsigned long>(score_exponent));
  x -= 1;
  const int ceil_log2 =
      sgn(x) == 0 ? 0 : static_cast<int>(mpz_sizeinbase(x.get_mpz_t(), 2));
  return ceil_log2 + 64;
}

namespace {

struct Denominators {
  std::uint64_t count = 0;
  const std::vector<std::uint64_t>* list = nullptr;

  std::uint64_t at(std::uint64_t i) const { return list ? (*list)[i] : i + 1; }
  std::uint64_t max() const { return list ? list->back() : count; }
};

struct BlockSummary {
  Tracker tracker;
  std::vector<ApproxSample> samples;
  std::exception_ptr error;
};

struct Outcome {
  Tracker tracker;
  std::vector<ApproxSample> samples;
  std::optional<std::uint64_t> untrusted_from;
  int max_level = 0;
};

BlockSummary run_block(SampleEngine& engine, const Denominators& den,
                       std::uint64_t begin, std::uint64_t end, bool retain) {
  BlockSummary s;
  Point p;
  if (retain) s.samples.reserve(end - begin);
  for (std::uint64_t i = begin; i < end; ++i) {
    engine.fill(den.at(i), p);
    if (retain) s.samples.push_back(engine.report(p));
    const bool record = s.tracker.offer(engine, p, i - begin);
    if (retain && record) s.samples.back().is_record = true;
  }
  return s;
}

// Whether the decision between two values that each move by at most their
// sensitivity * u as alpha moves within the literal's uncertainty is stable.
bool gap_exceeds(const mpq_class& x, const mpq_class& y, const mpq_class& bound) {
  return abs(x - y) > bound;
}

bool log_gap_robust(SampleEngine& engine, Point& p, Point& best,
                    const mpq_class& u) {
  if (!p.has_log) engine.compute_log(p);
  const mpfr_prec_t prec = 128;
  const int s = engine.rule().score_exponent;
  Interval gap(prec), wp(prec), wb(prec), scratch(prec);
  const Interval lp = enclose(p.log_score, prec);
  const Interval lb = enclose(best.log_score, prec);
  mpfr_sub(gap.lo(), lp.lo(), lb.hi(), MPFR_RNDD);
  mpfr_sub(gap.hi(), lb.lo(), lp.hi(), MPFR_RNDD);
  mpfr_max(gap.lo(), gap.lo(), gap.hi(), MPFR_RNDD);
  detail::log_weight(p.b, *engine.rule().log_epsilon, wp, scratch);
  detail::log_weight(best.b, *engine.rule().log_epsilon, wb, scratch);
  mpz_class bp = static_cast<unsigned long>(p.b);
  mpz_class bb = static_cast<unsigned long>(best.b);
  mpz_pow_ui(bp.get_mpz_t(), bp.get_mpz_t(), static_cast<unsigned long>(s));
  mpz_pow_ui(bb.get_mpz_t(), bb.get_mpz_t(), static_cast<unsigned long>(s));
  mpfr_mul_z(wp.hi(), wp.hi(), bp.get_mpz_t(), MPFR_RNDU);
  mpfr_mul_z(wb.hi(), wb.hi(), bb.get_mpz_t(), MPFR_RNDU);
  mpfr_add(wp.hi(), wp.hi(), wb.hi(), MPFR_RNDU);
  mpfr_mul_q(wp.hi(), wp.hi(), u.get_mpq_t(), MPFR_RNDU);
  return mpfr_cmp(gap.lo(), wp.hi()) > 0;
}

// Serial reference: one ordered pass. Also the only path for decimal
// literals, whose trust bound needs the running state at every b.
Outcome run_serial(SampleEngine& engine, const Denominators& den, bool retain) {
  Outcome out;
  out.tracker.track_record_score = true;
  const std::optional<mpq_class>& u = engine.evaluator().uncertainty();
  const int s = engine.rule().score_exponent;
  Point p;
  if (retain) out.samples.reserve(den.count);
  for (std::uint64_t i = 0; i < den.count; ++i) {
    const std::uint64_t b = den.at(i);
    engine.fill(b, p);
    if (u && !out.untrusted_from) {
      Tracker& t = out.tracker;
      bool robust = engine.evaluator().rounding_robust(b, p.offset);
      if (robust && !t.records.empty()) {
        robust = engine.same_fraction(p, t.records.back()) ||
                 gap_exceeds(*p.err.exact, *t.records.back().err.exact, 2 * *u);
      }
      if (robust && t.best_score) {
        mpz_class wp = static_cast<unsigned long>(b);
        mpz_class wb = static_cast<unsigned long>(t.best_score->b);
        mpz_pow_ui(wp.get_mpz_t(), wp.get_mpz_t(), static_cast<unsigned long>(s));
        mpz_pow_ui(wb.get_mpz_t(), wb.get_mpz_t(), static_cast<unsigned long>(s));
        // a repeated fraction at larger b never has the smaller score
        robust = engine.same_fraction(p, *t.best_score) ||
                 gap_exceeds(*p.score.exact, *t.best_score->score.exact,
                             *u * mpq_class(wp + wb));
      }
      if (robust && engine.tracks_log() && b >= 2 && t.best_log) {
        robust = engine.same_fraction(p, *t.best_log) ||
                 log_gap_robust(engine, p, *t.best_log, *u);
      }
      if (!robust) out.untrusted_from = b;
    }
    if (retain) out.samples.push_back(engine.report(p));
    const bool record = out.tracker.offer(engine, p, i);
    if (retain) {
      out.samples.back().is_record = record;
      out.samples.back().untrusted = out.untrusted_from.has_value();
    }
  }
  out.max_level = engine.evaluator().max_level_used();
  return out;
}

Outcome run_parallel(SampleEngine& proto, const Denominators& den, bool retain,
                     int threads, std::size_t block_size) {
  const std::uint64_t nblocks = (den.count + block_size - 1) / block_size;
  std::vector<BlockSummary> blocks(nblocks);
  int max_level = 0;
#pragma omp parallel num_threads(threads) reduction(max : max_level)
  {
    SampleEngine engine = proto;
#pragma omp for schedule(dynamic, 1)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(nblocks); ++i) {
      const std::uint64_t begin = static_cast<std::uint64_t>(i) * block_size;
      const std::uint64_t end = std::min<std::uint64_t>(begin + block_size, den.count);
      try {
        blocks[i] = run_block(engine, den, begin, end, retain);
      } catch (...) {
        blocks[i].error = std::current_exception();
      }
    }
    max_level = engine.evaluator().max_level_used();
  }
  for (const BlockSummary& b : blocks) {
    if (b.error) std::rethrow_exception(b.error);
  }

  // Ordered merge: a global record is a block-local record that also beats
  // everything before the block; minima combine left to right.
  Outcome out;
  out.tracker.track_record_score = true;
  if (retain) out.samples.reserve(den.count);
  for (BlockSummary& block : blocks) {
    Tracker& local = block.tracker;
    for (std::size_t r = 0; r < local.records.size(); ++r) {
      if (!out.tracker.offer_record(proto, local.records[r]) && retain) {
        block.samples[local.record_slots[r]].is_record = false;
      }
    }
    if (local.best_score) out.tracker.offer_score(proto, *local.best_score);
    if (local.best_log) out.tracker.offer_log(proto, *local.best_log);
    if (retain) {
      std::move(block.samples.begin(), block.samples.end(),
                std::back_inserter(out.samples));
    }
    block = BlockSummary{};
  }
  out.max_level = std::max(max_level, proto.evaluator().max_level_used());
  return out;
}

SweepResult run_sweep(const RealSpec& spec, const NormalizationRule& rule,
                      const Denominators& den, const SweepOptions& options) {
  rule.validate();
  if (den.count == 0) throw std::invalid_argument("sweep bound must be >= 1");
  const bool retain = options.retention == Retention::full;
  if (retain && den.max() > options.retention_cap) {
    throw RetentionLimitError("full retention requested for bound " +
                              std::to_string(den.max()) + " above cap " +
                              std::to_string(options.retention_cap));
  }
  const std::uint64_t bmax = den.max();
  const int base_bits = options.initial_bits > 0
                            ? options.initial_bits
                            : initial_precision(rule.score_exponent, bmax);
  Evaluator evaluator(spec, rule.k, bmax, base_bits);
  SampleEngine engine(evaluator, rule, detail::make_log_weights(rule, bmax));

  const bool serial = options.threads <= 1 || evaluator.uncertainty().has_value();
  Outcome out = serial ? run_serial(engine, den, retain)
                       : run_parallel(engine, den, retain, options.threads,
                                      std::max<std::size_t>(1, options.block_size));

  SweepResult result{spec, rule, bmax, {}, {}, {}, 0, {}, 0, {}, 0, {}, {}, 0, 0};
  result.base_bits = base_bits;
  result.max_bits = evaluator.bits(out.max_level);
  auto untrusted = [&](std::uint64_t b) {
    return out.untrusted_from && b >= *out.untrusted_from;
  };
  for (const Point& r : out.tracker.records) {
    ApproxSample s = engine.report(r.b);
    s.is_record = true;
    s.untrusted = untrusted(r.b);
    result.records.push_back(std::move(s));
  }
  if (out.tracker.records.back().err.is_zero()) {
    result.exact_hit = out.tracker.records.back().b;
  }
  const std::uint64_t argmin = out.tracker.best_score->b;
  result.c_all = engine.report(argmin).score;
  result.c_all_argmin = argmin;
  const std::uint64_t rec_argmin = out.tracker.best_record_score->b;
  result.c_records = engine.report(rec_argmin).score;
  result.c_records_argmin = rec_argmin;
  if (out.tracker.best_log) {
    const std::uint64_t b = out.tracker.best_log->b;
    result.log_min = *engine.report(b).log_score;
    result.log_min_argmin = b;
  }
  if (evaluator.uncertainty()) {
    result.trust_bound = out.untrusted_from ? *out.untrusted_from - 1 : bmax;
  }
  result.samples = std::move(out.samples);
  for (ApproxSample& s : result.samples) s.untrusted = untrusted(s.b);
  return result;
}

}  // namespace

SweepResult sweep(const RealSpec& spec, const NormalizationRule& rule,
                  std::uint64_t bmax, const SweepOptions& options) {
  return run_sweep(spec, rule, Denominators{bmax, nullptr}, options);
}

SweepResult sweep_denominators(const RealSpec& spec,
                               const NormalizationRule& rule,
                               const std::vector<std::uint64_t>& denominators,
                               const SweepOptions& options) {
  if (denominators.empty()) throw std::invalid_argument("no denominators");
  if (denominators.front() == 0 ||
      !std::is_sorted(denominators.begin(), denominators.end(),
                      std::less_equal<>())) {
    throw std::invalid_argument("denominators must be positive and strictly ascending");
  }
  return run_sweep(spec, rule, Denominators{denominators.size(), &denominators},
                   options);
}

std::int64_t best_numerator(const RealSpec& spec, std::uint64_t b, int k) {
  if (b == 0) throw std::invalid_argument("b must be >= 1");
  Evaluator evaluator(spec, k, b, initial_precision(k + 1, b));
  std::int64_t a = 0;
  Quantity offset;
  evaluator.nearest(b, 0, a, offset);
  if (!evaluator.rounding_robust(b, offset)) {
    throw CertificationError("decimal literal " + spec.text() +
                                 " cannot decide the nearest numerator at b=" +
                                 std::to_string(b),
                             0, b);
  }
  return a;
}

BallValue error_at(const RealSpec& spec, std::uint64_t b, int k) {
  if (b == 0) throw std::invalid_argument("b must be >= 1");
  const NormalizationRule rule{k, k + 1, std::nullopt};
  rule.validate();
  Evaluator evaluator(spec, k, b, initial_precision(k + 1, b));
  SampleEngine engine(evaluator, rule, nullptr);
  Point p;
  engine.fill(b, p);
  if (!engine.evaluator().rounding_robust(b, p.offset)) {
    throw CertificationError("decimal literal " + spec.text() +
                                 " cannot decide the nearest numerator at b=" +
                                 std::to_string(b),
                             0, b);
  }
  return engine.report(p).error;
}

CEstimate estimate_c(const SweepResult& result) {
  if (result.rule.score_exponent != result.rule.k + 1) {
    throw std::invalid_argument("estimate_c needs score exponent k + 1");
  }
  return CEstimate{result.c_all, result.c_records, result.c_all_argmin,
                   result.exact_hit.has_value()};
}

LogInfimum bf_inf(const SweepResult& result, const mpq_class& epsilon) {
  if (result.rule.k != 2 || result.rule.score_exponent != 3) {
    throw std::invalid_argument("bf_inf needs k = 2 and score exponent 3");
  }
  if (!result.rule.log_epsilon || *result.rule.log_epsilon != epsilon) {
    throw std::invalid_argument("sweep was not run with this log epsilon");
  }
  if (!result.log_min) {
    throw std::invalid_argument("bf_inf needs a sweep bound of at least 2");
  }
  return LogInfimum{*result.log_min, result.log_min_argmin};
}

}  // namespace diolab
