#include "engine.hpp"

#include <string>

#include "diolab/errors.hpp"

namespace diolab::detail {

void log_weight(std::uint64_t b, const mpq_class& eps, Interval& out,
                Interval& scratch) {
  scratch.set_precision(out.precision());
  scratch.set(mpq_class(1 + eps));
  mpfr_log_ui(out.lo(), b, MPFR_RNDD);
  mpfr_log_ui(out.hi(), b, MPFR_RNDU);
  if (b >= 3) {  // ln b > 1: increasing in the exponent
    mpfr_pow(out.lo(), out.lo(), scratch.lo(), MPFR_RNDD);
    mpfr_pow(out.hi(), out.hi(), scratch.hi(), MPFR_RNDU);
  } else {  // ln 2 < 1: decreasing in the exponent
    mpfr_pow(out.lo(), out.lo(), scratch.hi(), MPFR_RNDD);
    mpfr_pow(out.hi(), out.hi(), scratch.lo(), MPFR_RNDU);
  }
}

std::shared_ptr<const MonotoneBounds> make_log_weights(
    const NormalizationRule& rule, std::uint64_t bmax) {
  if (!rule.log_epsilon || bmax < 2) return nullptr;
  const mpq_class eps = *rule.log_epsilon;
  Interval w(64), scratch(64);
  return std::make_shared<MonotoneBounds>(
      2, bmax, true, [&](std::uint64_t g, mpfr_ptr lo, mpfr_ptr hi) {
        log_weight(g, eps, w, scratch);
        mpfr_set(lo, w.lo(), MPFR_RNDD);
        mpfr_set(hi, w.hi(), MPFR_RNDU);
      });
}

SampleEngine::SampleEngine(const Evaluator& evaluator,
                           const NormalizationRule& rule,
                           std::shared_ptr<const MonotoneBounds> log_weights)
    : evaluator_(evaluator), rule_(rule), log_weights_(std::move(log_weights)) {}

void SampleEngine::derive(Point& p) {
  const int extra = rule_.score_exponent - rule_.k;
  if (p.offset.exact) {
    const mpq_class d = abs(*p.offset.exact);
    pow_ = static_cast<unsigned long>(p.b);
    mpz_pow_ui(pow_.get_mpz_t(), pow_.get_mpz_t(), static_cast<unsigned long>(rule_.k));
    if (!p.err.exact) p.err.exact.emplace();
    *p.err.exact = d / mpq_class(pow_);
    mpz_class w = static_cast<unsigned long>(p.b);
    mpz_pow_ui(w.get_mpz_t(), w.get_mpz_t(), static_cast<unsigned long>(extra));
    if (!p.score.exact) p.score.exact.emplace();
    *p.score.exact = d * mpq_class(w);
    return;
  }
  p.err.exact.reset();
  p.score.exact.reset();
  const mpfr_prec_t prec = evaluator_.precision(p.level);
  Interval& s = p.score.approx;
  s.set_precision(prec);
  mpfr_set(s.lo(), p.offset.approx.lo(), MPFR_RNDD);
  mpfr_set(s.hi(), p.offset.approx.hi(), MPFR_RNDU);
  s.set_abs();
  Interval& e = p.err.approx;
  e.set_precision(prec);
  const std::uint64_t bk = power_k(p.b, rule_.k);
  mpfr_div_ui(e.lo(), s.lo(), bk, MPFR_RNDD);
  mpfr_div_ui(e.hi(), s.hi(), bk, MPFR_RNDU);
  for (int i = 0; i < extra; ++i) {
    mpfr_mul_ui(s.lo(), s.lo(), p.b, MPFR_RNDD);
    mpfr_mul_ui(s.hi(), s.hi(), p.b, MPFR_RNDU);
  }
}

void SampleEngine::fill(std::uint64_t b, Point& p) {
  p.b = b;
  p.has_log = false;
  p.level = evaluator_.nearest(b, 0, p.a, p.offset);
  derive(p);
}

void SampleEngine::refine(Point& p) {
  if (p.level + 1 >= Evaluator::kLevels) {
    throw CertificationError("precision exhausted at b=" + std::to_string(p.b),
                             0, p.b);
  }
  ++p.level;
  evaluator_.offset(p.b, p.a, p.level, p.offset);
  evaluator_.note_level(p.level);
  derive(p);
  if (p.has_log) compute_log(p);
}

void SampleEngine::compute_log(Point& p) {
  p.has_log = true;
  if (p.score.is_zero()) {
    p.log_score.exact = mpq_class(0);
    return;
  }
  p.log_score.exact.reset();
  const mpfr_prec_t prec = evaluator_.precision(p.level);
  w_.set_precision(prec);
  log_weight(p.b, *rule_.log_epsilon, w_, e_);
  t_ = enclose(p.score, prec);
  Interval& out = p.log_score.approx;
  out.set_precision(prec);
  mpfr_mul(out.lo(), t_.lo(), w_.lo(), MPFR_RNDD);
  mpfr_mul(out.hi(), t_.hi(), w_.hi(), MPFR_RNDU);
}

bool SampleEngine::same_fraction(const Point& x, const Point& y) const {
  using i128 = __int128;
  const i128 lhs = static_cast<i128>(x.a) * static_cast<i128>(power_k(y.b, rule_.k));
  const i128 rhs = static_cast<i128>(y.a) * static_cast<i128>(power_k(x.b, rule_.k));
  return lhs == rhs;
}

void SampleEngine::undecided(const Point& x, const Point& y,
                             const char* what) const {
  throw CertificationError(std::string(what) + " of b=" + std::to_string(x.b) +
                               " and b=" + std::to_string(y.b) +
                               " undecided at maximum precision for " +
                               evaluator_.spec().text(),
                           0, x.b);
}

namespace {
bool at_top(const Point& p) { return p.level + 1 >= Evaluator::kLevels; }
}  // namespace

bool SampleEngine::error_less(Point& x, Point& y) {
  for (;;) {
    const Order o = compare(x.err, y.err);
    if (o != Order::unknown) return o == Order::less;
    // equal errors for irrational alpha only arise from the same fraction
    if (same_fraction(x, y)) return false;
    if (at_top(x) && at_top(y)) undecided(x, y, "errors");
    if (!at_top(x)) refine(x);
    if (!at_top(y)) refine(y);
  }
}

bool SampleEngine::score_less(Point& x, Point& y) {
  if (x.b == y.b) return false;
  for (;;) {
    const Order o = compare(x.score, y.score);
    if (o != Order::unknown) return o == Order::less;
    if (at_top(x) && at_top(y)) undecided(x, y, "scores");
    if (!at_top(x)) refine(x);
    if (!at_top(y)) refine(y);
  }
}

bool SampleEngine::log_less(Point& x, Point& y) {
  if (x.b == y.b) return false;
  if (!x.has_log) compute_log(x);
  if (!y.has_log) compute_log(y);
  for (;;) {
    const Order o = compare(x.log_score, y.log_score);
    if (o != Order::unknown) return o == Order::less;
    if (at_top(x) && at_top(y)) undecided(x, y, "log scores");
    if (!at_top(x)) refine(x);
    if (!at_top(y)) refine(y);
  }
}

bool SampleEngine::log_may_beat(const Point& x, const Point& best) const {
  if (!log_weights_ || x.score.exact || !best.has_log) return true;
  const double score_lo = mpfr_get_d(x.score.approx.lo(), MPFR_RNDD);
  const double weight_lo = log_weights_->bounds(x.b).first;
  const double candidate = product_down(score_lo, weight_lo);
  const double best_hi =
      best.log_score.exact ? best.log_score.exact->get_d()
                           : mpfr_get_d(best.log_score.approx.hi(), MPFR_RNDU);
  return !(candidate > best_hi);
}

ApproxSample SampleEngine::report(std::uint64_t b) {
  Point p;
  fill(b, p);
  return report(p);
}

ApproxSample SampleEngine::report(Point& p) {
  ApproxSample s;
  s.b = p.b;
  s.a = p.a;
  const int bits = evaluator_.bits(p.level);
  s.error = p.err.to_ball(bits);
  s.score = p.score.to_ball(bits);
  const bool want_log = tracks_log() && p.b >= 2;
  if (const auto& u = evaluator_.uncertainty()) {
    // the written digits are exact; the true value may be off by u
    mpz_class w = static_cast<unsigned long>(p.b);
    mpz_pow_ui(w.get_mpz_t(), w.get_mpz_t(), static_cast<unsigned long>(rule_.score_exponent));
    s.error.radius = *u;
    s.score.radius = *u * mpq_class(w);
    if (want_log) {
      const mpfr_prec_t prec = evaluator_.precision(p.level);
      Interval range(prec), weight(prec), scratch(prec);
      mpq_class lo = s.score.lower();
      if (sgn(lo) < 0) lo = 0;
      mpfr_set_q(range.lo(), lo.get_mpq_t(), MPFR_RNDD);
      mpfr_set_q(range.hi(), s.score.upper().get_mpq_t(), MPFR_RNDU);
      log_weight(p.b, *rule_.log_epsilon, weight, scratch);
      mpfr_mul(range.lo(), range.lo(), weight.lo(), MPFR_RNDD);
      mpfr_mul(range.hi(), range.hi(), weight.hi(), MPFR_RNDU);
      s.log_score = range.to_ball(bits);
    }
    return s;
  }
  if (want_log) {
    if (!p.has_log) compute_log(p);
    s.log_score = p.log_score.to_ball(bits);
  }
  return s;
}

// ---------------------------------------------------------------------------

bool Tracker::offer_record(SampleEngine& engine, Point& p) {
  if (!records.empty() && !engine.error_less(p, records.back())) return false;
  records.push_back(p);
  if (track_record_score &&
      (!best_record_score || engine.score_less(p, *best_record_score))) {
    best_record_score = p;
  }
  return true;
}

void Tracker::offer_score(SampleEngine& engine, Point& p) {
  if (!best_score || engine.score_less(p, *best_score)) best_score = p;
}

void Tracker::offer_log(SampleEngine& engine, Point& p) {
  if (!engine.tracks_log() || p.b < 2) return;
  if (!best_log) {
    if (!p.has_log) engine.compute_log(p);
    best_log = p;
    return;
  }
  if (!engine.log_may_beat(p, *best_log)) return;
  if (engine.log_less(p, *best_log)) best_log = p;
}

bool Tracker::offer(SampleEngine& engine, Point& p, std::size_t slot) {
  const bool record = offer_record(engine, p);
  if (record) record_slots.push_back(slot);
  offer_score(engine, p);
  offer_log(engine, p);
  return record;
}

}  // namespace diolab::detail
