#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "bounds_table.hpp"
#include "diolab/approx.hpp"
#include "diolab/interval.hpp"
#include "evaluator.hpp"

namespace diolab::detail {

/// One denominator's state while a sweep decides records and minima.
struct Point {
  std::uint64_t b = 0;
  std::int64_t a = 0;
  int level = 0;
  Quantity offset;  // alpha*b^k - a
  Quantity err;     // |alpha - a/b^k|
  Quantity score;   // b^s * err
  bool has_log = false;
  Quantity log_score;
};

/// Fills points and decides strict comparisons between them, raising the
/// precision of both operands until the order is certified.
class SampleEngine {
 public:
  SampleEngine(const Evaluator& evaluator, const NormalizationRule& rule,
               std::shared_ptr<const MonotoneBounds> log_weights);

  /// Canonical evaluation: the lowest level that certifies the rounding.
  void fill(std::uint64_t b, Point& p);
  /// Recomputes at the next level; throws CertificationError at the top.
  void refine(Point& p);
  void compute_log(Point& p);

  bool error_less(Point& x, Point& y);
  bool score_less(Point& x, Point& y);
  bool log_less(Point& x, Point& y);
  /// Cheap certified pre-check: false means x cannot beat `best`'s log score.
  bool log_may_beat(const Point& x, const Point& best) const;
  /// a_x/b_x^k == a_y/b_y^k: the errors coincide for every alpha.
  bool same_fraction(const Point& x, const Point& y) const;

  /// Canonical report for b (fresh evaluation, independent of refinements).
  ApproxSample report(std::uint64_t b);
  ApproxSample report(Point& canonical);

  Evaluator& evaluator() { return evaluator_; }
  const NormalizationRule& rule() const { return rule_; }
  bool tracks_log() const { return rule_.log_epsilon.has_value(); }

 private:
  void derive(Point& p);
  [[noreturn]] void undecided(const Point& x, const Point& y,
                              const char* what) const;

  Evaluator evaluator_;
  NormalizationRule rule_;
  std::shared_ptr<const MonotoneBounds> log_weights_;
  mpz_class pow_;
  Interval w_, e_, t_;
};

/// Running records and minima over an ordered stream of points.
struct Tracker {
  bool track_record_score = false;
  std::vector<Point> records;
  std::vector<std::size_t> record_slots;  // caller-defined index per record
  std::optional<Point> best_score;
  std::optional<Point> best_log;
  std::optional<Point> best_record_score;

  /// Offers the next point in increasing-b order; returns whether it is an
  /// error record.
  bool offer(SampleEngine& engine, Point& p, std::size_t slot = 0);
  /// Offers a candidate record only (block merges).
  bool offer_record(SampleEngine& engine, Point& p);
  void offer_score(SampleEngine& engine, Point& p);
  void offer_log(SampleEngine& engine, Point& p);
};

/// ln^(1+eps)(b) bounds for b in [2, bmax]; null when no log weight is used.
std::shared_ptr<const MonotoneBounds> make_log_weights(
    const NormalizationRule& rule, std::uint64_t bmax);

/// Encloses ln^(1+eps)(b) for b >= 2 into `out` at its precision.
void log_weight(std::uint64_t b, const mpq_class& eps, Interval& out,
                Interval& scratch);

}  // namespace diolab::detail
