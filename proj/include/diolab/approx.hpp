#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "diolab/ball.hpp"
#include "diolab/real.hpp"

namespace diolab {

/// Which power of b divides the numerator and which power weights the error.
struct NormalizationRule {
  int k = 1;
  int score_exponent = 2;
  /// When set, scores are additionally weighted by ln^(1+eps)(b).
  std::optional<mpq_class> log_epsilon;

  static NormalizationRule hurwitz() { return {1, 2, std::nullopt}; }
  static NormalizationRule conjecture() { return {2, 3, std::nullopt}; }
  static NormalizationRule borosh_fraenkel(const mpq_class& eps) {
    return {2, 3, eps};
  }
  /// Throws std::invalid_argument unless k in {1,2}, score_exponent > k and
  /// log_epsilon > 0.
  void validate() const;
};

struct ApproxSample {
  std::uint64_t b = 0;
  std::int64_t a = 0;
  BallValue error;   // |alpha - a/b^k|
  BallValue score;   // b^score_exponent * error
  std::optional<BallValue> log_score;
  bool is_record = false;
  bool untrusted = false;
};

enum class Retention { records_only, full };

struct SweepOptions {
  /// 0 selects ceil(score_exponent * log2(bmax)) + 64.
  int initial_bits = 0;
  /// Worker threads; 1 runs the serial reference kernel.
  int threads = 1;
  std::size_t block_size = 4096;
  Retention retention = Retention::records_only;
  std::uint64_t retention_cap = 100000;
};

struct SweepResult {
  RealSpec spec;
  NormalizationRule rule;
  std::uint64_t bmax = 0;

  std::vector<ApproxSample> records;
  std::vector<ApproxSample> samples;  // empty unless retention = full

  BallValue c_all;
  std::uint64_t c_all_argmin = 0;
  BallValue c_records;
  std::uint64_t c_records_argmin = 0;
  std::optional<BallValue> log_min;  // over b in [2, bmax]
  std::uint64_t log_min_argmin = 0;

  std::optional<std::uint64_t> exact_hit;
  /// Decimal literals only: the largest b for which no reported decision can
  /// be flipped by the literal's uncertainty.
  std::optional<std::uint64_t> trust_bound;
  int base_bits = 0;
  int max_bits = 0;  // highest working precision any decision needed
};

/// Precision at which sweeps up to bmax start.
int initial_precision(int score_exponent, std::uint64_t bmax);

/// Nearest integer to alpha*b^k, ties half-to-even.
std::int64_t best_numerator(const RealSpec& spec, std::uint64_t b, int k);

/// Certified |alpha - a/b^k| for the nearest a. Exact for rational alpha.
BallValue error_at(const RealSpec& spec, std::uint64_t b, int k);

/// Block-parallel sweep over b = 1..bmax (serial when threads == 1).
SweepResult sweep(const RealSpec& spec, const NormalizationRule& rule,
                  std::uint64_t bmax, const SweepOptions& options = {});

/// Sweep over an explicit ascending list of denominators.
SweepResult sweep_denominators(const RealSpec& spec,
                               const NormalizationRule& rule,
                               const std::vector<std::uint64_t>& denominators,
                               const SweepOptions& options = {});

struct CEstimate {
  BallValue c_all;
  BallValue c_records;
  std::uint64_t argmin_b = 0;
  bool exact_hit = false;
};

/// Minimum score over the sweep; requires score_exponent = k + 1.
CEstimate estimate_c(const SweepResult& result);

struct LogInfimum {
  BallValue value;
  std::uint64_t argmin_b = 0;
};

/// min over b in [2, bmax] of b^3 ln^(1+eps)(b) |alpha - a/b^2|. The sweep
/// must have been run with NormalizationRule::borosh_fraenkel(epsilon).
LogInfimum bf_inf(const SweepResult& result, const mpq_class& epsilon);

struct HurwitzSolution {
  std::int64_t a = 0;
  std::uint64_t b = 0;
};

struct HurwitzResult {
  std::vector<HurwitzSolution> solutions;
  /// Candidates whose comparison could not be certified.
  std::vector<HurwitzSolution> undecided;
  int max_bits = 0;
};

/// All (a, b), b <= bmax, with |alpha - a/b| < c/b^2. The threshold must be
/// positive; it may be rational or a quadratic irrational.
HurwitzResult hurwitz_solutions(const RealSpec& spec, const RealSpec& c,
                                std::uint64_t bmax, int threads = 1);

struct ZaharescuResult {
  std::uint64_t count = 0;
  std::vector<std::uint64_t> witnesses;  // first `witness_cap` hits
  std::vector<std::uint64_t> undecided;
  int max_bits = 0;
};

/// Number of b <= bmax with |alpha - a/b^2| < 1/b^(2+theta), 0 < theta < 2/3.
ZaharescuResult zaharescu_count(const RealSpec& spec, const mpq_class& theta,
                                std::uint64_t bmax, int threads = 1,
                                std::size_t witness_cap = 1000);

struct ScreenEntry {
  RealSpec spec;
  std::optional<CEstimate> estimate;
  std::size_t record_count = 0;
  std::optional<std::uint64_t> exact_hit;
  std::string error;  // non-empty when the candidate failed
  /// False when the c estimate overlaps the previous entry's and the order
  /// between them falls back to ball centers.
  bool order_certified = true;
};

/// Candidates ranked by descending c_all; ties broken by canonical text.
std::vector<ScreenEntry> screen(const std::vector<RealSpec>& candidates,
                                const NormalizationRule& rule,
                                std::uint64_t bmax, int threads = 1);

}  // namespace diolab
