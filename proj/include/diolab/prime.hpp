#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "diolab/approx.hpp"
#include "diolab/ball.hpp"
#include "diolab/real.hpp"

namespace diolab {

/// 1 followed by every prime <= pmax, ascending.
std::vector<std::uint64_t> sieve(std::uint64_t pmax, int threads = 1);

struct PrimeSample {
  std::uint64_t p = 0;
  std::int64_t z = 0;
  BallValue error;
  std::optional<BallValue> tau;  // -ln(error)/ln(p); p >= 2, error > 0
  bool is_record = false;
  bool untrusted = false;
};

struct PrimeSweepResult {
  std::vector<PrimeSample> records;
  std::size_t denominators = 0;
  std::optional<BallValue> tau_min;
  std::optional<BallValue> tau_max;
  std::optional<BallValue> tau_last;
  std::optional<std::uint64_t> exact_hit;
  std::optional<std::uint64_t> trust_bound;
  int max_bits = 0;
};

PrimeSweepResult prime_sweep(const RealSpec& spec, std::uint64_t pmax,
                             int threads = 1);

}  // namespace diolab
