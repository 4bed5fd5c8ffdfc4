#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "diolab/prime.hpp"

namespace diolab {

namespace {

constexpr std::uint64_t kSegmentOdds = 1u << 18;  // odd numbers per segment

std::uint64_t isqrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

// Odd primes up to n by a plain sieve; n is at most ~sqrt(pmax).
std::vector<std::uint64_t> small_odd_primes(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  if (n < 3) return out;
  std::vector<bool> composite(n / 2 + 1, false);  // index i <-> 2i+1
  for (std::uint64_t i = 1; 2 * i + 1 <= n; ++i) {
    if (composite[i]) continue;
    const std::uint64_t p = 2 * i + 1;
    out.push_back(p);
    for (std::uint64_t m = p * p; m <= n; m += 2 * p) composite[m / 2] = true;
  }
  return out;
}

}  // namespace

std::vector<std::uint64_t> sieve(std::uint64_t pmax, int threads) {
  if (pmax == 0) throw std::invalid_argument("pmax must be >= 1");
  std::vector<std::uint64_t> out{1};
  if (pmax >= 2) out.push_back(2);
  if (pmax < 3) return out;

  const std::vector<std::uint64_t> base = small_odd_primes(isqrt(pmax));
  // odd numbers 3, 5, ..., up to pmax: index j <-> 2j+3
  const std::uint64_t odds = (pmax - 1) / 2;
  const std::uint64_t nseg = (odds + kSegmentOdds - 1) / kSegmentOdds;
  std::vector<std::vector<std::uint64_t>> found(nseg);

#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(1, threads))
  for (std::int64_t s = 0; s < static_cast<std::int64_t>(nseg); ++s) {
    const std::uint64_t j0 = static_cast<std::uint64_t>(s) * kSegmentOdds;
    const std::uint64_t j1 = std::min(j0 + kSegmentOdds, odds);
    const std::uint64_t lo = 2 * j0 + 3;
    const std::uint64_t hi = 2 * (j1 - 1) + 3;
    std::vector<char> composite(j1 - j0, 0);
    for (std::uint64_t p : base) {
      if (p * p > hi) break;
      std::uint64_t m = std::max(p * p, (lo + p - 1) / p * p);
      if (m % 2 == 0) m += p;
      for (; m <= hi; m += 2 * p) composite[(m - lo) / 2] = 1;
    }
    auto& seg = found[s];
    for (std::uint64_t j = 0; j < j1 - j0; ++j) {
      if (!composite[j]) seg.push_back(lo + 2 * j);
    }
  }
  for (const auto& seg : found) out.insert(out.end(), seg.begin(), seg.end());
  return out;
}

}  // namespace diolab
