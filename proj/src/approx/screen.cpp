#include <algorithm>
#include <exception>

#include "diolab/approx.hpp"

namespace diolab {

std::vector<ScreenEntry> screen(const std::vector<RealSpec>& candidates,
                                const NormalizationRule& rule,
                                std::uint64_t bmax, int threads) {
  rule.validate();
  if (rule.score_exponent != rule.k + 1) {
    throw std::invalid_argument("screening needs score exponent k+1");
  }
  std::vector<ScreenEntry> entries;
  entries.reserve(candidates.size());
  SweepOptions options;
  options.threads = threads;
  for (const RealSpec& spec : candidates) {
    ScreenEntry entry{spec, std::nullopt, 0, std::nullopt, {}, true};
    try {
      const SweepResult result = sweep(spec, rule, bmax, options);
      entry.estimate = estimate_c(result);
      entry.record_count = result.records.size();
      entry.exact_hit = result.exact_hit;
    } catch (const std::exception& e) {
      entry.error = e.what();
    }
    entries.push_back(std::move(entry));
  }
  // failures sink to the bottom; otherwise descending c_all, then text
  std::stable_sort(entries.begin(), entries.end(),
                   [](const ScreenEntry& x, const ScreenEntry& y) {
                     if (x.estimate.has_value() != y.estimate.has_value()) {
                       return x.estimate.has_value();
                     }
                     if (x.estimate) {
                       const int c = cmp(x.estimate->c_all.center, y.estimate->c_all.center);
                       if (c != 0) return c > 0;
                     }
                     return x.spec.text() < y.spec.text();
                   });
  for (std::size_t i = 1; i < entries.size(); ++i) {
    const auto& prev = entries[i - 1].estimate;
    const auto& cur = entries[i].estimate;
    if (!prev || !cur) continue;
    // certified only if prev's ball lies strictly above cur's
    entries[i].order_certified = prev->c_all.lower() > cur->c_all.upper();
  }
  return entries;
}

}  // namespace diolab
