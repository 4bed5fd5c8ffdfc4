#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace diolab {

/// Malformed input text (real specs, thresholds, config values).
class ParseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A request for more precision than the input can honestly supply.
class PrecisionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A comparison or floor that could not be decided at the maximum working
/// precision. `certified_prefix` is meaningful for continued fractions,
/// `denominator` for sweeps (0 when not applicable).
class CertificationError : public std::runtime_error {
 public:
  CertificationError(const std::string& what, std::size_t certified_prefix,
                     std::uint64_t denominator = 0)
      : std::runtime_error(what),
        certified_prefix_(certified_prefix),
        denominator_(denominator) {}

  std::size_t certified_prefix() const { return certified_prefix_; }
  std::uint64_t denominator() const { return denominator_; }

 private:
  std::size_t certified_prefix_;
  std::uint64_t denominator_;
};

/// Full sample retention requested above the configured cap.
class RetentionLimitError : public std::length_error {
 public:
  using std::length_error::length_error;
};

}  // namespace diolab
