#pragma once

#include <cstdint>
#include <stdexcept>

#include "oblate/scaled.hpp"

namespace oblate {

// Raised when an algorithm cannot deliver a usable result (iteration failed
// to converge, a working range was exceeded, ...).  Distinct from
// std::invalid_argument / std::domain_error, which flag unusable inputs.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Number of leading decimal digits on which two estimates agree:
// floor(-log10(|a-b| / max(|a|,|b|))), clamped to [0, kNdec].
// Exact equality (including two zeros) counts as kNdec; a zero against a
// non-zero counts as 0.
int digits_of_agreement(const ScaledReal& a, const ScaledReal& b);
int digits_of_agreement(double a, double b);

// Accumulates a sum while tracking the positive and negative contributions
// separately so the cancellation loss of the total can be reported.  Terms
// are folded into extended-precision buckets (cheap enough for inner series
// loops); ScaledReals are only built on readout.
class SignedAccumulator {
 public:
  // Fold in one term.  The (characteristic, exponent) overload accepts any
  // finite characteristic, not just a normalized one.
  void add(const ScaledReal& term);
  void add(double characteristic, std::int64_t exponent);

  ScaledReal total() const;
  ScaledReal positive_magnitude() const;
  ScaledReal negative_magnitude() const;

  // Leading digits of the total lost to cancellation:
  // floor(log10(max(pos,neg) / |total|)) clamped to [0, kNdec];
  // kNdec when the total vanished entirely, 0 for an empty sum.
  int subtraction_error() const;

 private:
  struct Bucket {
    long double mantissa = 0.0L;  // value = mantissa * 10^exponent
    std::int64_t exponent = 0;
    void fold(double magnitude, std::int64_t e);
    ScaledReal value() const;
  };
  Bucket pos_;
  Bucket neg_;
};

// Detects the dead tail of a convergent series.  Feed each term's base-10
// magnitude together with the accumulated sum's magnitude; the series may be
// truncated once five consecutive terms are both negligible (more than kNdec
// decades below the reference) and non-increasing.
class TruncationWatch {
 public:
  // Returns true once the tail is confirmed dead.
  bool note(double term_log, double reference_log);

 private:
  int streak_ = 0;
  double prev_log_ = 0.0;
};

// Base-10 magnitude of the larger one-signed bucket of the accumulator: the
// cancellation-aware reference magnitude for truncation decisions (a sum
// whose total is small through cancellation still compares new terms against
// the large contributions already folded in).
double accumulated_log(const SignedAccumulator& acc);

// Digits of agreement between the computed Wronskian
// r1 * r2' - r2 * r1' and its closed form 1 / (c * (xi^2 + 1)).
// This is the standard independent accuracy check for a radial pair.
int wronskian_accuracy(const ScaledReal& r1, const ScaledReal& r1d,
                       const ScaledReal& r2, const ScaledReal& r2d,
                       double c, double xi);

}  // namespace oblate
