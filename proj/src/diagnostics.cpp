#include "oblate/diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace oblate {

namespace {

// Digit counts come from floors of log10 differences; the 1e-9 pad keeps
// results that are mathematically integral from dropping a digit to
// floating-point noise in the logs.
int clamp_digits(double value) {
  const double padded = std::floor(value + 1e-9);
  if (padded < 0.0) return 0;
  if (padded >= static_cast<double>(kNdec)) return kNdec;
  return static_cast<int>(padded);
}

}  // namespace

int digits_of_agreement(const ScaledReal& a, const ScaledReal& b) {
  const ScaledReal diff = scaled_sub(a, b);
  if (is_zero(diff)) return kNdec;
  const double big = std::max(log10_magnitude(a), log10_magnitude(b));
  if (std::isinf(big)) return 0;  // both zero but diff nonzero cannot happen
  return clamp_digits(big - log10_magnitude(diff));
}

int digits_of_agreement(double a, double b) {
  if (a == b) return kNdec;
  const double big = std::max(std::fabs(a), std::fabs(b));
  if (big == 0.0) return kNdec;
  const double diff = std::fabs(a - b);
  if (diff == 0.0) return kNdec;
  return clamp_digits(std::log10(big / diff));
}

void SignedAccumulator::Bucket::fold(double magnitude, std::int64_t e) {
  if (mantissa == 0.0L) {
    mantissa = magnitude;
    exponent = e;
  } else {
    const std::int64_t diff = e - exponent;
    if (diff > 30) {
      // The incoming term dwarfs the running sum: rebase onto its exponent.
      mantissa = mantissa * pow10_ld(-diff) + static_cast<long double>(magnitude);
      exponent = e;
    } else if (diff >= -30) {
      mantissa += static_cast<long double>(magnitude) * pow10_ld(diff);
    }
    // diff < -30: the term is below extended-precision resolution.
  }
  const long double am = fabsl(mantissa);
  if (am > 1e12L || (am != 0.0L && am < 1e-12L)) {
    const auto k = static_cast<std::int64_t>(floorl(log10l(am)));
    mantissa *= pow10_ld(-k);
    exponent += k;
  }
}

ScaledReal SignedAccumulator::Bucket::value() const {
  if (mantissa == 0.0L) return {};
  return normalize_parts(mantissa, exponent);
}

void SignedAccumulator::add(const ScaledReal& term) {
  add(term.characteristic, term.exponent);
}

void SignedAccumulator::add(double characteristic, std::int64_t exponent) {
  if (characteristic == 0.0) return;
  if (characteristic > 0.0) {
    pos_.fold(characteristic, exponent);
  } else {
    neg_.fold(-characteristic, exponent);
  }
}

ScaledReal SignedAccumulator::total() const {
  const bool pz = pos_.mantissa == 0.0L;
  const bool nz = neg_.mantissa == 0.0L;
  if (pz && nz) return {};
  if (nz) return pos_.value();
  if (pz) return scaled_neg(neg_.value());
  const std::int64_t base = std::max(pos_.exponent, neg_.exponent);
  const std::int64_t dp = pos_.exponent - base;
  const std::int64_t dn = neg_.exponent - base;
  if (dp < -40) return scaled_neg(neg_.value());
  if (dn < -40) return pos_.value();
  const long double t = pos_.mantissa * pow10_ld(dp) - neg_.mantissa * pow10_ld(dn);
  return normalize_parts(t, base);
}

ScaledReal SignedAccumulator::positive_magnitude() const { return pos_.value(); }

ScaledReal SignedAccumulator::negative_magnitude() const { return neg_.value(); }

int SignedAccumulator::subtraction_error() const {
  const double big =
      std::max(log10_magnitude(positive_magnitude()), log10_magnitude(negative_magnitude()));
  if (std::isinf(big)) return 0;  // nothing was accumulated
  const ScaledReal t = total();
  if (is_zero(t)) return kNdec;
  return clamp_digits(big - log10_magnitude(t));
}

bool TruncationWatch::note(double term_log, double reference_log) {
  const bool negligible = term_log <= reference_log - kNdec;
  const bool decaying = streak_ == 0 || term_log <= prev_log_;
  streak_ = (negligible && decaying) ? streak_ + 1 : 0;
  prev_log_ = term_log;
  return streak_ >= 5;
}

double accumulated_log(const SignedAccumulator& acc) {
  return std::max(log10_magnitude(acc.positive_magnitude()),
                  log10_magnitude(acc.negative_magnitude()));
}

int wronskian_accuracy(const ScaledReal& r1, const ScaledReal& r1d,
                       const ScaledReal& r2, const ScaledReal& r2d,
                       double c, double xi) {
  if (!(c > 0.0)) throw std::invalid_argument("wronskian_accuracy: c must be positive");
  const ScaledReal w = scaled_sub(scaled_mul(r1, r2d), scaled_mul(r2, r1d));
  const ScaledReal expected = normalize(1.0 / (c * (xi * xi + 1.0)));
  return digits_of_agreement(w, expected);
}

}  // namespace oblate
