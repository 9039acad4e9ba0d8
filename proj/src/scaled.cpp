#include "oblate/scaled.hpp"

#include <cfloat>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <vector>

namespace oblate {

namespace {

// Evaluate characteristic * 10^e exactly the way to_native() does, so the
// nudging loop in normalize() targets the real round-trip function.
double eval_native(double characteristic, std::int64_t e) {
  return static_cast<double>(static_cast<long double>(characteristic) * pow10_ld(e));
}

}  // namespace

long double pow10_ld(std::int64_t k) {
  // Table for the exponents that appear in practice; powl fallback beyond.
  constexpr int kTableHalf = 400;
  static const std::vector<long double> table = [] {
    std::vector<long double> t(2 * kTableHalf + 1);
    for (int i = -kTableHalf; i <= kTableHalf; ++i)
      t[static_cast<size_t>(i + kTableHalf)] = powl(10.0L, static_cast<long double>(i));
    return t;
  }();
  if (k >= -kTableHalf && k <= kTableHalf)
    return table[static_cast<size_t>(k + kTableHalf)];
  return powl(10.0L, static_cast<long double>(k));
}

ScaledReal normalize_parts(long double mantissa, std::int64_t exponent) {
  if (mantissa == 0.0L) return {};
  const bool neg = mantissa < 0.0L;
  long double am = fabsl(mantissa);
  if (am >= 10.0L || am < 1.0L) {
    const auto shift = static_cast<std::int64_t>(floorl(log10l(am)));
    am *= pow10_ld(-shift);
    exponent += shift;
    // floorl(log10l) can be off by one at decade boundaries; fix up.
    while (am >= 10.0L) {
      am /= 10.0L;
      ++exponent;
    }
    while (am < 1.0L) {
      am *= 10.0L;
      --exponent;
    }
  }
  double ch = static_cast<double>(am);
  if (ch >= 10.0) {  // conversion to double rounded 9.999...9 up
    ch /= 10.0;
    ++exponent;
  }
  return {neg ? -ch : ch, exponent};
}

ScaledReal normalize(double value, std::int64_t extra_exponent) {
  if (!std::isfinite(value))
    throw std::invalid_argument("ScaledReal: cannot normalize a non-finite value");
  if (value == 0.0) return {};

  ScaledReal r = normalize_parts(static_cast<long double>(value), 0);
  const bool neg = r.characteristic < 0.0;
  double ch = std::fabs(r.characteristic);
  const double target = std::fabs(value);

  if (eval_native(ch, r.exponent) != target) {
    // Walk a few ulps in each direction looking for an exact round trip.
    double up = ch;
    double down = ch;
    for (int step = 0; step < 3; ++step) {
      up = std::nextafter(up, 11.0);
      if (up < 10.0 && eval_native(up, r.exponent) == target) {
        ch = up;
        break;
      }
      down = std::nextafter(down, 0.0);
      if (down >= 1.0 && eval_native(down, r.exponent) == target) {
        ch = down;
        break;
      }
    }
  }
  return {neg ? -ch : ch, r.exponent + extra_exponent};
}

ScaledReal scaled_mul(const ScaledReal& a, const ScaledReal& b) {
  if (a.characteristic == 0.0 || b.characteristic == 0.0) return {};
  return normalize_parts(
      static_cast<long double>(a.characteristic) * static_cast<long double>(b.characteristic),
      a.exponent + b.exponent);
}

ScaledReal scaled_div(const ScaledReal& a, const ScaledReal& b) {
  if (b.characteristic == 0.0) throw std::domain_error("ScaledReal: division by zero");
  if (a.characteristic == 0.0) return {};
  return normalize_parts(
      static_cast<long double>(a.characteristic) / static_cast<long double>(b.characteristic),
      a.exponent - b.exponent);
}

ScaledReal scaled_add(const ScaledReal& a, const ScaledReal& b) {
  if (a.characteristic == 0.0) return b;
  if (b.characteristic == 0.0) return a;
  const ScaledReal& big = (a.exponent >= b.exponent) ? a : b;
  const ScaledReal& small = (a.exponent >= b.exponent) ? b : a;
  const std::int64_t diff = big.exponent - small.exponent;
  if (diff > 24) return big;  // below extended-precision resolution
  const long double sum = static_cast<long double>(big.characteristic) +
                          static_cast<long double>(small.characteristic) * pow10_ld(-diff);
  return normalize_parts(sum, big.exponent);
}

ScaledReal scaled_sub(const ScaledReal& a, const ScaledReal& b) { return scaled_add(a, scaled_neg(b)); }

ScaledReal scaled_neg(const ScaledReal& a) {
  if (a.characteristic == 0.0) return {};
  return {-a.characteristic, a.exponent};
}

ScaledReal scaled_abs(const ScaledReal& a) { return {std::fabs(a.characteristic), a.exponent}; }

ScaledReal scaled_sqrt(const ScaledReal& a) {
  if (a.characteristic < 0.0) throw std::domain_error("ScaledReal: sqrt of a negative value");
  if (a.characteristic == 0.0) return {};
  long double ch = static_cast<long double>(a.characteristic);
  std::int64_t e = a.exponent;
  if (e % 2 != 0) {  // make the exponent even so it halves exactly
    ch *= 10.0L;
    e -= 1;
  }
  return normalize_parts(sqrtl(ch), e / 2);
}

bool is_zero(const ScaledReal& a) { return a.characteristic == 0.0; }

int compare_magnitude(const ScaledReal& a, const ScaledReal& b) {
  const bool az = a.characteristic == 0.0;
  const bool bz = b.characteristic == 0.0;
  if (az && bz) return 0;
  if (az) return -1;
  if (bz) return 1;
  if (a.exponent != b.exponent) return a.exponent < b.exponent ? -1 : 1;
  const double am = std::fabs(a.characteristic);
  const double bm = std::fabs(b.characteristic);
  if (am < bm) return -1;
  if (am > bm) return 1;
  return 0;
}

double log10_magnitude(const ScaledReal& a) {
  if (a.characteristic == 0.0) return -std::numeric_limits<double>::infinity();
  return std::log10(std::fabs(a.characteristic)) + static_cast<double>(a.exponent);
}

NativeResult to_native(const ScaledReal& a) {
  if (a.characteristic == 0.0) return {0.0, NativeStatus::ok};
  if (a.exponent > 320) {
    return {a.characteristic > 0 ? HUGE_VAL : -HUGE_VAL, NativeStatus::overflow};
  }
  if (a.exponent < -340) return {0.0, NativeStatus::underflow};
  const long double v = static_cast<long double>(a.characteristic) * pow10_ld(a.exponent);
  const double d = static_cast<double>(v);
  if (!std::isfinite(d)) return {d, NativeStatus::overflow};
  if (d == 0.0) return {0.0, NativeStatus::underflow};
  return {d, NativeStatus::ok};
}

std::string render(const ScaledReal& a) {
  double ch = a.characteristic;
  std::int64_t e = a.exponent;
  char mantissa[64];
  std::snprintf(mantissa, sizeof mantissa, "%.15f", ch);
  std::string digits = mantissa;
  std::string sign;
  if (!digits.empty() && digits[0] == '-') {
    sign = "-";
    digits.erase(0, 1);
  }
  if (digits.size() > 1 && digits[1] != '.') {
    // Defensive: a characteristic at or above 10 shifts into the exponent.
    digits = "1.000000000000000";
    e += 1;
  }
  char out[96];
  std::snprintf(out, sizeof out, "%s%sE%+05lld", sign.c_str(), digits.c_str(),
                static_cast<long long>(e));
  return out;
}

}  // namespace oblate
