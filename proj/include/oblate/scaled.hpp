#pragma once

#include <cstdint>
#include <string>

namespace oblate {

// Working precision of the library in decimal digits.  Accuracy estimates,
// agreement measures and truncation tests are all expressed on this scale.
inline constexpr int kNdec = 15;

// A real number stored as characteristic * 10^exponent with the
// characteristic kept in [1, 10) (negated for negative values) or exactly
// 0.0 with exponent 0.  The base-10 exponent is a wide integer so that
// quantities far outside native floating-point range stay representable;
// products of special-function values routinely live at 10^(+-10^4).
struct ScaledReal {
  double characteristic = 0.0;
  std::int64_t exponent = 0;
};

// Build a ScaledReal equal to value * 10^extra_exponent.  The characteristic
// is nudged (by at most a few ulps) so that to_native() reproduces `value`
// bit-exactly whenever some characteristic in range can do so; a handful of
// native values sit between reachable points, and for those the nearest
// representation is used.  Throws std::invalid_argument for NaN/infinity.
ScaledReal normalize(double value, std::int64_t extra_exponent = 0);

// Build a ScaledReal from an extended-precision mantissa times 10^exponent.
// Low-level hook used by accumulation code; no round-trip nudging.
ScaledReal normalize_parts(long double mantissa, std::int64_t exponent);

ScaledReal scaled_mul(const ScaledReal& a, const ScaledReal& b);
ScaledReal scaled_div(const ScaledReal& a, const ScaledReal& b);
ScaledReal scaled_add(const ScaledReal& a, const ScaledReal& b);
ScaledReal scaled_sub(const ScaledReal& a, const ScaledReal& b);
ScaledReal scaled_neg(const ScaledReal& a);
ScaledReal scaled_abs(const ScaledReal& a);
ScaledReal scaled_sqrt(const ScaledReal& a);

bool is_zero(const ScaledReal& a);

// -1, 0 or +1 as |a| is smaller than, equal to or larger than |b|.
int compare_magnitude(const ScaledReal& a, const ScaledReal& b);

// log10(|a|); -infinity for zero.
double log10_magnitude(const ScaledReal& a);

enum class NativeStatus { ok, overflow, underflow };

struct NativeResult {
  double value = 0.0;
  NativeStatus status = NativeStatus::ok;
};

// Convert back to a native double.  Values beyond native range come back as
// +-infinity / 0.0 with the matching status instead of raising FP traps.
NativeResult to_native(const ScaledReal& a);

// Fixed-width text form: a characteristic with kNdec digits after the
// decimal point followed by a signed four-digit (or wider) exponent, e.g.
//   -2.345678901234567E+0123     1.000000000000000E-0004
// Zero renders as 0.000000000000000E+0000.
std::string render(const ScaledReal& a);

// 10^k as a long double; valid far beyond native double range.
long double pow10_ld(std::int64_t k);

inline ScaledReal operator*(const ScaledReal& a, const ScaledReal& b) { return scaled_mul(a, b); }
inline ScaledReal operator/(const ScaledReal& a, const ScaledReal& b) { return scaled_div(a, b); }
inline ScaledReal operator+(const ScaledReal& a, const ScaledReal& b) { return scaled_add(a, b); }
inline ScaledReal operator-(const ScaledReal& a, const ScaledReal& b) { return scaled_sub(a, b); }
inline ScaledReal operator-(const ScaledReal& a) { return scaled_neg(a); }

}  // namespace oblate
