#pragma once

#include <cstdint>

#include "oblate/dcoeff.hpp"
#include "oblate/scaled.hpp"

namespace oblate {

// Overall scale carried by public angular values.
enum class NormScheme {
  unit_norm,      // integral of S^2 over [-1, 1] equals 1
  legendre_norm,  // same norm as the order-m Legendre function of degree l
};

// Exponent used for the divergent endpoint derivative (order m = 1 at
// eta = +-1).  It sits far beyond both the native range and any exponent a
// finite angular value can reach, so to_native() reports overflow and the
// rendered text is self-evidently a flag rather than a number.
inline constexpr std::int64_t kDivergentExponent = 1'000'000'000;

struct AngularResult {
  ScaledReal s;
  ScaledReal ds_deta;
  int subtraction_error_s = 0;   // decimal digits of s lost to cancellation
  int subtraction_error_ds = 0;  // same for the derivative
  int terms_used = 0;            // expansion terms summed before truncation
};

// Angular function of the first kind and its eta-derivative at a point
// eta in [-1, 1], via the order-m Legendre expansion of the coefficient
// set.  Positive and negative contributions are accumulated separately so
// the subtraction errors report how many leading digits cancelled; the
// series is cut once five consecutive terms fall below 10^-kNdec of the
// accumulated magnitude while decaying.
//
// Endpoints eta = +-1 use the closed limits of the Legendre values: for
// m >= 3 both the function and derivative vanish, for m = 2 the function
// vanishes and the derivative has a finite limit, for m = 1 the derivative
// diverges and is reported with kDivergentExponent (sign preserved), and
// for m = 0 both are finite.
//
// Throws std::invalid_argument for |eta| > 1 (or NaN) or an empty
// coefficient set.
AngularResult angular_first_kind(const DCoefficients& coeffs, double eta,
                                 NormScheme norm = NormScheme::legendre_norm);

}  // namespace oblate
