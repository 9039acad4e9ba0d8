#pragma once

#include <vector>

#include "oblate/dcoeff.hpp"
#include "oblate/eigen.hpp"
#include "oblate/radial.hpp"

namespace oblate {

// One weighted coefficient sum with its cancellation bookkeeping.
struct SeriesSum {
  ScaledReal value;
  int subtraction_error = 0;
  int terms_used = 0;
};

// sum_n d_n (n+2m)!/n! over the stored parity class: the denominator of the
// eta = 1 radial expressions and the joining factor of the second-kind
// Legendre expansion.  Robust (no cancellation) for oblate coefficient sets.
SeriesSum factorial_ratio_sum(const DCoefficients& dc);

// First-kind radial function by the eta = 1 spherical Bessel expansion:
//   R1 = ((xi^2+1)/xi^2)^(m/2) * [sum_n phase_n d_n (n+2m)!/n! j_{n+m}(c xi)]
//        / [sum_n d_n (n+2m)!/n!],
// phase_n = (-1)^((n-(l-m))/2), summed outward from n = l-m.  The derivative
// is term-wise; accuracy = kNdec minus the worst subtraction error recorded
// among numerator, derivative numerator, and denominator.  Requires xi > 0
// (use r1_xi_zero at xi = 0) and c > 0.
RadialResult r1_traditional(const DCoefficients& dc, double xi);

// First-kind radial function evaluated on the line eta = cos(theta),
// theta in [0, pi/2]:
//   R1 = [sum_n phase_n d_n j_{n+m}(c sqrt(xi^2-eta^2+1))
//                         P^m_{n+m}(eta xi / sqrt(xi^2-eta^2+1))]
//        / [sum_n d_n P^m_{n+m}(eta)].
// theta = 0 delegates to r1_traditional; eta below roundoff uses the exact
// eta = 0 forms (even degree offsets use the Legendre values at zero, odd
// ones their derivatives with a xi/sqrt(xi^2+1) prefactor).
RadialResult r1_variable_eta(const DCoefficients& dc, double xi, double theta);

// Exact xi = 0 values: for even l-m the function comes from the lowest term
// of the eta = 1 expansion and the derivative vanishes; for odd l-m the
// function vanishes and the derivative comes from the lowest term.
RadialResult r1_xi_zero(const DCoefficients& dc);

// First-kind values for l = m .. m + l_count - 1 with the eta-stepping
// policy: each l starts from the previous l's theta (initially 0); when the
// subtraction error is not near zero the angle is stepped in 0.05-radian
// increments toward smaller error; once theta comes back to zero the
// traditional path serves all higher l.  The overload taking a coefficient
// table avoids rebuilding the d sets when the caller already has them.
std::vector<RadialResult> r1_table(double xi, const std::vector<DCoefficients>& coeffs);
std::vector<RadialResult> r1_table(int m, double c, double xi, int l_count,
                                   const EigenTable& table);

// d-coefficient sets for l = m .. m + l_count - 1 from one eigenvalue table.
std::vector<DCoefficients> coefficient_table(int m, double c, int l_count,
                                             const EigenTable& table);

}  // namespace oblate
