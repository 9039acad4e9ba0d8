#pragma once

#include <cstdint>
#include <vector>

#include "oblate/scaled.hpp"

namespace oblate {

// ---------------------------------------------------------------------------
// Factorial-type building blocks (exact integer products carried in scaled
// form so they never overflow).
// ---------------------------------------------------------------------------

// k! for k >= 0.
ScaledReal scaled_factorial(std::int64_t k);

// k!! for k >= -1, with (-1)!! == 0!! == 1.
ScaledReal scaled_double_factorial(std::int64_t k);

// a^k for integer k (k may be negative; a must be nonzero in that case).
ScaledReal scaled_pow_int(const ScaledReal& a, std::int64_t k);

// ---------------------------------------------------------------------------
// Spherical Bessel functions.
// ---------------------------------------------------------------------------

// j_n(x) for n = 0..n_max, x >= 0.  Downward recursion normalized against
// j_0 = sin(x)/x, so values stay accurate deep into the decaying tail where
// natives would underflow.
std::vector<ScaledReal> spherical_bessel_j(double x, int n_max);

// y_n(x) for n = 0..n_max, x > 0.  Upward recursion (stable for y), with
// exponent stripping once values outgrow native range.
std::vector<ScaledReal> spherical_neumann_y(double x, int n_max);

// Derivatives with respect to the argument for either family:
// f'_n = f_{n-1} - (n+1) f_n / x, and f'_0 = -f_1.
std::vector<ScaledReal> spherical_derivative(const std::vector<ScaledReal>& f, double x);

// ---------------------------------------------------------------------------
// Gauss-Legendre quadrature on [-1, 1].
// ---------------------------------------------------------------------------

struct QuadratureRule {
  std::vector<double> node;
  std::vector<double> weight;
};

QuadratureRule gauss_legendre_rule(int order);

// ---------------------------------------------------------------------------
// Associated Legendre functions of integer order m.
//
// All routines use the convention P^m_m(x) = +(2m-1)!! (1-x^2)^{m/2} (no
// alternating order phase), which keeps every recursion coefficient and
// anchor positive.
// ---------------------------------------------------------------------------

// P^m_{m+n}(eta) and d/d(eta) for n = 0..n_max at a fixed |eta| < 1.
struct RealLegendreSet {
  std::vector<ScaledReal> p;
  std::vector<ScaledReal> dp;
};

RealLegendreSet legendre_p(int m, double eta, int n_max);

// Exact chains for eta = 0 (odd-n values and even-n derivatives vanish).
RealLegendreSet legendre_p_at_zero(int m, int n_max);

// ---------------------------------------------------------------------------
// Legendre functions on the imaginary axis, phase-stripped.
//
// With z = i*xi the first and second kind functions factor into a fixed
// power of i times a real, sign-definite magnitude for degrees >= m:
//
//   P^m_nu(i xi) ->  phat_nu > 0     (grows with degree)
//   Q^m_nu(i xi) ->  qhat_nu > 0     (decays with degree)
//
// The recursions below run entirely in those stripped magnitudes, so no
// complex arithmetic or sign cancellation is involved.  qhat is extended
// downward through degrees below m (to nu = -m); the extended entries are
// the analytic continuation the expansions require and may change sign.
// ---------------------------------------------------------------------------

struct ImagLegendreP {
  int order_m = 0;
  // index nu - m holds degree nu, for nu = m..max_degree
  std::vector<ScaledReal> p;
  std::vector<ScaledReal> dp;  // d/d(xi)
};

ImagLegendreP legendre_p_imag(int m, double xi, int max_degree);

struct ImagLegendreQ {
  int order_m = 0;
  // index nu + m holds degree nu, for nu = -m..max_degree
  std::vector<ScaledReal> q;
  std::vector<ScaledReal> dq;  // d/d(xi)
};

// xi == 0 uses exact parity chains; xi > 0 uses a backward continued
// fraction whose depth grows like 1/asinh(xi).  Throws NumericalError when
// xi is so small that the required depth is impractical (around 2e-7).
ImagLegendreQ legendre_q_imag(int m, double xi, int max_degree);

}  // namespace oblate
