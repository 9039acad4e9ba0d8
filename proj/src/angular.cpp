#include "oblate/angular.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "oblate/diagnostics.hpp"
#include "oblate/special.hpp"

namespace oblate {

namespace {

ScaledReal norm_multiplier(const DCoefficients& dc, NormScheme norm) {
  return norm == NormScheme::unit_norm ? dc.unit_scale() : dc.legendre_scale();
}

AngularResult assemble(const SignedAccumulator& acc_s, const SignedAccumulator& acc_ds,
                       const ScaledReal& scale, int terms) {
  AngularResult out;
  out.s = scaled_mul(acc_s.total(), scale);
  out.ds_deta = scaled_mul(acc_ds.total(), scale);
  out.subtraction_error_s = acc_s.subtraction_error();
  out.subtraction_error_ds = acc_ds.subtraction_error();
  out.terms_used = terms;
  return out;
}

AngularResult evaluate_interior(const DCoefficients& dc, double eta, NormScheme norm) {
  const RealLegendreSet leg = legendre_p(dc.m, eta, static_cast<int>(dc.n_max));
  SignedAccumulator acc_s;
  SignedAccumulator acc_ds;
  TruncationWatch watch_s;
  TruncationWatch watch_ds;
  const int peak = dc.l - dc.m;
  int terms = 0;
  for (std::int64_t n = dc.parity; n <= dc.n_max; n += 2) {
    const ScaledReal& dn = dc.d[static_cast<std::size_t>((n - dc.parity) / 2)];
    const ScaledReal term_s = scaled_mul(dn, leg.p[static_cast<std::size_t>(n)]);
    const ScaledReal term_ds = scaled_mul(dn, leg.dp[static_cast<std::size_t>(n)]);
    acc_s.add(term_s);
    acc_ds.add(term_ds);
    ++terms;
    if (n < peak) continue;
    const bool dead_s = watch_s.note(log10_magnitude(term_s), accumulated_log(acc_s));
    const bool dead_ds = watch_ds.note(log10_magnitude(term_ds), accumulated_log(acc_ds));
    if (dead_s && dead_ds) break;
  }
  return assemble(acc_s, acc_ds, norm_multiplier(dc, norm), terms);
}

// eta = +-1.  The factor (1 - eta^2)^{m/2} kills the function for m >= 1
// and the derivative for m >= 3; what survives comes from the envelope
// limit P^m_N / (1 - eta^2)^{m/2} -> (N+m)! / (2^m m! (N-m)!) at eta = 1
// together with the parity of degree N + m.
AngularResult evaluate_endpoint(const DCoefficients& dc, double eta, NormScheme norm) {
  const int m = dc.m;
  if (m >= 3) {
    AngularResult out;
    return out;
  }
  const bool at_minus = eta < 0.0;
  // Reflection eta -> -eta multiplies the degree-N Legendre function by
  // (-1)^(N+m) and its derivative (or the m = 1 divergence coefficient,
  // which shares the derivative's parity) by (-1)^(N+m+1).  With N = m + n
  // these reduce to (-1)^n and (-1)^(n+1), constant across the single
  // parity class of the sum.
  const bool odd_class = (dc.parity % 2) != 0;
  const double flip_s = (at_minus && odd_class) ? -1.0 : 1.0;
  const double flip_ds = (at_minus && !odd_class) ? -1.0 : 1.0;
  SignedAccumulator acc_s;
  SignedAccumulator acc_ds;
  TruncationWatch watch;
  int terms = 0;
  for (std::int64_t n = dc.parity; n <= dc.n_max; n += 2) {
    const ScaledReal& dn = dc.d[static_cast<std::size_t>((n - dc.parity) / 2)];
    const double bigN = static_cast<double>(m + n);
    double s_val = 0.0;
    double ds_val = 0.0;
    switch (m) {
      case 0:
        // P_N(1) = 1, P'_N(1) = N(N+1)/2; parity (-1)^N at -1 flips the
        // derivative the opposite way.
        s_val = 1.0;
        ds_val = 0.5 * bigN * (bigN + 1.0);
        break;
      case 1:
        // Derivative ~ -eta (1 - eta^2)^{-1/2} times the envelope limit
        // N(N+1)/2; only the divergence coefficient is accumulated here.
        ds_val = -0.5 * bigN * (bigN + 1.0);
        break;
      case 2:
        // d/deta [(1 - eta^2) h(eta)] at eta = 1 is -2 h(1) with
        // h(1) = (N+2)!/(8 (N-2)!).
        ds_val = -0.25 * (bigN - 1.0) * bigN * (bigN + 1.0) * (bigN + 2.0);
        break;
      default:
        break;
    }
    const ScaledReal term_s = scaled_mul(dn, normalize(flip_s * s_val));
    const ScaledReal term_ds = scaled_mul(dn, normalize(flip_ds * ds_val));
    acc_s.add(term_s);
    acc_ds.add(term_ds);
    ++terms;
    if (n < dc.l - dc.m) continue;
    if (watch.note(log10_magnitude(term_ds), accumulated_log(acc_ds))) break;
  }
  AngularResult out = assemble(acc_s, acc_ds, norm_multiplier(dc, norm), terms);
  if (m == 1) {
    // The function vanishes and the derivative is unbounded; keep the sign
    // of the divergence coefficient and flag the magnitude as overflow.
    const double sign = out.ds_deta.characteristic < 0.0 ? -1.0 : 1.0;
    out.ds_deta = ScaledReal{sign, kDivergentExponent};
  }
  return out;
}

}  // namespace

AngularResult angular_first_kind(const DCoefficients& dc, double eta, NormScheme norm) {
  if (dc.d.empty()) {
    throw std::invalid_argument("angular_first_kind: empty coefficient set");
  }
  if (!(std::fabs(eta) <= 1.0)) {
    throw std::invalid_argument("angular_first_kind: eta must lie in [-1, 1]");
  }
  if (std::fabs(eta) == 1.0) return evaluate_endpoint(dc, eta, norm);
  return evaluate_interior(dc, eta, norm);
}

}  // namespace oblate
