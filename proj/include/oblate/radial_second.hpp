#pragma once

#include <cstdint>
#include <vector>

#include "oblate/dcoeff.hpp"
#include "oblate/eigen.hpp"
#include "oblate/radial.hpp"
#include "oblate/scaled.hpp"

namespace oblate {

// Decomposition of the second-kind Legendre-function expansion at one xi:
// the infinite sum over second-kind degrees (including the continuation
// below the stored set), the sum over first-kind degrees that opens up past
// the closing row, and the joining factor that scales the assembled series
// into the normalized second-kind radial function.  Each piece carries the
// worst cancellation recorded while it was summed (function or derivative).
struct LegendreExpansionParts {
  ScaledReal q_series_sum;
  ScaledReal p_series_sum;
  ScaledReal joining_factor_kappa;
  int subtraction_error_q = 0;
  int subtraction_error_p = 0;
  int subtraction_error_kappa = 0;
};

// Eta-integrals of the angular-kernel products, shared by every degree l at
// fixed (m, c, xi).  I_a feeds the even-parity function and I_b the odd one;
// I_c and I_d feed the matching derivatives.  Index n counts degrees above
// m; entries whose parity the integrand cancels are exact zeros.  I_b is
// derived from I_c through the three-term degree relation
//   (2n+2m+1) I_b[n] = (n+2m) I_c[n-1] + (n+1) I_c[n+1]
// rather than integrated directly (I_c holds one extra entry so the
// relation covers the top row).  The builder integrates at two quadrature
// resolutions and escalates until they agree, so a returned bank is stable
// to well below the working precision.
struct IntegralBank {
  int m = 0;
  double c = 0.0;
  double xi = 0.0;
  std::vector<ScaledReal> I_a;
  std::vector<ScaledReal> I_b;
  std::vector<ScaledReal> I_c;
  std::vector<ScaledReal> I_d;
  // Verified decimal digits per entry, from the two-resolution agreement
  // less the entry's own cancellation; 0 for noise-floor entries (stored as
  // exact zero) and for the parity the integrand cancels.  The series
  // assembly weighs each term's contribution by these.
  std::vector<int> digits_a;
  std::vector<int> digits_b;
  std::vector<int> digits_c;
  std::vector<int> digits_d;
  int quadrature_order = 0;    // final panel rule order after stabilization
  int refinement_panels = 0;   // panel count over [0, 1]
};

// Ratio chain for the single-step recursion seeded at the closing row:
// ratios[k] = A_{n+1}/A_n at n = anchor_index + k.  The chain is the
// decaying solution for n >= 0 (built backward from far above the last
// retained term) and the forward continuation of the closing row below
// zero; the closing row itself fixes the first ratio because its trailing
// coefficient vanishes identically.
struct BaberHasseCoefficients {
  int m = 0;
  int l = 0;
  double c = 0.0;
  double lambda = 0.0;
  std::vector<double> ratios;
  std::int64_t anchor_index = 0;  // always -m
};

// Build the ratio chain for `count` coefficients A_{-m} .. A_{-m+count-1}.
BaberHasseCoefficients baber_hasse_coefficients(int m, int l, double c,
                                                double lambda, int count);

// Diagnostic decomposition of the Legendre-function expansion; xi = 0 is
// allowed and produces the exact-limit tables.
LegendreExpansionParts legendre_expansion_parts(const DCoefficients& dc,
                                                double xi);

// Second-kind radial function from the Legendre-function expansion.  Most
// accurate at small xi and large l - m; its cancellation grows with c and
// with xi and shrinks as l - m approaches twice the oscillation count, so it
// is the workhorse for xi <= 0.99.  Above that the expansion loses accuracy
// and the call throws std::domain_error unless `force` overrides (tests use
// the override to map the error trend).
RadialResult r2_legendre_traditional(const DCoefficients& dc, double xi,
                                     bool force = false);

// Second-kind radial function from the single-step recursion expansion.
// Effective in the intermediate band (roughly 20 < c <= 60, m <= 40) at
// small xi where the Legendre expansion cancels badly.  The quarter-turn
// ambiguity of the expansion's overall phase is resolved at run time by
// matching amplitude against the first-kind function and picking the branch
// whose Wronskian is best; a tail that has not decayed by the end of the
// coefficient chain throws NumericalError.
RadialResult r2_baber_hasse(int m, int l, double c, double lambda, double xi);

// Second-kind counterpart of the full-argument Bessel expansion, using the
// irregular spherical kernel.  The series is asymptotic: summation stops at
// the first term contributing below 10^-15 relative, otherwise it rewinds
// to the term of minimum relative contribution and the floor enters the
// subtraction error.  Works best for moderate c and xi near or above 1.
RadialResult r2_neumann_traditional(const DCoefficients& dc, double xi);

// Second-kind counterpart of the eta = 0 expansion (irregular kernel of
// argument c sqrt(xi^2+1)).  Converges for every xi but needs ~35/ln(1+xi^2)
// stored coefficient rows, so xi below 0.01 is rejected; accuracy is
// xi-independent and improves as l - m grows.
RadialResult r2_neumann_eta0(const DCoefficients& dc, double xi);

// Second-kind counterpart of the intermediate-eta expansion evaluated at
// eta = cos(theta).  theta = 0 delegates to the full-argument form and
// theta = pi/2 to the eta = 0 form; requires xi > 0.05.  Shares the
// asymptotic rewind truncation with the full-argument form.
RadialResult r2_neumann_variable_eta(const DCoefficients& dc, double xi,
                                     double theta);

// Integrate the kernel products once for degrees m .. m+n_count-1 at fixed
// (m, c, xi).  Throws NumericalError when the two-resolution check fails to
// stabilize (e.g. boundary layer below the panel resolution at tiny xi).
IntegralBank build_integral_bank(int m, double c, double xi, int n_count);

// Second-kind radial function by the integral form: the coefficient series
// against the bank entries, with the closing-row prefactor.  Accuracy is
// limited by the series cancellation (the quadrature itself is stabilized),
// holds to roughly ten digits up to the oscillation-count degree, and the
// bank is reusable across l at fixed (m, c, xi).
RadialResult r2_integral(const DCoefficients& dc, const IntegralBank& bank);

// Second-kind value copied from the first-kind value of the paired
// neighboring degree (l+1 for even l-m, l-1 for odd, with a sign flip in
// the odd case).  Valid while the eigenvalues of the pair agree to many
// digits; the claimed accuracy is that agreement minus two, floored at 0.
RadialResult r2_from_pairing(const RadialResult& r1_neighbor, int l, int m,
                             int pairing_digits);

// Exact xi = 0 values: one component follows from the Wronskian against the
// exact first-kind value (the function for odd l - m, the derivative for
// even) and is full precision; the other comes from the limiting form of
// the Legendre-function expansion and is zeroed when its cancellation eats
// to within 3 digits of the working precision.  accuracy_digits describes
// that complement component.
RadialResult r2_xi_zero(const DCoefficients& dc);

// Second-kind values with derivatives for l = m .. m + l_count - 1.  Rows
// start on the pairing shortcut while its estimate meets minacc; afterwards
// a per-regime method ladder serves each row, measuring every candidate by
// its Wronskian agreement with the first-kind table: for xi > 0.99 the
// ladder walks full-argument -> intermediate-eta -> eta = 0 irregular
// expansions (small c goes straight to eta = 0); for xi <= 0.99 the
// Legendre expansion takes over as soon as it reaches minacc, bridged until
// then by the recursion expansion, the integral form, or the
// intermediate-eta expansion depending on c.  The ladder only moves
// forward.  Rows no candidate brings to minacc carry the best result with
// below_target set.  accuracy_digits holds the measured Wronskian digits
// (the estimate for pairing rows).  The eigenvalue table must cover
// l_count + 1 entries so the pairing neighbor exists.
std::vector<RadialResult> r2_table(int m, double c, double xi, int l_count,
                                   const EigenTable& table, int minacc = 10);

// Assemble the per-row diagnostic record from a first/second-kind pair.
AccuracyReport accuracy_report(const RadialResult& r1, const RadialResult& r2,
                               double c, double xi);

}  // namespace oblate
