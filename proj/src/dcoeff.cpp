#include "oblate/dcoeff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "oblate/diagnostics.hpp"
#include "oblate/eigen.hpp"
#include "oblate/special.hpp"

namespace oblate {

namespace {

constexpr long double kGuard = 1e-280L;

long double guarded(long double v) { return v == 0.0L ? kGuard : v; }

// Weight of d_n^2 in the normalization sum: 2 (n+2m)! / ((2n+2m+1) n!).
ScaledReal norm_weight(int m, std::int64_t n) {
  const ScaledReal fac =
      scaled_div(scaled_factorial(n + 2 * m), scaled_factorial(n));
  return scaled_mul(fac,
                    normalize(2.0 / static_cast<double>(2 * n + 2 * m + 1)));
}

}  // namespace

bool DCoefficients::has(std::int64_t n) const {
  return n >= parity && n <= n_max && ((n - parity) % 2 == 0);
}

const ScaledReal& DCoefficients::at(std::int64_t n) const {
  if (!has(n)) {
    throw std::invalid_argument("coefficient index " + std::to_string(n) +
                                " outside the stored range");
  }
  return d[static_cast<size_t>((n - parity) / 2)];
}

ScaledReal DCoefficients::unit_scale() const {
  return scaled_sqrt(scaled_div(normalize(1.0), norm_sum));
}

ScaledReal DCoefficients::legendre_scale() const {
  const ScaledReal target = scaled_mul(
      scaled_div(scaled_factorial(l + m), scaled_factorial(l - m)),
      normalize(2.0 / static_cast<double>(2 * l + 1)));
  return scaled_sqrt(scaled_div(target, norm_sum));
}

DCoefficients d_coefficients(int m, int l, double c, double lambda,
                             std::int64_t min_top) {
  if (m < 0 || l < m || c < 0.0 || !std::isfinite(c) ||
      !std::isfinite(lambda)) {
    throw std::invalid_argument("coefficient set needs m >= 0, l >= m, c >= 0");
  }

  DCoefficients dc;
  dc.m = m;
  dc.l = l;
  dc.c = c;
  dc.lambda = lambda;
  dc.parity = (l - m) % 2;

  const int p = dc.parity;
  const int j = l - m;

  std::int64_t needed = std::max<std::int64_t>(
      j, static_cast<std::int64_t>(std::ceil(breakpoint_order(c))));
  needed = std::max(needed, min_top);
  if ((needed - p) % 2 != 0) ++needed;
  dc.n_max = needed + 300;

  const size_t slots = static_cast<size_t>((dc.n_max - p) / 2) + 1;
  dc.d.assign(slots, ScaledReal{});
  const size_t peak_slot = static_cast<size_t>(j - p) / 2;

  if (c == 0.0) {
    // The recursion decouples: the set is a single Legendre term.
    dc.d[peak_slot] = normalize(1.0);
    dc.match_digits = kNdec;
    dc.norm_sum = norm_weight(m, j);
    return dc;
  }

  const RecursionCoefficients rc{m, c};
  const std::int64_t nb =
      static_cast<std::int64_t>(std::ceil(breakpoint_order(c)));

  // When the characteristic row sits at or above the oscillatory zone, the
  // characteristic function is well conditioned there and a Newton polish in
  // extended precision removes the double rounding of lambda, which the
  // junction rows would otherwise amplify.
  long double lam = lambda;
  if (j + 2 >= nb) {
    lam = bouwkamp_polish(m, c, l, lam);
  }
  dc.lambda = static_cast<double>(lam);

  // Tail-stable sweep: ratios s_n = d_n / d_{n-2} from a converged continued
  // fraction, valid from the top of the table down to the turning band.
  std::vector<long double> s(slots, 0.0L);
  const std::int64_t cf_margin =
      std::max<std::int64_t>(100, 2 * static_cast<std::int64_t>(std::ceil(c)));
  long double run = 0.0L;
  for (std::int64_t n = dc.n_max + 2 * cf_margin; n >= p + 2; n -= 2) {
    run = -rc.gamma(n) / guarded((rc.beta(n) - lam) + rc.alpha(n) * run);
    if (n <= dc.n_max) s[static_cast<size_t>((n - p) / 2)] = run;
  }

  // Head-stable sweep: the same ratios climbed up from the lowest row, valid
  // through the whole oscillatory zone up to the turning band.  When the
  // characteristic row lies below the band the sweep must reach past it, so
  // it extends beyond both the row and the breakpoint.
  std::int64_t fwd_top = j + 2;
  if (j < nb) {
    std::int64_t band = nb + 60;
    if ((band - p) % 2 != 0) ++band;
    fwd_top = std::min(std::max(fwd_top, band), dc.n_max);
  }
  std::vector<long double> fwd(static_cast<size_t>((fwd_top - p) / 2) + 1, 0.0L);
  {
    long double ratio = (lam - rc.beta(p)) / rc.alpha(p);
    fwd[1] = ratio;
    for (std::int64_t n = p + 2; n <= fwd_top - 2; n += 2) {
      ratio = -((rc.beta(n) - lam) + rc.gamma(n) / guarded(ratio)) /
              rc.alpha(n);
      fwd[static_cast<size_t>((n - p) / 2) + 1] = ratio;
    }
  }

  // Join the sweeps where they agree.  Scanning from the top of the overlap,
  // the first row where both carry nearly full precision is taken; if none
  // reaches that, the row of best agreement wins.  For a characteristic row
  // above the oscillatory zone this lands just past the peak; below it, the
  // join settles inside the turning band.
  std::int64_t junction = fwd_top;
  {
    const auto agreement_at = [&](std::int64_t n) {
      const size_t slot = static_cast<size_t>((n - p) / 2);
      return digits_of_agreement(normalize_parts(fwd[slot], 0),
                                 normalize_parts(s[slot], 0));
    };
    std::int64_t best_row = fwd_top;
    int best = -1;
    for (std::int64_t n = fwd_top; n >= p + 2; n -= 2) {
      const int a = agreement_at(n);
      if (a >= kNdec - 1) {
        best_row = n;
        best = a;
        break;
      }
      if (a > best) {
        best = a;
        best_row = n;
      }
    }
    junction = best_row;
    dc.match_digits = std::min(std::max(best, 0), kNdec);
  }

  const auto ratio_at = [&](std::int64_t n) {
    const size_t slot = static_cast<size_t>((n - p) / 2);
    return guarded(n >= junction ? s[slot] : fwd[slot]);
  };

  dc.d[peak_slot] = normalize(1.0);
  for (std::int64_t n = j + 2; n <= dc.n_max; n += 2) {
    const size_t slot = static_cast<size_t>((n - p) / 2);
    dc.d[slot] =
        scaled_mul(dc.d[slot - 1], normalize_parts(ratio_at(n), 0));
  }
  for (std::int64_t n = j; n >= p + 2; n -= 2) {
    const size_t slot = static_cast<size_t>((n - p) / 2);
    dc.d[slot - 1] =
        scaled_div(dc.d[slot], normalize_parts(ratio_at(n), 0));
  }

  SignedAccumulator norm;
  for (std::int64_t n = p; n <= dc.n_max; n += 2) {
    const ScaledReal& dn = dc.d[static_cast<size_t>((n - p) / 2)];
    norm.add(scaled_mul(norm_weight(m, n), scaled_mul(dn, dn)));
  }
  dc.norm_sum = norm.total();
  return dc;
}

LowDegreeTail low_degree_tail(const DCoefficients& dc, int e_count) {
  if (dc.c <= 0.0) {
    throw std::invalid_argument("low-degree tail needs c > 0");
  }
  if (e_count < 1) {
    throw std::invalid_argument("low-degree tail needs at least one term");
  }

  const int m = dc.m;
  const int p = dc.parity;
  const double lambda = dc.lambda;
  const RecursionCoefficients rc{m, dc.c};

  LowDegreeTail tail;
  tail.parity = p;

  // Continue the d-chain below zero.  The closing row has no term beneath it,
  // which fixes the ratio there; the remaining rows climb back up to join the
  // positive-index set.
  ScaledReal d_bottom = dc.at(p);
  if (m >= 1) {
    const std::int64_t n0 = -2 * m + p;
    std::vector<long double> u(static_cast<size_t>(m), 0.0L);
    // u[k] = d_n / d_{n-2} at n = n0 + 2 + 2k, k = 0..m-1; u[m-1] is the ratio
    // joining d_p to d_{p-2}.
    u[0] = (lambda - rc.beta(n0)) / guarded(rc.alpha(n0));
    for (std::int64_t n = n0 + 2; n <= p - 2; n += 2) {
      const size_t k = static_cast<size_t>((n - n0) / 2);
      u[k] = -((rc.beta(n) - lambda) + rc.gamma(n) / guarded(u[k - 1])) /
             rc.alpha(n);
    }
    tail.d_negative.resize(static_cast<size_t>(m));
    ScaledReal cur = dc.at(p);
    for (int k = m - 1; k >= 0; --k) {
      cur = scaled_div(cur, normalize_parts(guarded(u[static_cast<size_t>(k)]), 0));
      tail.d_negative[static_cast<size_t>(m - 1 - k)] = cur;
    }
    d_bottom = tail.d_negative.back();
  }

  // Second-family chain below the join.  Its rows obey the same recursion, so
  // the decaying solution comes from a continued fraction; only the coupling
  // into the d-chain uses a modified coefficient.
  const std::int64_t nj = -2 * m - 2 + p;
  const double c2 = dc.c * dc.c;
  const double alpha_join =
      (p == 0) ? c2 / (4.0 * m * m - 1.0)
               : -c2 / ((2.0 * m - 1.0) * (2.0 * m - 3.0));

  const int depth = e_count + 60;
  std::vector<long double> s(static_cast<size_t>(depth), 0.0L);
  // s[k] = e_n / e_{n+2} at n = nj - 2 - 2k, deepest first when filling.
  {
    long double below = 0.0L;
    for (int k = depth - 1; k >= 0; --k) {
      const std::int64_t n = nj - 2 - 2 * k;
      below = -rc.alpha(n) / guarded((rc.beta(n) - lambda) + rc.gamma(n) * below);
      s[static_cast<size_t>(k)] = below;
    }
  }

  tail.e.reserve(static_cast<size_t>(e_count));
  tail.e_degree.reserve(static_cast<size_t>(e_count));
  const long double denom =
      guarded((rc.beta(nj) - lambda) + rc.gamma(nj) * s[0]);
  ScaledReal e_cur = scaled_mul(
      d_bottom, normalize_parts(-static_cast<long double>(alpha_join) / denom, 0));
  for (int k = 0; k < e_count; ++k) {
    tail.e.push_back(e_cur);
    tail.e_degree.push_back(-(m + nj - 2 * k) - 1);
    if (k + 1 < e_count) {
      e_cur = scaled_mul(e_cur, normalize_parts(s[static_cast<size_t>(k)], 0));
    }
  }
  return tail;
}

}  // namespace oblate
