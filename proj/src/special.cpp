#include "oblate/special.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "oblate/diagnostics.hpp"

namespace oblate {

namespace {

constexpr long double kStripHigh = 1e290L;
constexpr long double kStripLow = 1e-290L;

// Keep a two-term recursion window inside long-double range by moving
// decades into a shared base-10 offset.
void strip_pair(long double& a, long double& b, std::int64_t& e) {
  const long double big = std::max(fabsl(a), fabsl(b));
  if (big > kStripHigh) {
    a *= 1e-290L;
    b *= 1e-290L;
    e += 290;
  } else if (big != 0.0L && big < kStripLow) {
    a *= 1e290L;
    b *= 1e290L;
    e -= 290;
  }
}

}  // namespace

ScaledReal scaled_factorial(std::int64_t k) {
  if (k < 0) throw std::invalid_argument("scaled_factorial: negative argument");
  long double run = 1.0L;
  std::int64_t run_exp = 0;
  for (std::int64_t j = 2; j <= k; ++j) {
    run *= static_cast<long double>(j);
    if (run > kStripHigh) {
      run *= 1e-290L;
      run_exp += 290;
    }
  }
  return normalize_parts(run, run_exp);
}

ScaledReal scaled_double_factorial(std::int64_t k) {
  if (k < -1) throw std::invalid_argument("scaled_double_factorial: argument below -1");
  long double run = 1.0L;
  std::int64_t run_exp = 0;
  for (std::int64_t j = k; j >= 2; j -= 2) {
    run *= static_cast<long double>(j);
    if (run > kStripHigh) {
      run *= 1e-290L;
      run_exp += 290;
    }
  }
  return normalize_parts(run, run_exp);
}

ScaledReal scaled_pow_int(const ScaledReal& a, std::int64_t k) {
  if (k < 0) return scaled_div(normalize(1.0), scaled_pow_int(a, -k));
  ScaledReal result = normalize(1.0);
  ScaledReal base = a;
  std::int64_t n = k;
  while (n > 0) {
    if (n & 1) result = scaled_mul(result, base);
    base = scaled_mul(base, base);
    n >>= 1;
  }
  return result;
}

std::vector<ScaledReal> spherical_bessel_j(double x, int n_max) {
  if (x < 0.0) throw std::invalid_argument("spherical_bessel_j: negative argument");
  if (n_max < 0) throw std::invalid_argument("spherical_bessel_j: negative n_max");
  std::vector<ScaledReal> out(n_max + 1);
  if (x == 0.0) {
    out[0] = normalize(1.0);
    return out;  // j_n(0) = 0 for n >= 1
  }
  // Downward recursion from well above both n_max and the turning point
  // n ~ x; the extra band absorbs the arbitrary seed.
  const int margin = 50 + static_cast<int>(10.0 * std::cbrt(x));
  const int start = std::max(n_max, static_cast<int>(std::ceil(x))) + margin;

  long double above = 0.0L;   // j_{n+1} (scaled)
  long double here = 1e-30L;  // j_n
  std::int64_t e = 0;
  for (int n = start; n >= 0; --n) {
    if (n <= n_max) out[n] = normalize_parts(here, e);
    const long double below = ((2.0L * n + 1.0L) / x) * here - above;
    above = here;
    here = below;
    strip_pair(here, above, e);
  }
  // Rescale everything against the closed form for j_0.
  const ScaledReal j0_true = normalize_parts(sinl(static_cast<long double>(x)) / x, 0);
  const ScaledReal factor = scaled_div(j0_true, out[0]);
  for (auto& v : out) v = scaled_mul(v, factor);
  return out;
}

std::vector<ScaledReal> spherical_neumann_y(double x, int n_max) {
  if (!(x > 0.0)) throw std::invalid_argument("spherical_neumann_y: argument must be positive");
  if (n_max < 0) throw std::invalid_argument("spherical_neumann_y: negative n_max");
  std::vector<ScaledReal> out(n_max + 1);
  const long double lx = static_cast<long double>(x);
  long double prev = -cosl(lx) / lx;                      // y_0
  long double cur = -cosl(lx) / (lx * lx) - sinl(lx) / lx;  // y_1
  std::int64_t e = 0;
  out[0] = normalize_parts(prev, 0);
  if (n_max == 0) return out;
  out[1] = normalize_parts(cur, 0);
  for (int n = 1; n < n_max; ++n) {
    const long double next = ((2.0L * n + 1.0L) / lx) * cur - prev;
    prev = cur;
    cur = next;
    strip_pair(cur, prev, e);
    out[n + 1] = normalize_parts(cur, e);
  }
  return out;
}

std::vector<ScaledReal> spherical_derivative(const std::vector<ScaledReal>& f, double x) {
  if (f.size() < 2) throw std::invalid_argument("spherical_derivative: need at least two orders");
  if (!(x > 0.0)) throw std::invalid_argument("spherical_derivative: argument must be positive");
  std::vector<ScaledReal> out(f.size());
  out[0] = scaled_neg(f[1]);
  for (size_t n = 1; n < f.size(); ++n) {
    out[n] = scaled_sub(f[n - 1], scaled_mul(f[n], normalize((static_cast<double>(n) + 1.0) / x)));
  }
  return out;
}

QuadratureRule gauss_legendre_rule(int order) {
  if (order < 1) throw std::invalid_argument("gauss_legendre_rule: order must be positive");
  const int n = order;
  QuadratureRule rule;
  rule.node.resize(n);
  rule.weight.resize(n);
  const long double pi = acosl(-1.0L);
  for (int i = 1; i <= (n + 1) / 2; ++i) {
    long double x = cosl(pi * (i - 0.25L) / (n + 0.5L));
    long double dpn = 0.0L;
    for (int iter = 0; iter < 100; ++iter) {
      long double p0 = 1.0L;
      long double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const long double p2 = ((2.0L * k - 1.0L) * x * p1 - (k - 1.0L) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dpn = n * (x * p1 - p0) / (x * x - 1.0L);
      const long double dx = p1 / dpn;
      x -= dx;
      if (fabsl(dx) < 1e-19L * fabsl(x) + 1e-25L) break;
    }
    const long double w = 2.0L / ((1.0L - x * x) * dpn * dpn);
    rule.node[i - 1] = static_cast<double>(-x);
    rule.node[n - i] = static_cast<double>(x);
    rule.weight[i - 1] = static_cast<double>(w);
    rule.weight[n - i] = static_cast<double>(w);
  }
  return rule;
}

RealLegendreSet legendre_p(int m, double eta, int n_max) {
  if (m < 0 || n_max < 0) throw std::invalid_argument("legendre_p: bad m or n_max");
  if (!(std::fabs(eta) < 1.0)) throw std::invalid_argument("legendre_p: |eta| must be < 1");
  RealLegendreSet out;
  out.p.resize(n_max + 1);
  out.dp.resize(n_max + 1);

  const double t = (1.0 - eta) * (1.0 + eta);  // 1 - eta^2 without cancellation
  ScaledReal anchor = scaled_double_factorial(2 * static_cast<std::int64_t>(m) - 1);
  if (m > 0) anchor = scaled_mul(anchor, scaled_pow_int(scaled_sqrt(normalize(t)), m));
  out.p[0] = anchor;

  long double here = static_cast<long double>(anchor.characteristic);  // P_nu
  long double below = 0.0L;                                            // P_{nu-1}
  std::int64_t e = anchor.exponent;
  for (int nn = 0; nn < n_max; ++nn) {
    const long double nu = static_cast<long double>(m) + nn;
    const long double next = ((2.0L * nu + 1.0L) * eta * here - (nu + m) * below) / (nu - m + 1.0L);
    below = here;
    here = next;
    strip_pair(here, below, e);
    out.p[nn + 1] = normalize_parts(here, e);
  }

  // (1 - eta^2) dP_nu = (nu + m) P_{nu-1} - nu eta P_nu
  const ScaledReal tinv = normalize(t);
  for (int nn = 0; nn <= n_max; ++nn) {
    const double nu = static_cast<double>(m) + nn;
    const ScaledReal prev = (nn == 0) ? ScaledReal{} : out.p[nn - 1];
    const ScaledReal lead = scaled_mul(prev, normalize(nu + m));
    const ScaledReal drop = scaled_mul(out.p[nn], normalize(nu * eta));
    out.dp[nn] = scaled_div(scaled_sub(lead, drop), tinv);
  }
  return out;
}

RealLegendreSet legendre_p_at_zero(int m, int n_max) {
  if (m < 0 || n_max < 0) throw std::invalid_argument("legendre_p_at_zero: bad m or n_max");
  RealLegendreSet out;
  out.p.resize(n_max + 1);
  out.dp.resize(n_max + 1);
  out.p[0] = scaled_double_factorial(2 * static_cast<std::int64_t>(m) - 1);
  for (int nn = 1; nn <= n_max; ++nn) {
    if (nn % 2 == 1) {
      // value vanishes; derivative chains off the value one degree down
      out.dp[nn] = scaled_mul(out.p[nn - 1], normalize(2.0 * m + nn));
    } else {
      out.p[nn] =
          scaled_mul(out.p[nn - 2], normalize(-(2.0 * m + nn - 1.0) / static_cast<double>(nn)));
    }
  }
  return out;
}

ImagLegendreP legendre_p_imag(int m, double xi, int max_degree) {
  if (m < 0) throw std::invalid_argument("legendre_p_imag: negative order");
  if (xi < 0.0) throw std::invalid_argument("legendre_p_imag: negative xi");
  if (max_degree < m) throw std::invalid_argument("legendre_p_imag: max_degree below order");
  ImagLegendreP out;
  out.order_m = m;
  const int count = max_degree - m + 1;
  out.p.resize(count);
  out.dp.resize(count);

  const double one_plus = 1.0 + xi * xi;
  ScaledReal anchor = scaled_double_factorial(2 * static_cast<std::int64_t>(m) - 1);
  if (m > 0) anchor = scaled_mul(anchor, scaled_pow_int(scaled_sqrt(normalize(one_plus)), m));
  out.p[0] = anchor;

  long double here = static_cast<long double>(anchor.characteristic);  // phat_nu
  long double below = 0.0L;                                            // phat_{nu-1}
  std::int64_t e = anchor.exponent;
  for (int idx = 0; idx + 1 < count; ++idx) {
    const long double nu = static_cast<long double>(m) + idx;
    const long double next = ((2.0L * nu + 1.0L) * xi * here + (nu + m) * below) / (nu - m + 1.0L);
    below = here;
    here = next;
    strip_pair(here, below, e);
    out.p[idx + 1] = normalize_parts(here, e);
  }

  // dphat_nu = [nu xi phat_nu + (nu + m) phat_{nu-1}] / (1 + xi^2)
  const ScaledReal denom = normalize(one_plus);
  for (int idx = 0; idx < count; ++idx) {
    const double nu = static_cast<double>(m) + idx;
    const ScaledReal prev = (idx == 0) ? ScaledReal{} : out.p[idx - 1];
    const ScaledReal a = scaled_mul(out.p[idx], normalize(nu * xi));
    const ScaledReal b = scaled_mul(prev, normalize(nu + m));
    out.dp[idx] = scaled_div(scaled_add(a, b), denom);
  }
  return out;
}

ImagLegendreQ legendre_q_imag(int m, double xi, int max_degree) {
  if (m < 0) throw std::invalid_argument("legendre_q_imag: negative order");
  if (xi < 0.0) throw std::invalid_argument("legendre_q_imag: negative xi");
  if (max_degree < m) throw std::invalid_argument("legendre_q_imag: max_degree below order");
  ImagLegendreQ out;
  out.order_m = m;
  const int count = max_degree + m + 1;  // degrees -m .. max_degree
  out.q.resize(count);
  out.dq.resize(count);
  const auto at = [&](std::int64_t nu) -> ScaledReal& { return out.q[static_cast<size_t>(nu + m)]; };

  const double one_plus = 1.0 + xi * xi;
  ScaledReal ph_m = scaled_double_factorial(2 * static_cast<std::int64_t>(m) - 1);
  if (m > 0) ph_m = scaled_mul(ph_m, scaled_pow_int(scaled_sqrt(normalize(one_plus)), m));

  ScaledReal q_m1;  // degree m+1, kept separately in case max_degree == m
  if (xi == 0.0) {
    // Exact parity chains: the degree recursion decouples into two-step
    // ratios when the argument vanishes.
    at(m) = scaled_mul(normalize(2.0 * std::atan(1.0)), scaled_double_factorial(2 * m - 1));
    q_m1 = scaled_mul(scaled_pow_int(normalize(2.0), m), scaled_factorial(m));
    if (max_degree > m) at(m + 1) = q_m1;
    for (std::int64_t nu = m + 1; nu + 1 <= max_degree; ++nu) {
      at(nu + 1) = scaled_mul(at(nu - 1), normalize(static_cast<double>(nu + m) /
                                                    static_cast<double>(nu - m + 1)));
    }
  } else {
    const double s = std::asinh(xi);
    const auto margin = std::max<std::int64_t>(
        20, static_cast<std::int64_t>(std::ceil(19.0 * std::log(10.0) / (2.0 * s))));
    if (margin > 100000000) {
      throw NumericalError("legendre_q_imag: xi too small for the backward recursion depth");
    }

    // Backward ratio sweep: rho_nu = qhat_{nu+1}/qhat_nu, seeded far above.
    std::vector<long double> rho_store(static_cast<size_t>(max_degree - m + 1));
    long double rho = 0.0L;
    for (std::int64_t nu = max_degree + margin; nu > m; --nu) {
      rho = (nu + m) / ((2.0L * nu + 1.0L) * xi + (nu - m + 1.0L) * rho);
      if (nu - 1 <= max_degree) rho_store[static_cast<size_t>(nu - 1 - m)] = rho;
    }

    // Scale from the product identity
    // phat_{nu} qhat_{nu-1} + phat_{nu-1} qhat_{nu} = (nu+m-1)!/(nu-m)!
    // at nu = m+1, which is cancellation-free (all quantities positive).
    const ScaledReal ph_m1 = scaled_mul(ph_m, normalize((2.0 * m + 1.0) * xi));
    const ScaledReal denom =
        scaled_add(ph_m1, scaled_mul(ph_m, normalize_parts(rho_store[0], 0)));
    at(m) = scaled_div(scaled_factorial(2 * m), denom);

    long double run = static_cast<long double>(at(m).characteristic);
    std::int64_t e = at(m).exponent;
    for (std::int64_t nu = m; nu < max_degree; ++nu) {
      run *= rho_store[static_cast<size_t>(nu - m)];
      if (fabsl(run) < kStripLow) {
        run *= 1e290L;
        e -= 290;
      }
      at(nu + 1) = normalize_parts(run, e);
    }
    q_m1 = (max_degree > m)
               ? at(m + 1)
               : scaled_mul(at(m), normalize_parts(rho_store[0], 0));
  }

  // Downward extension through degrees below m (signs may alternate there;
  // these are the analytic-continuation values the expansions call for).
  for (std::int64_t nu = m; nu >= -m + 1; --nu) {
    const ScaledReal upper = (nu == m) ? q_m1 : at(nu + 1);
    const ScaledReal num = scaled_add(scaled_mul(at(nu), normalize((2.0 * nu + 1.0) * xi)),
                                      scaled_mul(upper, normalize(static_cast<double>(nu - m + 1))));
    at(nu - 1) = scaled_div(num, normalize(static_cast<double>(nu + m)));
  }

  // Derivatives: dqhat_nu = [nu xi qhat_nu - (nu+m) qhat_{nu-1}]/(1+xi^2),
  // with the bottom degree picking up the first-kind limit term.
  const ScaledReal denom = normalize(one_plus);
  for (std::int64_t nu = -m; nu <= max_degree; ++nu) {
    ScaledReal num;
    if (nu == -m) {
      const ScaledReal ph_signed = (m % 2 == 0) ? ph_m : scaled_neg(ph_m);
      num = scaled_sub(scaled_mul(at(nu), normalize(-static_cast<double>(m) * xi)), ph_signed);
    } else {
      num = scaled_sub(scaled_mul(at(nu), normalize(static_cast<double>(nu) * xi)),
                       scaled_mul(at(nu - 1), normalize(static_cast<double>(nu + m))));
    }
    out.dq[static_cast<size_t>(nu + m)] = scaled_div(num, denom);
  }
  return out;
}

}  // namespace oblate
