#include "oblate/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "oblate/diagnostics.hpp"

namespace oblate {

namespace {

void validate_mc(int m, double c) {
  if (m < 0) throw std::invalid_argument("order m must be nonnegative");
  if (!(c >= 0.0)) throw std::invalid_argument("size parameter c must be nonnegative");
}

double guarded(double v) {
  // Keep chain divisors away from exact zero without disturbing real values.
  if (v == 0.0) return 1e-280;
  return v;
}

long double guarded_l(long double v) {
  if (v == 0.0L) return 1e-280L;
  return v;
}

}  // namespace

TridiagonalSystem build_tridiagonal(int m, double c, bool odd_family, int order) {
  validate_mc(m, c);
  if (order < 1) throw std::invalid_argument("build_tridiagonal: order must be positive");
  const RecursionCoefficients rc{m, c};
  const int p = odd_family ? 1 : 0;
  TridiagonalSystem sys;
  sys.diag.resize(order);
  sys.offdiag.resize(order - 1);
  for (int i = 0; i < order; ++i) {
    const std::int64_t n = p + 2 * static_cast<std::int64_t>(i);
    sys.diag[i] = rc.beta(n);
    if (i + 1 < order) {
      sys.offdiag[i] = std::sqrt(rc.alpha(n) * rc.gamma(n + 2));
    }
  }
  return sys;
}

std::vector<double> solve_tridiagonal(const TridiagonalSystem& system) {
  std::vector<double> d = system.diag;
  std::vector<double> e = system.offdiag;
  const int n = static_cast<int>(d.size());
  if (static_cast<int>(e.size()) != n - 1 && n > 0) {
    throw std::invalid_argument("solve_tridiagonal: inconsistent sizes");
  }
  e.push_back(0.0);
  const double eps = std::numeric_limits<double>::epsilon();

  for (int l = 0; l < n; ++l) {
    int iter = 0;
    for (;;) {
      int split = l;
      for (; split < n - 1; ++split) {
        const double dd = std::fabs(d[split]) + std::fabs(d[split + 1]);
        if (std::fabs(e[split]) <= eps * dd) break;
      }
      if (split == l) break;
      if (iter++ == 60) throw NumericalError("solve_tridiagonal: QL iteration stalled");

      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[split] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0;
      double cth = 1.0;
      double p = 0.0;
      bool underflowed = false;
      for (int i = split - 1; i >= l; --i) {
        double f = s * e[i];
        const double b = cth * e[i];
        r = std::hypot(f, g);
        e[i + 1] = r;
        if (r == 0.0) {
          d[i + 1] -= p;
          e[split] = 0.0;
          underflowed = true;
          break;
        }
        s = f / r;
        cth = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * cth * b;
        p = s * r;
        d[i + 1] = g + p;
        g = cth * r - b;
      }
      if (underflowed) continue;
      d[l] -= p;
      e[l] = g;
      e[split] = 0.0;
    }
  }
  std::sort(d.begin(), d.end());
  return d;
}

namespace {

struct NewtonCore {
  BouwkampVerdict::Outcome outcome = BouwkampVerdict::Outcome::no_convergence;
  long double lambda = 0.0L;
  int iterations = 0;
};

// Newton iteration on the characteristic function of the recursion, run in
// extended precision so the root can settle to the last representable digit
// of a double; that accuracy carries straight into the coefficient sweeps,
// whose junction rows amplify any eigenvalue error.
NewtonCore newton_core(const RecursionCoefficients& rc, int j, long double estimate,
                       double lower, double upper) {
  const int p = j % 2;

  // Depth of the backward continued fraction: past the breakpoint the tail
  // ratios shrink super-exponentially, so a fixed band beyond it suffices.
  const std::int64_t reach = std::max<std::int64_t>(
      0, static_cast<std::int64_t>(std::ceil(breakpoint_order(rc.c))) - j);
  const std::int64_t rows = (reach + 120) / 2 + 1;

  long double lambda = estimate;
  long double prev_delta = std::numeric_limits<long double>::max();
  for (int iter = 1; iter <= 50; ++iter) {
    // Forward ratio chain r_n = d_n / d_{n-2} climbing from the bottom row.
    long double tail_term = 0.0L;   // gamma_j / r_j
    long double tail_deriv = 0.0L;  // its lambda-derivative
    if (j >= p + 2) {
      long double ratio = (lambda - rc.beta(p)) / rc.alpha(p);  // r_{p+2}
      long double dratio = 1.0L / rc.alpha(p);
      for (std::int64_t n = p + 2; n <= j - 2; n += 2) {
        const long double inv = 1.0L / guarded_l(ratio);
        const long double next =
            -((rc.beta(n) - lambda) + rc.gamma(n) * inv) / rc.alpha(n);
        const long double dnext =
            (1.0L + rc.gamma(n) * dratio * inv * inv) / rc.alpha(n);
        ratio = next;
        dratio = dnext;
      }
      const long double inv = 1.0L / guarded_l(ratio);
      tail_term = rc.gamma(j) * inv;
      tail_deriv = -rc.gamma(j) * dratio * inv * inv;
    }

    // Backward continued fraction s_n = d_n / d_{n-2} descending from far
    // above the characteristic row.
    long double s = 0.0L;
    long double ds = 0.0L;
    for (std::int64_t n = j + 2 * rows; n >= j + 2; n -= 2) {
      const long double denom = guarded_l((rc.beta(n) - lambda) + rc.alpha(n) * s);
      const long double dd = -1.0L + rc.alpha(n) * ds;
      ds = rc.gamma(n) * dd / (denom * denom);
      s = -rc.gamma(n) / denom;
    }

    const long double f = (rc.beta(j) - lambda) + rc.alpha(j) * s + tail_term;
    const long double df = -1.0L + rc.alpha(j) * ds + tail_deriv;
    if (df == 0.0L) {
      return {BouwkampVerdict::Outcome::no_convergence, lambda, iter};
    }

    const long double next = lambda - f / df;
    if (next < lower || next > upper) {
      return {BouwkampVerdict::Outcome::out_of_interval, next, iter};
    }
    const long double delta = std::fabs(next - lambda);
    lambda = next;
    const long double scale = std::fabs(lambda) + 1.0L;
    if (delta <= 1e-17L * scale ||
        (delta <= 1e-12L * scale && delta >= prev_delta)) {
      // Either fully settled or bouncing on the rounding floor.
      return {BouwkampVerdict::Outcome::refined, lambda, iter};
    }
    prev_delta = delta;
  }
  return {BouwkampVerdict::Outcome::no_convergence, lambda, 50};
}

}  // namespace

BouwkampVerdict bouwkamp_refine(int m, double c, int l, double estimate, double lower,
                                double upper) {
  validate_mc(m, c);
  if (l < m) throw std::invalid_argument("bouwkamp_refine: l must be at least m");
  const RecursionCoefficients rc{m, c};
  const int j = l - m;

  if (c == 0.0) {
    return {BouwkampVerdict::Outcome::refined, rc.beta(j), 0};
  }
  const NewtonCore core = newton_core(rc, j, estimate, lower, upper);
  return {core.outcome, static_cast<double>(core.lambda), core.iterations};
}

long double bouwkamp_polish(int m, double c, int l, long double estimate) {
  validate_mc(m, c);
  if (l < m) throw std::invalid_argument("bouwkamp_polish: l must be at least m");
  const RecursionCoefficients rc{m, c};
  const int j = l - m;
  if (c == 0.0) return rc.beta(j);

  const double inf = std::numeric_limits<double>::max();
  const NewtonCore core = newton_core(rc, j, estimate, -inf, inf);
  if (core.outcome != BouwkampVerdict::Outcome::refined) return estimate;
  // A polish must stay on the root it was given.
  const long double moved = std::fabs(core.lambda - estimate);
  if (moved > 1e-8L * (std::fabs(estimate) + 1.0L)) return estimate;
  return core.lambda;
}

namespace {

// Guarded-Newton wrapper: shrink the bracket on every escape and reseed at
// the midpoint until the iteration settles or the bracket collapses.
struct RefineResult {
  bool ok = false;
  double lambda = 0.0;
};

RefineResult refine_with_bisection(int m, double c, int l, double seed, double lower,
                                   double upper) {
  double est = seed;
  for (int attempt = 0; attempt < 80; ++attempt) {
    const BouwkampVerdict v = bouwkamp_refine(m, c, l, est, lower, upper);
    if (v.outcome == BouwkampVerdict::Outcome::refined) return {true, v.lambda};
    if (v.outcome == BouwkampVerdict::Outcome::no_convergence) return {false, est};
    if (v.lambda < lower) {
      lower = est;  // escaped downward: the wanted root lies above the seed
    } else {
      upper = est;
    }
    est = 0.5 * (lower + upper);
    if (upper - lower <= 1e-12 * (std::fabs(est) + 1.0)) return {false, est};
  }
  return {false, est};
}

}  // namespace

EigenTable eigenvalue_table(int m, double c, int k_max) {
  validate_mc(m, c);
  if (k_max < 0) throw std::invalid_argument("eigenvalue_table: k_max must be nonnegative");
  EigenTable table;
  table.m = m;
  table.c = c;
  table.entry.resize(k_max + 1);
  const RecursionCoefficients rc{m, c};

  if (c == 0.0) {
    for (int k = 0; k <= k_max; ++k) {
      table.entry[k].lambda = rc.beta(k);  // (m+k)(m+k+1) exactly
      table.entry[k].source = EigenvalueEntry::Source::matrix;
    }
    return table;
  }

  const double nb = breakpoint_order(c);
  const int t_cut = std::max(3, static_cast<int>(std::ceil(4.0 * nb / 3.0)));
  const int k_matrix = std::min(k_max, t_cut);

  // Truncated-matrix estimates for both parity families.
  std::vector<double> estimate(k_matrix + 1, 0.0);
  for (int p = 0; p <= 1; ++p) {
    if (p > k_matrix) continue;
    const int needed = (k_matrix - p) / 2 + 1;
    const int order =
        std::max({needed + 26, static_cast<int>(nb / 2.0) + 40, 34});
    const auto eig = solve_tridiagonal(build_tridiagonal(m, c, p == 1, order));
    for (int idx = 0; idx < needed; ++idx) estimate[p + 2 * idx] = eig[idx];
  }

  // Polish every matrix-seeded eigenvalue inside a same-parity bracket.
  for (int k = 0; k <= k_matrix; ++k) {
    const double here = estimate[k];
    const double below = (k - 2 >= 0) ? estimate[k - 2] : -std::numeric_limits<double>::infinity();
    const double above =
        (k + 2 <= k_matrix) ? estimate[k + 2] : std::numeric_limits<double>::infinity();
    double lower;
    double upper;
    if (std::isinf(below) && std::isinf(above)) {
      const double pad = std::max(1.0, 0.1 * std::fabs(here));
      lower = here - pad;
      upper = here + pad;
    } else if (std::isinf(below)) {
      const double gap = above - here;
      lower = here - 0.5 * gap;
      upper = here + 0.5 * gap;
    } else if (std::isinf(above)) {
      const double gap = here - below;
      lower = here - 0.5 * gap;
      upper = here + 0.5 * gap;
    } else {
      lower = 0.5 * (below + here);
      upper = 0.5 * (here + above);
    }
    const RefineResult r = refine_with_bisection(m, c, m + k, here, lower, upper);
    table.entry[k].lambda = r.ok ? r.lambda : here;
    table.entry[k].source =
        r.ok ? EigenvalueEntry::Source::refined : EigenvalueEntry::Source::matrix;
  }

  // Beyond the matrix: quadratic extrapolation seeds polished the same way.
  for (int k = k_matrix + 1; k <= k_max; ++k) {
    const double l1 = table.entry[k - 1].lambda;
    const double l2 = table.entry[k - 2].lambda;
    const double l3 = table.entry[k - 3].lambda;
    double seed = 3.0 * l1 - 3.0 * l2 + l3;
    if (seed <= l1) seed = l1 + (l1 - l2);
    const double gap = seed - l1;
    const double lower = l1;
    const double upper = seed + 1.5 * gap;
    const RefineResult r = refine_with_bisection(m, c, m + k, seed, lower, upper);
    if (!r.ok) {
      throw NumericalError("eigenvalue_table: refinement failed beyond the matrix range");
    }
    table.entry[k].lambda = r.lambda;
    table.entry[k].source = EigenvalueEntry::Source::extrapolated;
  }

  // Pairing diagnostics for the near-degenerate doublets below breakpoint.
  for (int k = 0; k + 1 <= k_max && k <= static_cast<int>(nb); k += 2) {
    table.entry[k].pairing_digits =
        digits_of_agreement(table.entry[k].lambda, table.entry[k + 1].lambda);
  }
  return table;
}

}  // namespace oblate
