#include "oblate/radial_first.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>

#include "oblate/diagnostics.hpp"
#include "oblate/special.hpp"

namespace oblate {

namespace {

// (n+2m)!/n! advanced incrementally over one parity class (n -> n+2).
class FactorialRatio {
 public:
  FactorialRatio(int m, std::int64_t n0)
      : value_(scaled_div(scaled_factorial(n0 + 2 * m), scaled_factorial(n0))),
        n_(n0),
        m_(m) {}

  const ScaledReal& value() const { return value_; }

  void advance() {
    const double num = (n_ + 2.0 * m_ + 2.0) * (n_ + 2.0 * m_ + 1.0);
    const double den = (n_ + 2.0) * (n_ + 1.0);
    value_ = scaled_mul(value_, normalize(num / den));
    n_ += 2;
  }

 private:
  ScaledReal value_;
  std::int64_t n_;
  int m_;
};

void check_radial_inputs(const DCoefficients& dc, double xi, const char* who) {
  if (dc.d.empty()) throw std::invalid_argument(std::string(who) + ": empty coefficient set");
  if (!(dc.c > 0.0)) throw std::invalid_argument(std::string(who) + ": requires c > 0");
  if (!(xi > 0.0)) {
    throw std::invalid_argument(std::string(who) +
                                ": requires xi > 0 (xi = 0 has exact dedicated forms)");
  }
}

// Pair of series (function and derivative numerators) summed over the
// stored parity class with shared truncation: the loop may stop only past
// the peak index l - m, and only once both tails are confirmed dead.
struct NumeratorSums {
  SignedAccumulator f;
  SignedAccumulator df;
  int terms_used = 0;
};

template <typename TermFn>
NumeratorSums sum_numerators(const DCoefficients& dc, TermFn&& term) {
  NumeratorSums out;
  TruncationWatch watch_f;
  TruncationWatch watch_df;
  const std::int64_t peak = dc.l - dc.m;
  // Rows n = l - m, l - m + 2, ... alternate in phase; the factor below the
  // peak follows the same alternation continued downward.
  double phase = ((peak - dc.parity) / 2) % 2 == 0 ? 1.0 : -1.0;
  for (std::int64_t n = dc.parity; n <= dc.n_max; n += 2) {
    ScaledReal tf;
    ScaledReal tdf;
    term(n, phase, tf, tdf);
    out.f.add(tf);
    out.df.add(tdf);
    ++out.terms_used;
    if (n >= peak) {
      const bool dead_f = watch_f.note(log10_magnitude(tf), accumulated_log(out.f));
      const bool dead_df = watch_df.note(log10_magnitude(tdf), accumulated_log(out.df));
      if (dead_f && dead_df) break;
    }
    phase = -phase;
  }
  return out;
}

int clamp_accuracy(int worst) { return std::clamp(kNdec - worst, 0, kNdec); }

RadialResult assemble_first(const NumeratorSums& num, const SeriesSum& den,
                            const ScaledReal& prefactor, RadialMethod method, double eta_used,
                            const DCoefficients& dc) {
  RadialResult out;
  out.r = scaled_mul(prefactor, scaled_div(num.f.total(), den.value));
  out.dr_dxi = scaled_mul(prefactor, scaled_div(num.df.total(), den.value));
  out.kind = RadialKind::first;
  out.method = method;
  out.eta_used = eta_used;
  out.subtraction_error = std::max({num.f.subtraction_error(), num.df.subtraction_error(),
                                    den.subtraction_error});
  out.accuracy_digits = clamp_accuracy(out.subtraction_error);
  out.terms_used = std::max(num.terms_used, den.terms_used);
  out.terms_available = static_cast<int>(dc.d.size());
  return out;
}

// Eta = 0 limit of the variable-eta expansion: even degree offsets use the
// Legendre values at zero, odd offsets their eta-derivatives together with
// the xi/sqrt(xi^2+1) prefactor of the odd limit.
RadialResult r1_eta_zero(const DCoefficients& dc, double xi) {
  const int m = dc.m;
  const double s1 = std::sqrt(xi * xi + 1.0);
  const double z = dc.c * s1;
  const double dz_dxi = dc.c * xi / s1;
  const int top = m + static_cast<int>(dc.n_max);
  const std::vector<ScaledReal> j = spherical_bessel_j(z, top);
  const std::vector<ScaledReal> jd = spherical_derivative(j, z);
  const RealLegendreSet leg = legendre_p_at_zero(m, static_cast<int>(dc.n_max));

  SignedAccumulator den_acc;
  TruncationWatch den_watch;
  int den_terms = 0;
  const bool odd = dc.parity != 0;
  const std::int64_t peak = dc.l - dc.m;

  // Denominator: sum d_n P(0) (even) or sum d_n P'(0) (odd).
  for (std::int64_t n = dc.parity; n <= dc.n_max; n += 2) {
    const ScaledReal& factor = odd ? leg.dp[static_cast<std::size_t>(n)]
                                   : leg.p[static_cast<std::size_t>(n)];
    const ScaledReal t = scaled_mul(dc.at(n), factor);
    den_acc.add(t);
    ++den_terms;
    if (n >= peak && den_watch.note(log10_magnitude(t), accumulated_log(den_acc))) break;
  }
  const SeriesSum den{den_acc.total(), den_acc.subtraction_error(), den_terms};

  NumeratorSums num;
  if (!odd) {
    num = sum_numerators(dc, [&](std::int64_t n, double phase, ScaledReal& tf, ScaledReal& tdf) {
      const ScaledReal base = scaled_mul(dc.at(n), leg.p[static_cast<std::size_t>(n)]);
      const ScaledReal signed_base = phase < 0.0 ? scaled_neg(base) : base;
      tf = scaled_mul(signed_base, j[static_cast<std::size_t>(m + n)]);
      tdf = scaled_mul(signed_base,
                       scaled_mul(jd[static_cast<std::size_t>(m + n)], normalize(dz_dxi)));
    });
    return assemble_first(num, den, normalize(1.0), RadialMethod::eta0, 0.0, dc);
  }

  // Odd case: R = g * F with g = xi/sqrt(xi^2+1); fold the product rule into
  // each derivative term so its cancellation is metered.
  const double g = xi / s1;
  const double gp = 1.0 / (s1 * s1 * s1);
  num = sum_numerators(dc, [&](std::int64_t n, double phase, ScaledReal& tf, ScaledReal& tdf) {
    const ScaledReal base = scaled_mul(dc.at(n), leg.dp[static_cast<std::size_t>(n)]);
    const ScaledReal signed_base = phase < 0.0 ? scaled_neg(base) : base;
    const ScaledReal jn = j[static_cast<std::size_t>(m + n)];
    const ScaledReal jdn = jd[static_cast<std::size_t>(m + n)];
    tf = scaled_mul(signed_base, scaled_mul(jn, normalize(g)));
    tdf = scaled_mul(signed_base, scaled_add(scaled_mul(jn, normalize(gp)),
                                             scaled_mul(jdn, normalize(g * dz_dxi))));
  });
  return assemble_first(num, den, normalize(1.0), RadialMethod::eta0, 0.0, dc);
}

}  // namespace

SeriesSum factorial_ratio_sum(const DCoefficients& dc) {
  if (dc.d.empty()) throw std::invalid_argument("factorial_ratio_sum: empty coefficient set");
  SignedAccumulator acc;
  TruncationWatch watch;
  FactorialRatio ratio(dc.m, dc.parity);
  const std::int64_t peak = dc.l - dc.m;
  int used = 0;
  for (std::int64_t n = dc.parity; n <= dc.n_max; n += 2) {
    const ScaledReal t = scaled_mul(dc.at(n), ratio.value());
    acc.add(t);
    ++used;
    if (n >= peak && watch.note(log10_magnitude(t), accumulated_log(acc))) break;
    ratio.advance();
  }
  return {acc.total(), acc.subtraction_error(), used};
}

RadialResult r1_traditional(const DCoefficients& dc, double xi) {
  check_radial_inputs(dc, xi, "r1_traditional");
  const int m = dc.m;
  const double z = dc.c * xi;
  const int top = m + static_cast<int>(dc.n_max);
  const std::vector<ScaledReal> j = spherical_bessel_j(z, top);
  const std::vector<ScaledReal> jd = spherical_derivative(j, z);

  const SeriesSum den = factorial_ratio_sum(dc);

  // Derivative of the prefactor ((xi^2+1)/xi^2)^(m/2) contributes the rate
  // -m/(xi (xi^2+1)) times the function term; folding it per term meters the
  // cancellation between the two derivative pieces.
  const double pref_rate = -static_cast<double>(m) / (xi * (xi * xi + 1.0));
  FactorialRatio ratio(m, dc.parity);
  const NumeratorSums num =
      sum_numerators(dc, [&](std::int64_t n, double phase, ScaledReal& tf, ScaledReal& tdf) {
        const ScaledReal w = scaled_mul(dc.at(n), ratio.value());
        const ScaledReal signed_w = phase < 0.0 ? scaled_neg(w) : w;
        const ScaledReal jn = j[static_cast<std::size_t>(m + n)];
        const ScaledReal jdn = jd[static_cast<std::size_t>(m + n)];
        tf = scaled_mul(signed_w, jn);
        tdf = scaled_mul(signed_w, scaled_add(scaled_mul(jdn, normalize(dc.c)),
                                              scaled_mul(jn, normalize(pref_rate))));
        ratio.advance();
      });

  const ScaledReal prefactor =
      scaled_pow_int(scaled_sqrt(normalize((xi * xi + 1.0) / (xi * xi))), m);
  return assemble_first(num, den, prefactor, RadialMethod::traditional_eta1, 1.0, dc);
}

RadialResult r1_variable_eta(const DCoefficients& dc, double xi, double theta) {
  check_radial_inputs(dc, xi, "r1_variable_eta");
  constexpr double half_pi = std::numbers::pi / 2.0;
  if (!(theta >= 0.0 && theta <= half_pi + 1e-12)) {
    throw std::invalid_argument("r1_variable_eta: theta must lie in [0, pi/2]");
  }
  if (theta == 0.0) return r1_traditional(dc, xi);
  const double eta = std::cos(std::min(theta, half_pi));
  if (eta < 1e-12) return r1_eta_zero(dc, xi);

  const int m = dc.m;
  const double w2 = xi * xi - eta * eta + 1.0;
  const double sq = std::sqrt(w2);
  const double z = dc.c * sq;
  const double u = eta * xi / sq;
  const double dz_dxi = dc.c * xi / sq;
  const double du_dxi = eta * (1.0 - eta * eta) / (w2 * sq);

  const int n_top = static_cast<int>(dc.n_max);
  const std::vector<ScaledReal> j = spherical_bessel_j(z, m + n_top);
  const std::vector<ScaledReal> jd = spherical_derivative(j, z);
  const RealLegendreSet leg_u = legendre_p(m, u, n_top);
  const RealLegendreSet leg_eta = legendre_p(m, eta, n_top);

  SignedAccumulator den_acc;
  TruncationWatch den_watch;
  int den_terms = 0;
  const std::int64_t peak = dc.l - dc.m;
  for (std::int64_t n = dc.parity; n <= dc.n_max; n += 2) {
    const ScaledReal t = scaled_mul(dc.at(n), leg_eta.p[static_cast<std::size_t>(n)]);
    den_acc.add(t);
    ++den_terms;
    if (n >= peak && den_watch.note(log10_magnitude(t), accumulated_log(den_acc))) break;
  }
  const SeriesSum den{den_acc.total(), den_acc.subtraction_error(), den_terms};

  const NumeratorSums num =
      sum_numerators(dc, [&](std::int64_t n, double phase, ScaledReal& tf, ScaledReal& tdf) {
        const ScaledReal signed_d = phase < 0.0 ? scaled_neg(dc.at(n)) : dc.at(n);
        const ScaledReal jn = j[static_cast<std::size_t>(m + n)];
        const ScaledReal jdn = jd[static_cast<std::size_t>(m + n)];
        const ScaledReal pu = leg_u.p[static_cast<std::size_t>(n)];
        const ScaledReal dpu = leg_u.dp[static_cast<std::size_t>(n)];
        tf = scaled_mul(signed_d, scaled_mul(jn, pu));
        tdf = scaled_mul(signed_d,
                         scaled_add(scaled_mul(scaled_mul(jdn, pu), normalize(dz_dxi)),
                                    scaled_mul(scaled_mul(jn, dpu), normalize(du_dxi))));
      });
  return assemble_first(num, den, normalize(1.0), RadialMethod::variable_eta, eta, dc);
}

RadialResult r1_xi_zero(const DCoefficients& dc) {
  if (dc.d.empty()) throw std::invalid_argument("r1_xi_zero: empty coefficient set");
  const int m = dc.m;
  const SeriesSum den = factorial_ratio_sum(dc);
  const ScaledReal two_c_pow =
      m == 0 ? normalize(1.0) : scaled_pow_int(normalize(2.0 * dc.c), m);

  RadialResult out;
  out.kind = RadialKind::first;
  out.method = RadialMethod::xi_zero;
  out.eta_used = 1.0;
  out.subtraction_error = den.subtraction_error;
  out.accuracy_digits = clamp_accuracy(den.subtraction_error);
  out.terms_used = den.terms_used;
  out.terms_available = static_cast<int>(dc.d.size());

  const std::int64_t peak = dc.l - dc.m;
  if (dc.parity == 0) {
    // R(0) from the n = 0 term: the prefactor's xi^{-m} cancels the Bessel
    // function's small-argument power, leaving
    //   (-1)^{(l-m)/2} d_0 (2c)^m m! / ((2m+1) D).
    const double sign = (peak / 2) % 2 == 0 ? 1.0 : -1.0;
    ScaledReal v = scaled_mul(dc.at(0), scaled_mul(two_c_pow, scaled_factorial(m)));
    v = scaled_div(v, normalize(2.0 * m + 1.0));
    v = scaled_div(v, den.value);
    out.r = sign < 0.0 ? scaled_neg(v) : v;
    out.dr_dxi = ScaledReal{};
  } else {
    // Derivative at 0 from the n = 1 term:
    //   (-1)^{(l-m-1)/2} d_1 (2c)^m c m! / ((2m+3) D).
    const double sign = ((peak - 1) / 2) % 2 == 0 ? 1.0 : -1.0;
    ScaledReal v = scaled_mul(dc.at(1), scaled_mul(two_c_pow, scaled_factorial(m)));
    v = scaled_mul(v, normalize(dc.c));
    v = scaled_div(v, normalize(2.0 * m + 3.0));
    v = scaled_div(v, den.value);
    out.r = ScaledReal{};
    out.dr_dxi = sign < 0.0 ? scaled_neg(v) : v;
  }
  return out;
}

std::vector<RadialResult> r1_table(double xi, const std::vector<DCoefficients>& coeffs) {
  std::vector<RadialResult> out;
  out.reserve(coeffs.size());
  if (xi == 0.0) {
    for (const DCoefficients& dc : coeffs) out.push_back(r1_xi_zero(dc));
    return out;
  }

  constexpr double kStep = 0.05;   // angle increment per probe
  constexpr int kMaxEvals = 30;    // probe budget for one l (caps theta at 1.5 rad)
  constexpr int kNearZero = 1;     // "near zero" subtraction error

  const auto evaluate = [&](const DCoefficients& dc, int step_index) {
    return step_index == 0 ? r1_traditional(dc, xi)
                           : r1_variable_eta(dc, xi, step_index * kStep);
  };

  int step_index = 0;    // persistent angle between consecutive l
  bool locked = false;   // theta came back to zero: traditional from here on
  for (const DCoefficients& dc : coeffs) {
    if (locked) {
      out.push_back(r1_traditional(dc, xi));
      continue;
    }
    RadialResult best = evaluate(dc, step_index);
    int best_index = step_index;
    if (best.subtraction_error > kNearZero) {
      int evals = 1;
      // The optimal angle shrinks as l grows, so probe downward first; on a
      // tie keep the smaller angle to drift back toward the traditional path.
      int idx = step_index;
      while (idx > 0 && evals < kMaxEvals && best.subtraction_error > kNearZero) {
        --idx;
        const RadialResult cand = evaluate(dc, idx);
        ++evals;
        if (cand.subtraction_error <= best.subtraction_error) {
          best = cand;
          best_index = idx;
        } else {
          break;
        }
      }
      // Sweep upward while the budget lasts, keeping the overall argmin.
      idx = step_index;
      while (idx < kMaxEvals && evals < kMaxEvals && best.subtraction_error > kNearZero) {
        ++idx;
        const RadialResult cand = evaluate(dc, idx);
        ++evals;
        if (cand.subtraction_error < best.subtraction_error) {
          best = cand;
          best_index = idx;
        }
      }
    }
    if (step_index > 0 && best_index == 0) locked = true;
    step_index = best_index;
    out.push_back(best);
  }
  return out;
}

std::vector<DCoefficients> coefficient_table(int m, double c, int l_count,
                                             const EigenTable& table) {
  if (l_count < 0) throw std::invalid_argument("coefficient_table: l_count must be >= 0");
  if (static_cast<int>(table.entry.size()) < l_count) {
    throw std::invalid_argument("coefficient_table: eigenvalue table too short");
  }
  std::vector<DCoefficients> out;
  out.reserve(static_cast<std::size_t>(l_count));
  for (int k = 0; k < l_count; ++k) {
    out.push_back(d_coefficients(m, m + k, c, table.entry[static_cast<std::size_t>(k)].lambda));
  }
  return out;
}

std::vector<RadialResult> r1_table(int m, double c, double xi, int l_count,
                                   const EigenTable& table) {
  return r1_table(xi, coefficient_table(m, c, l_count, table));
}

const char* radial_method_name(RadialMethod method) {
  switch (method) {
    case RadialMethod::traditional_eta1: return "traditional";
    case RadialMethod::variable_eta: return "variable_eta";
    case RadialMethod::eta0: return "eta0";
    case RadialMethod::legendre_traditional: return "legendre";
    case RadialMethod::baber_hasse: return "baber_hasse";
    case RadialMethod::neumann_traditional: return "neumann";
    case RadialMethod::neumann_eta0: return "neumann_eta0";
    case RadialMethod::neumann_variable_eta: return "neumann_variable_eta";
    case RadialMethod::integral: return "integral";
    case RadialMethod::pairing: return "pairing";
    case RadialMethod::xi_zero: return "xi_zero";
    case RadialMethod::wronskian_complement: return "wronskian_complement";
  }
  return "unknown";
}

}  // namespace oblate
