#include "oblate/radial_second.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "oblate/diagnostics.hpp"
#include "oblate/radial_first.hpp"
#include "oblate/special.hpp"

namespace oblate {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

int clamp_accuracy(int worst) { return std::clamp(kNdec - worst, 0, kNdec); }

void check_second_inputs(const DCoefficients& dc, double xi, const char* who) {
  if (dc.d.empty()) throw std::invalid_argument(std::string(who) + ": empty coefficient set");
  if (!(dc.c > 0.0)) throw std::invalid_argument(std::string(who) + ": requires c > 0");
  if (!(xi > 0.0)) {
    throw std::invalid_argument(std::string(who) +
                                ": requires xi > 0 (xi = 0 has exact dedicated forms)");
  }
}

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

// ---------------------------------------------------------------------------
// Legendre-function expansion
// ---------------------------------------------------------------------------

// Coefficients kept in the first-kind-degree sum: the product of coefficient
// decay and function growth converges once the term index passes ~0.6 c.
int second_family_count(double c) {
  return 48 + static_cast<int>(std::ceil(0.6 * c));
}

// Both halves of the expansion alternate sign per degree step of 2 when the
// imaginary-argument functions are reduced to real tables; the halves enter
// with opposite overall sign (validated against the Wronskian across m and
// both parities).
struct AssembledExpansion {
  ScaledReal f;        // combined series
  ScaledReal df;       // combined derivative series
  ScaledReal q_half;   // second-kind-degree half alone (function sum)
  ScaledReal p_half;   // first-kind-degree half alone (function sum)
  int sub_f = 0;
  int sub_df = 0;
  int sub_q = 0;       // worst of the half's function/derivative cancellation
  int sub_p = 0;
  int terms_used = 0;
  int terms_available = 0;
  bool converged = true;
};

AssembledExpansion assemble_legendre_series(const DCoefficients& dc,
                                            const LowDegreeTail& tail,
                                            const ImagLegendreQ& qt,
                                            const ImagLegendreP& pt) {
  const int m = dc.m;
  const int p = dc.parity;
  SignedAccumulator gf, gdf, qf, qdf, pf, pdf;
  int terms = 0;
  bool q_done = false;
  bool p_done = false;

  // Fixed continuation below the stored set, ending at the closing row.
  for (std::int64_t n = -2 * m + p; n <= p - 2; n += 2) {
    const ScaledReal& d = tail.d_negative[static_cast<std::size_t>((p - 2 - n) / 2)];
    const bool neg = (((n - p) / 2) % 2) != 0;
    const std::size_t qi = static_cast<std::size_t>(n + 2 * m);
    ScaledReal tf = scaled_mul(d, qt.q[qi]);
    ScaledReal tdf = scaled_mul(d, qt.dq[qi]);
    if (neg) {
      tf = scaled_neg(tf);
      tdf = scaled_neg(tdf);
    }
    gf.add(tf);
    qf.add(tf);
    gdf.add(tdf);
    qdf.add(tdf);
    ++terms;
  }

  // Stored rows, truncated once both tails are dead past the peak.
  {
    TruncationWatch wf, wdf;
    const std::int64_t peak = dc.l - dc.m;
    for (std::int64_t n = p; n <= dc.n_max; n += 2) {
      const bool neg = (((n - p) / 2) % 2) != 0;
      const std::size_t qi = static_cast<std::size_t>(n + 2 * m);
      ScaledReal tf = scaled_mul(dc.at(n), qt.q[qi]);
      ScaledReal tdf = scaled_mul(dc.at(n), qt.dq[qi]);
      if (neg) {
        tf = scaled_neg(tf);
        tdf = scaled_neg(tdf);
      }
      gf.add(tf);
      qf.add(tf);
      gdf.add(tdf);
      qdf.add(tdf);
      ++terms;
      if (n >= peak) {
        const bool dead_f = wf.note(log10_magnitude(tf), accumulated_log(gf));
        const bool dead_df = wdf.note(log10_magnitude(tdf), accumulated_log(gdf));
        if (dead_f && dead_df) {
          q_done = true;
          break;
        }
      }
    }
  }

  // First-kind-degree rows climbing away from the join, with the opposite
  // overall sign.
  {
    TruncationWatch wf, wdf;
    for (std::size_t k = 0; k < tail.e.size(); ++k) {
      const std::size_t pi = static_cast<std::size_t>(tail.e_degree[k] - m);
      ScaledReal tf = scaled_mul(tail.e[k], pt.p[pi]);
      ScaledReal tdf = scaled_mul(tail.e[k], pt.dp[pi]);
      if (k % 2 == 0) {
        tf = scaled_neg(tf);
        tdf = scaled_neg(tdf);
      }
      gf.add(tf);
      pf.add(tf);
      gdf.add(tdf);
      pdf.add(tdf);
      ++terms;
      if (k >= 2) {
        const bool dead_f = wf.note(log10_magnitude(tf), accumulated_log(gf));
        const bool dead_df = wdf.note(log10_magnitude(tdf), accumulated_log(gdf));
        if (dead_f && dead_df) {
          p_done = true;
          break;
        }
      }
    }
  }

  AssembledExpansion out;
  out.f = gf.total();
  out.df = gdf.total();
  out.q_half = qf.total();
  out.p_half = pf.total();
  out.sub_f = gf.subtraction_error();
  out.sub_df = gdf.subtraction_error();
  out.sub_q = std::max(qf.subtraction_error(), qdf.subtraction_error());
  out.sub_p = std::max(pf.subtraction_error(), pdf.subtraction_error());
  out.terms_used = terms;
  out.terms_available = m + static_cast<int>(dc.d.size()) + static_cast<int>(tail.e.size());
  out.converged = q_done && p_done;
  return out;
}

// Reusable expansion tables at fixed (m, xi): the backward ratio sweep for
// the second-kind table is the dominant cost at tiny xi, so one table serves
// every l of a dispatcher call.
struct SharedLegendreTables {
  ImagLegendreQ q_xi;
  ImagLegendreP p_xi;
  ImagLegendreQ q_zero;
  ImagLegendreP p_zero;
  std::int64_t q_top = -1;
  std::int64_t p_top = -1;
};

struct LegendreCore {
  AssembledExpansion at_xi;
  AssembledExpansion at_zero;
  ScaledReal kappa;
  int sub_kappa = 0;
};

LegendreCore legendre_core(const DCoefficients& dc, double xi,
                           const SharedLegendreTables* shared) {
  const int m = dc.m;
  const LowDegreeTail tail = low_degree_tail(dc, second_family_count(dc.c));
  const std::int64_t q_top = m + dc.n_max;
  const std::int64_t p_top = tail.e_degree.back();

  LegendreCore core;
  if (shared != nullptr && shared->q_top >= q_top && shared->p_top >= p_top) {
    core.at_xi = assemble_legendre_series(dc, tail, shared->q_xi, shared->p_xi);
    core.at_zero = assemble_legendre_series(dc, tail, shared->q_zero, shared->p_zero);
  } else {
    {
      const ImagLegendreQ qt = legendre_q_imag(m, xi, q_top);
      const ImagLegendreP pt = legendre_p_imag(m, xi, p_top);
      core.at_xi = assemble_legendre_series(dc, tail, qt, pt);
    }
    const ImagLegendreQ q0 = legendre_q_imag(m, 0.0, q_top);
    const ImagLegendreP p0 = legendre_p_imag(m, 0.0, p_top);
    core.at_zero = assemble_legendre_series(dc, tail, q0, p0);
  }

  // The joining factor comes from matching the xi = 0 limit against the
  // exact first-kind values through the Wronskian: for even l - m the
  // derivative of the assembled series carries the constraint, for odd l - m
  // the function value does.
  const RadialResult r1z = r1_xi_zero(dc);
  if (dc.parity == 0) {
    core.kappa = scaled_mul(normalize(dc.c), scaled_mul(r1z.r, core.at_zero.df));
    core.sub_kappa = std::max(core.at_zero.sub_df, r1z.subtraction_error);
  } else {
    core.kappa =
        scaled_neg(scaled_mul(normalize(dc.c), scaled_mul(r1z.dr_dxi, core.at_zero.f)));
    core.sub_kappa = std::max(core.at_zero.sub_f, r1z.subtraction_error);
  }
  if (is_zero(core.kappa)) {
    throw NumericalError("legendre expansion: joining factor lost to cancellation");
  }
  return core;
}

RadialResult r2_legendre_with(const DCoefficients& dc, double xi,
                              const SharedLegendreTables* shared) {
  const LegendreCore core = legendre_core(dc, xi, shared);
  RadialResult out;
  out.r = scaled_div(core.at_xi.f, core.kappa);
  out.dr_dxi = scaled_div(core.at_xi.df, core.kappa);
  out.kind = RadialKind::second;
  out.method = RadialMethod::legendre_traditional;
  out.eta_used = 1.0;
  out.subtraction_error =
      std::max({core.at_xi.sub_f, core.at_xi.sub_df, core.sub_kappa});
  out.accuracy_digits = clamp_accuracy(out.subtraction_error);
  out.terms_used = core.at_xi.terms_used;
  out.terms_available = core.at_xi.terms_available;
  return out;
}

// ---------------------------------------------------------------------------
// Irregular-kernel (Neumann) expansions
// ---------------------------------------------------------------------------

// Convergent paired sums with the shared truncation rule of the first-kind
// expansions, plus an honest shortfall when the stored set (or the term cap)
// ends before the tail is confirmed dead.
struct ConvergentSums {
  SignedAccumulator f;
  SignedAccumulator df;
  int terms_used = 0;
  int truncation_error = 0;
  bool capped = false;
};

template <typename TermFn>
ConvergentSums sum_convergent(const DCoefficients& dc, std::int64_t max_terms,
                              TermFn&& term) {
  ConvergentSums out;
  TruncationWatch wf, wdf;
  const std::int64_t peak = dc.l - dc.m;
  double phase = ((peak - dc.parity) / 2) % 2 == 0 ? 1.0 : -1.0;
  double last_rel = 0.0;
  bool done = false;
  for (std::int64_t n = dc.parity; n <= dc.n_max; n += 2) {
    ScaledReal tf, tdf;
    term(n, phase, tf, tdf);
    out.f.add(tf);
    out.df.add(tdf);
    ++out.terms_used;
    if (n >= peak) {
      last_rel = std::max(log10_magnitude(tf) - accumulated_log(out.f),
                          log10_magnitude(tdf) - accumulated_log(out.df));
      const bool dead_f = wf.note(log10_magnitude(tf), accumulated_log(out.f));
      const bool dead_df = wdf.note(log10_magnitude(tdf), accumulated_log(out.df));
      if (dead_f && dead_df) {
        done = true;
        break;
      }
    }
    if (out.terms_used >= max_terms) {
      out.capped = true;
      break;
    }
    phase = -phase;
  }
  if (!done) {
    out.truncation_error =
        std::clamp(kNdec + static_cast<int>(std::ceil(last_rel)), 0, kNdec);
  }
  return out;
}

// Asymptotic paired sums: stop at the first term below 10^-ndec relative,
// otherwise rewind to the recorded minimum once contributions grow three
// decades past it (or the stored set ends).  The floor enters the
// subtraction error.
struct AsymptoticSums {
  SignedAccumulator f;
  SignedAccumulator df;
  int terms_used = 0;
  int truncation_error = 0;
};

template <typename TermFn>
AsymptoticSums sum_asymptotic(const DCoefficients& dc, TermFn&& term) {
  AsymptoticSums out;
  const std::int64_t peak = dc.l - dc.m;
  double phase = ((peak - dc.parity) / 2) % 2 == 0 ? 1.0 : -1.0;
  SignedAccumulator f, df, best_f, best_df;
  int terms = 0;
  int best_terms = 0;
  double best_rel = std::numeric_limits<double>::max();
  bool done = false;
  for (std::int64_t n = dc.parity; n <= dc.n_max; n += 2) {
    ScaledReal tf, tdf;
    term(n, phase, tf, tdf);
    f.add(tf);
    df.add(tdf);
    ++terms;
    if (n >= peak) {
      const double rel = std::max(log10_magnitude(tf) - accumulated_log(f),
                                  log10_magnitude(tdf) - accumulated_log(df));
      if (rel <= best_rel) {
        best_rel = rel;
        best_f = f;
        best_df = df;
        best_terms = terms;
      }
      if (rel < -static_cast<double>(kNdec)) {
        done = true;
        break;
      }
      if (rel > best_rel + 3.0) break;
    }
    phase = -phase;
  }
  if (done) {
    out.f = f;
    out.df = df;
    out.terms_used = terms;
  } else {
    out.f = best_f;
    out.df = best_df;
    out.terms_used = best_terms;
    out.truncation_error =
        std::clamp(kNdec + static_cast<int>(std::ceil(best_rel)), 0, kNdec);
  }
  return out;
}

RadialResult assemble_second(const SignedAccumulator& f, const SignedAccumulator& df,
                             int terms_used, int extra_sub, const SeriesSum& den,
                             const ScaledReal& prefactor, RadialMethod method,
                             double eta_used, const DCoefficients& dc) {
  RadialResult out;
  out.r = scaled_mul(prefactor, scaled_div(f.total(), den.value));
  out.dr_dxi = scaled_mul(prefactor, scaled_div(df.total(), den.value));
  out.kind = RadialKind::second;
  out.method = method;
  out.eta_used = eta_used;
  out.subtraction_error = std::max({f.subtraction_error(), df.subtraction_error(),
                                    den.subtraction_error, extra_sub});
  out.accuracy_digits = clamp_accuracy(out.subtraction_error);
  out.terms_used = std::max(terms_used, den.terms_used);
  out.terms_available = static_cast<int>(dc.d.size());
  return out;
}

}  // namespace

LegendreExpansionParts legendre_expansion_parts(const DCoefficients& dc, double xi) {
  if (dc.d.empty()) {
    throw std::invalid_argument("legendre_expansion_parts: empty coefficient set");
  }
  if (!(dc.c > 0.0)) throw std::invalid_argument("legendre_expansion_parts: requires c > 0");
  if (!(xi >= 0.0)) throw std::invalid_argument("legendre_expansion_parts: requires xi >= 0");
  const LegendreCore core = legendre_core(dc, xi, nullptr);
  LegendreExpansionParts parts;
  parts.q_series_sum = core.at_xi.q_half;
  parts.p_series_sum = core.at_xi.p_half;
  parts.joining_factor_kappa = core.kappa;
  parts.subtraction_error_q = core.at_xi.sub_q;
  parts.subtraction_error_p = core.at_xi.sub_p;
  parts.subtraction_error_kappa = core.sub_kappa;
  return parts;
}

RadialResult r2_legendre_traditional(const DCoefficients& dc, double xi, bool force) {
  check_second_inputs(dc, xi, "r2_legendre_traditional");
  if (xi > 0.99 && !force) {
    throw std::domain_error(
        "r2_legendre_traditional: xi above 0.99 is outside the expansion's useful "
        "range (pass force to evaluate anyway)");
  }
  return r2_legendre_with(dc, xi, nullptr);
}

RadialResult r2_xi_zero(const DCoefficients& dc) {
  if (dc.d.empty()) throw std::invalid_argument("r2_xi_zero: empty coefficient set");
  if (!(dc.c > 0.0)) throw std::invalid_argument("r2_xi_zero: requires c > 0");
  const RadialResult r1z = r1_xi_zero(dc);
  const LegendreCore core = legendre_core(dc, 0.0, nullptr);

  RadialResult out;
  out.kind = RadialKind::second;
  out.method = RadialMethod::xi_zero;
  out.eta_used = 1.0;
  out.terms_used = core.at_zero.terms_used;
  out.terms_available = core.at_zero.terms_available;

  int comp_sub = 0;
  if (dc.parity == 0) {
    // Exact derivative from the Wronskian; the function value is the series
    // complement, dropped when cancellation eats to within 3 digits.
    out.dr_dxi = scaled_div(normalize(1.0), scaled_mul(normalize(dc.c), r1z.r));
    comp_sub = std::max(core.at_zero.sub_f, core.sub_kappa);
    out.r = comp_sub >= kNdec - 3 ? ScaledReal{} : scaled_div(core.at_zero.f, core.kappa);
  } else {
    out.r = scaled_neg(
        scaled_div(normalize(1.0), scaled_mul(normalize(dc.c), r1z.dr_dxi)));
    comp_sub = std::max(core.at_zero.sub_df, core.sub_kappa);
    out.dr_dxi =
        comp_sub >= kNdec - 3 ? ScaledReal{} : scaled_div(core.at_zero.df, core.kappa);
  }
  out.subtraction_error = comp_sub;
  out.accuracy_digits = clamp_accuracy(comp_sub);
  return out;
}

RadialResult r2_neumann_traditional(const DCoefficients& dc, double xi) {
  check_second_inputs(dc, xi, "r2_neumann_traditional");
  const int m = dc.m;
  const double z = dc.c * xi;
  const int top = m + static_cast<int>(dc.n_max);
  const std::vector<ScaledReal> y = spherical_neumann_y(z, top);
  const std::vector<ScaledReal> yd = spherical_derivative(y, z);
  const SeriesSum den = factorial_ratio_sum(dc);

  const double pref_rate = -static_cast<double>(m) / (xi * (xi * xi + 1.0));
  FactorialRatio ratio(m, dc.parity);
  const AsymptoticSums num =
      sum_asymptotic(dc, [&](std::int64_t n, double phase, ScaledReal& tf, ScaledReal& tdf) {
        const ScaledReal w = scaled_mul(dc.at(n), ratio.value());
        const ScaledReal signed_w = phase < 0.0 ? scaled_neg(w) : w;
        const ScaledReal yn = y[static_cast<std::size_t>(m + n)];
        const ScaledReal ydn = yd[static_cast<std::size_t>(m + n)];
        tf = scaled_mul(signed_w, yn);
        tdf = scaled_mul(signed_w, scaled_add(scaled_mul(ydn, normalize(dc.c)),
                                              scaled_mul(yn, normalize(pref_rate))));
        ratio.advance();
      });

  const ScaledReal prefactor =
      scaled_pow_int(scaled_sqrt(normalize((xi * xi + 1.0) / (xi * xi))), m);
  return assemble_second(num.f, num.df, num.terms_used, num.truncation_error, den,
                         prefactor, RadialMethod::neumann_traditional, 1.0, dc);
}

RadialResult r2_neumann_eta0(const DCoefficients& dc, double xi) {
  check_second_inputs(dc, xi, "r2_neumann_eta0");
  if (xi < 0.01) {
    throw std::invalid_argument(
        "r2_neumann_eta0: requires xi >= 0.01 (the series needs ~35/ln(1+xi^2) rows)");
  }
  // The series gains log10(1+xi^2) decades per row once past the peak, so at
  // small xi it converges only with a coefficient set far deeper than the
  // default.  Extend the set when the estimate fits under the term cap; past
  // the cap the result is flagged below target.
  constexpr std::int64_t kTermCap = 1'000'000;
  const std::int64_t needed_terms =
      static_cast<std::int64_t>((kNdec + 3.0) / std::log10(1.0 + xi * xi)) +
      (dc.l - dc.m) / 2 + 120;
  const std::int64_t needed_n = 2 * needed_terms + dc.parity;
  bool capped_by_policy = false;
  DCoefficients deep;
  const DCoefficients* use = &dc;
  if (dc.n_max < needed_n) {
    if (needed_terms <= kTermCap) {
      deep = d_coefficients(dc.m, dc.l, dc.c, dc.lambda, needed_n);
      use = &deep;
    } else {
      capped_by_policy = true;
    }
  }

  const int m = use->m;
  const double s1 = std::sqrt(xi * xi + 1.0);
  const double z = use->c * s1;
  const double dz_dxi = use->c * xi / s1;
  const int top = m + static_cast<int>(use->n_max);
  const std::vector<ScaledReal> y = spherical_neumann_y(z, top);
  const std::vector<ScaledReal> yd = spherical_derivative(y, z);
  const RealLegendreSet leg = legendre_p_at_zero(m, static_cast<int>(use->n_max));

  SignedAccumulator den_acc;
  TruncationWatch den_watch;
  int den_terms = 0;
  const bool odd = use->parity != 0;
  const std::int64_t peak = use->l - use->m;
  for (std::int64_t n = use->parity; n <= use->n_max; n += 2) {
    const ScaledReal& factor = odd ? leg.dp[static_cast<std::size_t>(n)]
                                   : leg.p[static_cast<std::size_t>(n)];
    const ScaledReal t = scaled_mul(use->at(n), factor);
    den_acc.add(t);
    ++den_terms;
    if (n >= peak && den_watch.note(log10_magnitude(t), accumulated_log(den_acc))) break;
  }
  const SeriesSum den{den_acc.total(), den_acc.subtraction_error(), den_terms};

  ConvergentSums num;
  if (!odd) {
    num = sum_convergent(
        *use, kTermCap, [&](std::int64_t n, double phase, ScaledReal& tf, ScaledReal& tdf) {
          const ScaledReal base = scaled_mul(use->at(n), leg.p[static_cast<std::size_t>(n)]);
          const ScaledReal signed_base = phase < 0.0 ? scaled_neg(base) : base;
          tf = scaled_mul(signed_base, y[static_cast<std::size_t>(m + n)]);
          tdf = scaled_mul(signed_base, scaled_mul(yd[static_cast<std::size_t>(m + n)],
                                                   normalize(dz_dxi)));
        });
  } else {
    const double g = xi / s1;
    const double gp = 1.0 / (s1 * s1 * s1);
    num = sum_convergent(
        *use, kTermCap, [&](std::int64_t n, double phase, ScaledReal& tf, ScaledReal& tdf) {
          const ScaledReal base = scaled_mul(use->at(n), leg.dp[static_cast<std::size_t>(n)]);
          const ScaledReal signed_base = phase < 0.0 ? scaled_neg(base) : base;
          const ScaledReal yn = y[static_cast<std::size_t>(m + n)];
          const ScaledReal ydn = yd[static_cast<std::size_t>(m + n)];
          tf = scaled_mul(signed_base, scaled_mul(yn, normalize(g)));
          tdf = scaled_mul(signed_base, scaled_add(scaled_mul(yn, normalize(gp)),
                                                   scaled_mul(ydn, normalize(g * dz_dxi))));
        });
  }
  RadialResult out =
      assemble_second(num.f, num.df, num.terms_used, num.truncation_error, den,
                      normalize(1.0), RadialMethod::neumann_eta0, 0.0, *use);
  out.below_target = num.capped || capped_by_policy;
  return out;
}

RadialResult r2_neumann_variable_eta(const DCoefficients& dc, double xi, double theta) {
  check_second_inputs(dc, xi, "r2_neumann_variable_eta");
  if (!(xi > 0.05)) {
    throw std::invalid_argument("r2_neumann_variable_eta: requires xi > 0.05");
  }
  if (!(theta >= 0.0 && theta <= kHalfPi + 1e-12)) {
    throw std::invalid_argument("r2_neumann_variable_eta: theta must lie in [0, pi/2]");
  }
  if (theta == 0.0) return r2_neumann_traditional(dc, xi);
  const double eta = std::cos(std::min(theta, kHalfPi));
  if (eta < 1e-12) return r2_neumann_eta0(dc, xi);

  const int m = dc.m;
  const double w2 = xi * xi - eta * eta + 1.0;
  const double sq = std::sqrt(w2);
  const double z = dc.c * sq;
  const double u = eta * xi / sq;
  const double dz_dxi = dc.c * xi / sq;
  const double du_dxi = eta * (1.0 - eta * eta) / (w2 * sq);

  const int n_top = static_cast<int>(dc.n_max);
  const std::vector<ScaledReal> y = spherical_neumann_y(z, m + n_top);
  const std::vector<ScaledReal> yd = spherical_derivative(y, z);
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

  const AsymptoticSums num =
      sum_asymptotic(dc, [&](std::int64_t n, double phase, ScaledReal& tf, ScaledReal& tdf) {
        const ScaledReal signed_d = phase < 0.0 ? scaled_neg(dc.at(n)) : dc.at(n);
        const ScaledReal yn = y[static_cast<std::size_t>(m + n)];
        const ScaledReal ydn = yd[static_cast<std::size_t>(m + n)];
        const ScaledReal pu = leg_u.p[static_cast<std::size_t>(n)];
        const ScaledReal dpu = leg_u.dp[static_cast<std::size_t>(n)];
        tf = scaled_mul(signed_d, scaled_mul(yn, pu));
        tdf = scaled_mul(signed_d,
                         scaled_add(scaled_mul(scaled_mul(ydn, pu), normalize(dz_dxi)),
                                    scaled_mul(scaled_mul(yn, dpu), normalize(du_dxi))));
      });
  RadialResult out =
      assemble_second(num.f, num.df, num.terms_used, num.truncation_error, den,
                      normalize(1.0), RadialMethod::neumann_variable_eta, eta, dc);
  return out;
}

// ---------------------------------------------------------------------------
// Integral form
// ---------------------------------------------------------------------------

namespace {

struct RawBank {
  std::vector<SignedAccumulator> a;       // even rows
  std::vector<SignedAccumulator> c_kind;  // even rows, one extra entry
  std::vector<SignedAccumulator> d_kind;  // odd rows
};

RawBank integrate_bank(int m, double c, double xi, int n_count, int order,
                       const std::vector<double>& bounds) {
  RawBank raw;
  raw.a.resize(static_cast<std::size_t>(n_count));
  raw.c_kind.resize(static_cast<std::size_t>(n_count) + 1);
  raw.d_kind.resize(static_cast<std::size_t>(n_count));
  const QuadratureRule rule = gauss_legendre_rule(order);
  for (std::size_t b = 0; b + 1 < bounds.size(); ++b) {
    const double mid = 0.5 * (bounds[b] + bounds[b + 1]);
    const double half = 0.5 * (bounds[b + 1] - bounds[b]);
    for (std::size_t q = 0; q < rule.node.size(); ++q) {
      const double eta = mid + half * rule.node[q];
      const double w = 2.0 * half * rule.weight[q];  // doubled onto the full range
      const double w2 = xi * xi + 1.0 - eta * eta;
      const double z = c * std::sqrt(w2);
      const std::vector<ScaledReal> y = spherical_neumann_y(z, m + 2);
      const double fbase = (xi * xi + 1.0) * (1.0 - eta * eta) / w2;
      const ScaledReal F =
          m == 0 ? normalize(1.0) : scaled_pow_int(scaled_sqrt(normalize(fbase)), m);
      const RealLegendreSet leg = legendre_p(m, eta, n_count);
      const ScaledReal base_a =
          scaled_mul(normalize(w), scaled_mul(F, y[static_cast<std::size_t>(m)]));
      const ScaledReal base_c = scaled_mul(normalize(w * c / z),
                                           scaled_mul(F, y[static_cast<std::size_t>(m) + 1]));
      const ScaledReal base_d =
          scaled_mul(normalize(w * eta * (c / z) * (c / z)),
                     scaled_mul(F, y[static_cast<std::size_t>(m) + 2]));
      for (int n = 0; n <= n_count; n += 2) {
        const ScaledReal& pn = leg.p[static_cast<std::size_t>(n)];
        if (n < n_count) raw.a[static_cast<std::size_t>(n)].add(scaled_mul(base_a, pn));
        raw.c_kind[static_cast<std::size_t>(n)].add(scaled_mul(base_c, pn));
      }
      for (int n = 1; n < n_count; n += 2) {
        raw.d_kind[static_cast<std::size_t>(n)].add(
            scaled_mul(base_d, leg.p[static_cast<std::size_t>(n)]));
      }
    }
  }
  return raw;
}

// Entries whose quadrature sum cancelled down to the rounding floor are pure
// noise: the integrand's positive and negative lobes annihilate once the
// Legendre degree outruns the kernel's smoothness scale.  The accumulator's
// own cancellation count detects this exactly.
// Sum of two magnitudes carried as log10; kLogNone marks "no contribution yet".
constexpr double kLogNone = -1.0e9;

double log10_sum(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b <= kLogNone / 2.0) return a;
  return a + std::log10(1.0 + std::pow(10.0, b - a));
}

struct SettledEntries {
  std::vector<ScaledReal> value;
  std::vector<int> cancelled;  // digits lost to cancellation; kNdec+ = noise
  std::vector<int> certified;  // verified digits once both orders agree
};

SettledEntries settle_entries(std::vector<SignedAccumulator>& acc, int start_parity) {
  SettledEntries out;
  out.value.resize(acc.size());
  out.cancelled.assign(acc.size(), kNdec);
  out.certified.assign(acc.size(), 0);
  for (std::size_t i = static_cast<std::size_t>(start_parity); i < acc.size(); i += 2) {
    const int sub = acc[i].subtraction_error();
    out.cancelled[i] = sub;
    out.value[i] = sub >= kNdec - 1 ? ScaledReal{} : acc[i].total();
  }
  return out;
}

// Fine and coarse orders must reproduce each entry to the digits that
// survive its own cancellation, less two decades of accumulation roundoff
// (thousands of adds at the accumulator's peak magnitude), capped at
// ndec − 4; an entry either order flags as noise is treated as noise.
// Entries that pass get a per-entry certificate: the measured agreement,
// never more than the cancellation allows.
bool entries_agree(SettledEntries& fine, const SettledEntries& coarse, int start_parity) {
  for (std::size_t i = static_cast<std::size_t>(start_parity); i < fine.value.size();
       i += 2) {
    const bool noise =
        is_zero(fine.value[i]) || (i < coarse.value.size() && is_zero(coarse.value[i]));
    if (noise) {
      fine.value[i] = ScaledReal{};
      fine.cancelled[i] = kNdec;
      fine.certified[i] = 0;
      continue;
    }
    const int sub = std::max(fine.cancelled[i], coarse.cancelled[i]);
    const int agreement = digits_of_agreement(fine.value[i], coarse.value[i]);
    const int required = std::min(kNdec - 4, kNdec - 3 - sub);
    if (required > 0 && agreement < required) return false;
    fine.certified[i] = std::clamp(std::min(agreement, kNdec - 1 - sub), 0, kNdec);
  }
  return true;
}

}  // namespace

IntegralBank build_integral_bank(int m, double c, double xi, int n_count) {
  if (m < 0) throw std::invalid_argument("build_integral_bank: requires m >= 0");
  if (!(c > 0.0)) throw std::invalid_argument("build_integral_bank: requires c > 0");
  if (!(xi > 0.0)) throw std::invalid_argument("build_integral_bank: requires xi > 0");
  if (n_count < 2) throw std::invalid_argument("build_integral_bank: requires n_count >= 2");

  // Panel layout: uniform when the integrand is smooth, geometric halving
  // toward eta = 1 to resolve the boundary layer of width ~xi^2 at small xi.
  std::vector<double> bounds;
  if (xi >= 0.1) {
    bounds = {0.0, 0.25, 0.5, 0.75, 1.0};
  } else {
    const int panels =
        std::clamp(static_cast<int>(std::ceil(std::log2(1.0 / (xi * xi)))) + 4, 6, 26);
    bounds.push_back(0.0);
    double dist = 0.5;
    for (int i = 1; i < panels; ++i) {
      bounds.push_back(1.0 - dist);
      dist *= 0.5;
    }
    bounds.push_back(1.0);
  }
  const int panels = static_cast<int>(bounds.size()) - 1;

  int order = std::max(2 * static_cast<int>(std::ceil(c)) + 100,
                       static_cast<int>(std::ceil(c)) + (m + n_count) / 2 + 100);
  for (int round = 0; round < 3; ++round) {
    RawBank fine = integrate_bank(m, c, xi, n_count, order, bounds);
    RawBank coarse = integrate_bank(m, c, xi, n_count, (order * 7) / 10, bounds);
    SettledEntries a_f = settle_entries(fine.a, 0);
    SettledEntries c_f = settle_entries(fine.c_kind, 0);
    SettledEntries d_f = settle_entries(fine.d_kind, 1);
    const SettledEntries a_c = settle_entries(coarse.a, 0);
    const SettledEntries c_c = settle_entries(coarse.c_kind, 0);
    const SettledEntries d_c = settle_entries(coarse.d_kind, 1);
    if (entries_agree(a_f, a_c, 0) && entries_agree(c_f, c_c, 0) &&
        entries_agree(d_f, d_c, 1)) {
      IntegralBank bank;
      bank.m = m;
      bank.c = c;
      bank.xi = xi;
      bank.I_a = std::move(a_f.value);
      bank.I_c = std::move(c_f.value);
      bank.I_d = std::move(d_f.value);
      bank.digits_a = std::move(a_f.certified);
      bank.digits_c = std::move(c_f.certified);
      bank.digits_d = std::move(d_f.certified);
      bank.I_b.assign(static_cast<std::size_t>(n_count), ScaledReal{});
      bank.digits_b.assign(static_cast<std::size_t>(n_count), 0);
      for (int n = 1; n < n_count; n += 2) {
        const ScaledReal t_lo = scaled_mul(bank.I_c[static_cast<std::size_t>(n - 1)],
                                           normalize(static_cast<double>(n + 2 * m)));
        const ScaledReal t_hi = scaled_mul(bank.I_c[static_cast<std::size_t>(n + 1)],
                                           normalize(static_cast<double>(n + 1)));
        const ScaledReal mix = scaled_add(t_lo, t_hi);
        ScaledReal& derived = bank.I_b[static_cast<std::size_t>(n)];
        derived = scaled_div(mix, normalize(static_cast<double>(2 * n + 2 * m + 1)));
        // The derived entry inherits both neighbours' uncertainties; weigh each
        // by the magnitude it enters the mix with, then read off how many
        // digits of the result sit above that error level.
        double err_log = kLogNone;
        if (!is_zero(t_lo)) {
          err_log = log10_sum(err_log, log10_magnitude(t_lo) -
                                           bank.digits_c[static_cast<std::size_t>(n - 1)]);
        }
        if (!is_zero(t_hi)) {
          err_log = log10_sum(err_log, log10_magnitude(t_hi) -
                                           bank.digits_c[static_cast<std::size_t>(n + 1)]);
        }
        if (!is_zero(derived) && err_log > kLogNone / 2.0) {
          const double margin = log10_magnitude(mix) - err_log;
          bank.digits_b[static_cast<std::size_t>(n)] =
              std::clamp(static_cast<int>(std::floor(margin)), 0, kNdec);
        }
      }
      bank.quadrature_order = order;
      bank.refinement_panels = panels;
      return bank;
    }
    order = (order * 3) / 2;
  }
  throw NumericalError("build_integral_bank: quadrature failed to stabilize");
}

RadialResult r2_integral(const DCoefficients& dc, const IntegralBank& bank) {
  if (dc.d.empty()) throw std::invalid_argument("r2_integral: empty coefficient set");
  if (!(dc.c > 0.0)) throw std::invalid_argument("r2_integral: requires c > 0");
  if (bank.m != dc.m || bank.c != dc.c) {
    throw std::invalid_argument("r2_integral: bank built for different (m, c)");
  }
  if (!(bank.xi > 0.0)) throw std::invalid_argument("r2_integral: bank has xi <= 0");

  const double xi = bank.xi;
  const int m = dc.m;
  const bool odd = dc.parity != 0;
  const std::vector<ScaledReal>& If = odd ? bank.I_b : bank.I_a;
  const std::vector<ScaledReal>& Ig = odd ? bank.I_d : bank.I_c;
  const std::int64_t peak = dc.l - dc.m;
  const std::int64_t n_cap =
      std::min<std::int64_t>(dc.n_max, static_cast<std::int64_t>(If.size()) - 1);

  // The integral series is the term-by-term integration of the plain angular
  // series, so it carries no alternating phase; the parity sign lives in the
  // closing-row prefactor.
  const std::vector<int>& digits_f = odd ? bank.digits_b : bank.digits_a;
  const std::vector<int>& digits_g = odd ? bank.digits_d : bank.digits_c;
  SignedAccumulator sf, sg;
  TruncationWatch wf, wg;
  int terms = 0;
  double last_rel = 0.0;
  double err_f_log = kLogNone;
  double err_g_log = kLogNone;
  bool done = false;
  for (std::int64_t n = dc.parity; n <= n_cap; n += 2) {
    const ScaledReal tf = scaled_mul(dc.at(n), If[static_cast<std::size_t>(n)]);
    const ScaledReal tg = scaled_mul(dc.at(n), Ig[static_cast<std::size_t>(n)]);
    sf.add(tf);
    sg.add(tg);
    if (!is_zero(tf)) {
      err_f_log = log10_sum(
          err_f_log, log10_magnitude(tf) - digits_f[static_cast<std::size_t>(n)]);
    }
    if (!is_zero(tg)) {
      err_g_log = log10_sum(
          err_g_log, log10_magnitude(tg) - digits_g[static_cast<std::size_t>(n)]);
    }
    ++terms;
    if (n >= peak) {
      last_rel = std::max(log10_magnitude(tf) - accumulated_log(sf),
                          log10_magnitude(tg) - accumulated_log(sg));
      const bool dead_f = wf.note(log10_magnitude(tf), accumulated_log(sf));
      const bool dead_g = wg.note(log10_magnitude(tg), accumulated_log(sg));
      if (dead_f && dead_g) {
        done = true;
        break;
      }
    }
  }
  const int trunc_sub =
      done ? 0 : std::clamp(kNdec + static_cast<int>(std::ceil(last_rel)), 0, kNdec);

  const double sign_factor = odd ? (((peak - 1) / 2) % 2 == 0 ? 1.0 : -1.0)
                                 : ((peak / 2) % 2 == 0 ? 1.0 : -1.0);
  const ScaledReal anchor = odd ? dc.at(1) : dc.at(0);
  const double top_factor = odd ? 2.0 * m + 3.0 : 2.0 * m + 1.0;
  ScaledReal B = scaled_div(
      normalize(top_factor),
      scaled_mul(scaled_pow_int(normalize(2.0), m + 1), scaled_mul(scaled_factorial(m), anchor)));
  if (sign_factor < 0.0) B = scaled_neg(B);

  RadialResult out;
  out.kind = RadialKind::second;
  out.method = RadialMethod::integral;
  out.eta_used = 0.0;
  SignedAccumulator da;
  if (!odd) {
    out.r = scaled_mul(B, sf.total());
    da.add(scaled_mul(out.r, normalize(m * xi / (xi * xi + 1.0))));
    da.add(scaled_neg(scaled_mul(scaled_mul(B, sg.total()), normalize(dc.c * xi))));
  } else {
    out.r = scaled_mul(scaled_mul(B, sf.total()), normalize(xi));
    da.add(scaled_mul(out.r, normalize(((m + 1) * xi * xi + 1.0) / (xi * (xi * xi + 1.0)))));
    da.add(scaled_neg(scaled_mul(scaled_mul(B, sg.total()), normalize(dc.c * xi * xi))));
  }
  out.dr_dxi = da.total();
  out.subtraction_error = std::max({sf.subtraction_error(), sg.subtraction_error(),
                                    da.subtraction_error(), trunc_sub});
  // Accuracy is capped twice: by cancellation in the sums, and by the
  // certified digits of the bank entries the surviving terms were built from.
  int entry_digits = kNdec;
  if (!is_zero(sf.total()) && err_f_log > kLogNone / 2.0) {
    entry_digits = std::min(
        entry_digits,
        static_cast<int>(std::floor(log10_magnitude(sf.total()) - err_f_log)));
  }
  if (!is_zero(sg.total()) && err_g_log > kLogNone / 2.0) {
    entry_digits = std::min(
        entry_digits,
        static_cast<int>(std::floor(log10_magnitude(sg.total()) - err_g_log)));
  }
  out.accuracy_digits =
      std::clamp(std::min(clamp_accuracy(out.subtraction_error), entry_digits), 0, kNdec);
  out.terms_used = terms;
  out.terms_available = static_cast<int>((n_cap - dc.parity) / 2 + 1);
  return out;
}

// ---------------------------------------------------------------------------
// Single-step recursion expansion
// ---------------------------------------------------------------------------

BaberHasseCoefficients baber_hasse_coefficients(int m, int l, double c, double lambda,
                                                int count) {
  if (m < 0 || l < m) throw std::invalid_argument("baber_hasse_coefficients: requires l >= m >= 0");
  if (!(c > 0.0)) throw std::invalid_argument("baber_hasse_coefficients: requires c > 0");
  if (count < m + 2) {
    throw std::invalid_argument("baber_hasse_coefficients: count must exceed m + 1");
  }

  const auto k_up = [&](double n) {
    return 2.0 * c * (n + m + 1.0) * (n + 2.0 * m + 1.0) / (2.0 * n + 2.0 * m + 3.0);
  };
  const auto k_mid = [&](double n) { return (n + m) * (n + m + 1.0) - lambda - c * c; };
  const auto k_dn = [&](double n) {
    return 2.0 * c * n * (n + m) / (2.0 * n + 2.0 * m - 1.0);
  };
  const auto guarded = [](double v) {
    const double floor_mag = 1e-280;
    if (std::abs(v) < floor_mag) return v < 0.0 ? -floor_mag : floor_mag;
    return v;
  };

  BaberHasseCoefficients bh;
  bh.m = m;
  bh.l = l;
  bh.c = c;
  bh.lambda = lambda;
  bh.anchor_index = -m;
  bh.ratios.assign(static_cast<std::size_t>(count - 1), 0.0);

  // Decaying solution for n >= 0, built backward from far above the chain.
  {
    const std::int64_t n_top = count - 2 - m;
    const std::int64_t start = n_top + 80 + static_cast<std::int64_t>(std::ceil(c));
    double above = 0.0;
    for (std::int64_t n = start; n >= 1; --n) {
      const double dn = static_cast<double>(n);
      const double below = k_dn(dn) / guarded(k_up(dn) * above - k_mid(dn));
      if (n - 1 <= n_top) bh.ratios[static_cast<std::size_t>(n - 1 + m)] = below;
      above = below;
    }
  }
  // Forward continuation from the closing row, whose trailing coefficient
  // vanishes identically and fixes the first ratio.
  if (m >= 1) {
    bh.ratios[0] = k_mid(static_cast<double>(-m)) / guarded(k_up(static_cast<double>(-m)));
    for (std::int64_t n = -m + 1; n <= -1; ++n) {
      const double dn = static_cast<double>(n);
      bh.ratios[static_cast<std::size_t>(n + m)] =
          (k_mid(dn) + k_dn(dn) / guarded(bh.ratios[static_cast<std::size_t>(n + m - 1)])) /
          guarded(k_up(dn));
    }
  }
  return bh;
}

RadialResult r2_baber_hasse(int m, int l, double c, double lambda, double xi) {
  if (!(xi > 0.0)) throw std::invalid_argument("r2_baber_hasse: requires xi > 0");
  const int count = m + static_cast<int>(std::ceil(std::numbers::e * c)) + 110;
  const BaberHasseCoefficients bh = baber_hasse_coefficients(m, l, c, lambda, count);
  const ImagLegendreQ qt = legendre_q_imag(m, xi, count - 1);

  // Terms step the degree by 1 and cycle through a 4-phase pattern; the two
  // real collectors and their derivatives carry the whole series.
  SignedAccumulator accX, accY, accXd, accYd;
  TruncationWatch wX, wY, wXd, wYd;
  bool deadX = false, deadY = false, deadXd = false, deadYd = false;
  ScaledReal amp = normalize(1.0);
  int terms = 0;
  bool converged = false;
  for (std::int64_t t = 0; t < count; ++t) {
    const std::size_t qi = static_cast<std::size_t>(t + m);
    ScaledReal tf = scaled_mul(amp, qt.q[qi]);
    ScaledReal tdf = scaled_mul(amp, qt.dq[qi]);
    const int cyc = static_cast<int>(t % 4);
    if (cyc == 1 || cyc == 2) {
      tf = scaled_neg(tf);
      tdf = scaled_neg(tdf);
    }
    if (cyc % 2 == 0) {
      accX.add(tf);
      accXd.add(tdf);
      if (t >= 8) {
        deadX = wX.note(log10_magnitude(tf), accumulated_log(accX));
        deadXd = wXd.note(log10_magnitude(tdf), accumulated_log(accXd));
      }
    } else {
      accY.add(tf);
      accYd.add(tdf);
      if (t >= 8) {
        deadY = wY.note(log10_magnitude(tf), accumulated_log(accY));
        deadYd = wYd.note(log10_magnitude(tdf), accumulated_log(accYd));
      }
    }
    ++terms;
    if (deadX && deadY && deadXd && deadYd) {
      converged = true;
      break;
    }
    if (t + 1 < count) amp = scaled_mul(amp, normalize(bh.ratios[static_cast<std::size_t>(t)]));
  }
  if (!converged) {
    throw NumericalError("r2_baber_hasse: tail not decayed within the coefficient chain");
  }

  const ScaledReal X = accX.total();
  const ScaledReal Y = accY.total();
  const ScaledReal Xd = accXd.total();
  const ScaledReal Yd = accYd.total();

  // Rotate by the oscillatory prefactor; its rate couples the derivative to
  // the opposite component.
  const double ca = std::cos(c * xi);
  const double sa = std::sin(c * xi);
  SignedAccumulator aU, aV, aUd, aVd;
  aU.add(scaled_mul(X, normalize(ca)));
  aU.add(scaled_mul(Y, normalize(-sa)));
  aV.add(scaled_mul(X, normalize(sa)));
  aV.add(scaled_mul(Y, normalize(ca)));
  const ScaledReal U = aU.total();
  const ScaledReal V = aV.total();
  aUd.add(scaled_mul(Xd, normalize(ca)));
  aUd.add(scaled_mul(Yd, normalize(-sa)));
  aUd.add(scaled_mul(V, normalize(-c)));
  aVd.add(scaled_mul(Xd, normalize(sa)));
  aVd.add(scaled_mul(Yd, normalize(ca)));
  aVd.add(scaled_mul(U, normalize(c)));
  const ScaledReal Ud = aUd.total();
  const ScaledReal Vd = aVd.total();

  // The expansion's overall phase is known only up to a quarter turn, so
  // match amplitude against the first-kind value and keep the turn whose
  // Wronskian lands on target.
  const DCoefficients dc = d_coefficients(m, l, c, lambda);
  std::vector<DCoefficients> one;
  one.push_back(dc);
  const RadialResult r1 = r1_table(xi, one)[0];

  struct Turn {
    ScaledReal first;
    ScaledReal second;
    ScaledReal second_d;
  };
  const Turn turns[4] = {{U, V, Vd},
                         {scaled_neg(V), U, Ud},
                         {scaled_neg(U), scaled_neg(V), scaled_neg(Vd)},
                         {V, scaled_neg(U), scaled_neg(Ud)}};
  int best_w = -1;
  ScaledReal best_r, best_dr;
  for (const Turn& turn : turns) {
    if (is_zero(turn.first)) continue;
    const ScaledReal rho = scaled_div(r1.r, turn.first);
    const ScaledReal cand_r = scaled_mul(rho, turn.second);
    const ScaledReal cand_dr = scaled_mul(rho, turn.second_d);
    const int w = wronskian_accuracy(r1.r, r1.dr_dxi, cand_r, cand_dr, c, xi);
    if (w > best_w) {
      best_w = w;
      best_r = cand_r;
      best_dr = cand_dr;
    }
  }
  if (best_w < 0) {
    throw NumericalError("r2_baber_hasse: no usable phase turn (series degenerate)");
  }

  RadialResult out;
  out.r = best_r;
  out.dr_dxi = best_dr;
  out.kind = RadialKind::second;
  out.method = RadialMethod::baber_hasse;
  out.eta_used = 1.0;
  out.subtraction_error = std::max(
      {accX.subtraction_error(), accY.subtraction_error(), accXd.subtraction_error(),
       accYd.subtraction_error(), aU.subtraction_error(), aV.subtraction_error(),
       aUd.subtraction_error(), aVd.subtraction_error(), r1.subtraction_error});
  out.accuracy_digits = std::min(clamp_accuracy(out.subtraction_error), best_w);
  out.terms_used = terms;
  out.terms_available = count;
  return out;
}

// ---------------------------------------------------------------------------
// Pairing, dispatcher, reporting
// ---------------------------------------------------------------------------

RadialResult r2_from_pairing(const RadialResult& r1_neighbor, int l, int m,
                             int pairing_digits) {
  if (m < 0 || l < m) throw std::invalid_argument("r2_from_pairing: requires l >= m >= 0");
  const bool odd = ((l - m) % 2) != 0;
  RadialResult out;
  out.r = odd ? scaled_neg(r1_neighbor.r) : r1_neighbor.r;
  out.dr_dxi = odd ? scaled_neg(r1_neighbor.dr_dxi) : r1_neighbor.dr_dxi;
  out.kind = RadialKind::second;
  out.method = RadialMethod::pairing;
  out.eta_used = r1_neighbor.eta_used;
  out.accuracy_digits = std::clamp(pairing_digits - 2, 0, kNdec);
  out.subtraction_error = r1_neighbor.subtraction_error;
  out.terms_used = r1_neighbor.terms_used;
  out.terms_available = r1_neighbor.terms_available;
  return out;
}

std::vector<RadialResult> r2_table(int m, double c, double xi, int l_count,
                                   const EigenTable& table, int minacc) {
  if (l_count < 0) throw std::invalid_argument("r2_table: l_count must be >= 0");
  if (minacc < 1 || minacc > kNdec - 2) {
    throw std::invalid_argument("r2_table: minacc must lie in [1, 13]");
  }
  if (!(c > 0.0)) throw std::invalid_argument("r2_table: requires c > 0");
  if (!(xi >= 0.0)) throw std::invalid_argument("r2_table: requires xi >= 0");
  std::vector<RadialResult> out;
  if (l_count == 0) return out;
  if (static_cast<int>(table.entry.size()) < l_count + 1) {
    throw std::invalid_argument("r2_table: eigenvalue table must cover l_count + 1 entries");
  }

  const std::vector<DCoefficients> dcs = coefficient_table(m, c, l_count + 1, table);
  if (xi == 0.0) {
    for (int k = 0; k < l_count; ++k) out.push_back(r2_xi_zero(dcs[static_cast<std::size_t>(k)]));
    return out;
  }
  const std::vector<RadialResult> r1s = r1_table(xi, dcs);

  const bool tall = xi > 0.99;

  SharedLegendreTables shared;
  bool shared_ready = false;
  const auto ensure_shared = [&]() {
    if (shared_ready) return;
    std::int64_t q_top = 0;
    for (const DCoefficients& dc : dcs) q_top = std::max(q_top, m + dc.n_max);
    const std::int64_t p_top = m + 2 * second_family_count(c);
    shared.q_xi = legendre_q_imag(m, xi, q_top);
    shared.p_xi = legendre_p_imag(m, xi, p_top);
    shared.q_zero = legendre_q_imag(m, 0.0, q_top);
    shared.p_zero = legendre_p_imag(m, 0.0, p_top);
    shared.q_top = q_top;
    shared.p_top = p_top;
    shared_ready = true;
  };

  // Bridge ladder per regime; the terminal rung sits last.  In the low-xi
  // lane the Legendre expansion is the terminal and is probed first each
  // row so it takes over as soon as it reaches target.
  std::vector<RadialMethod> ladder;
  if (tall) {
    ladder.push_back(RadialMethod::neumann_traditional);
    if (c > 20.0 && c <= 60.0 && m <= 40) ladder.push_back(RadialMethod::baber_hasse);
    ladder.push_back(RadialMethod::neumann_variable_eta);
    ladder.push_back(RadialMethod::neumann_eta0);
  } else {
    if (c > 20.0 && c <= 60.0 && m <= 40) ladder.push_back(RadialMethod::baber_hasse);
    if (c > 40.0) ladder.push_back(RadialMethod::integral);
    if (xi >= 0.01) ladder.push_back(RadialMethod::neumann_eta0);
    if (xi > 0.05) ladder.push_back(RadialMethod::neumann_variable_eta);
  }

  std::size_t cursor = 0;
  bool pairing_active = true;
  bool bank_tried = false;
  bool bank_ok = false;
  IntegralBank bank;
  const double theta_step = xi > 0.4 ? 0.1 : 0.05;
  double theta_state = theta_step;

  const auto meter = [&](int k, const RadialResult& r2) {
    return wronskian_accuracy(r1s[static_cast<std::size_t>(k)].r,
                              r1s[static_cast<std::size_t>(k)].dr_dxi, r2.r, r2.dr_dxi, c,
                              xi);
  };

  const auto eval_method = [&](RadialMethod which, int k) -> std::optional<RadialResult> {
    const DCoefficients& dc = dcs[static_cast<std::size_t>(k)];
    try {
      switch (which) {
        case RadialMethod::legendre_traditional:
          ensure_shared();
          return r2_legendre_with(dc, xi, &shared);
        case RadialMethod::neumann_traditional:
          return r2_neumann_traditional(dc, xi);
        case RadialMethod::neumann_eta0:
          return r2_neumann_eta0(dc, xi);
        case RadialMethod::baber_hasse:
          return r2_baber_hasse(m, m + k, c,
                                table.entry[static_cast<std::size_t>(k)].lambda, xi);
        case RadialMethod::integral: {
          if (!bank_tried) {
            bank_tried = true;
            std::int64_t deepest = 0;
            for (const DCoefficients& entry : dcs) deepest = std::max(deepest, entry.n_max);
            try {
              bank = build_integral_bank(m, c, xi, static_cast<int>(deepest) + 1);
              bank_ok = true;
            } catch (const NumericalError&) {
              bank_ok = false;
            }
          }
          if (!bank_ok) return std::nullopt;
          return r2_integral(dc, bank);
        }
        case RadialMethod::neumann_variable_eta: {
          // Walk the angle away from the previous row's best; keep the best
          // Wronskian and stop once it reaches target or starts worsening.
          double th = theta_state;
          std::optional<RadialResult> best;
          int best_w = -1;
          double best_th = th;
          int worse = 0;
          for (int evals = 0; evals < 25 && th < kHalfPi - 1e-9; ++evals, th += theta_step) {
            const RadialResult cand = r2_neumann_variable_eta(dc, xi, th);
            const int w = meter(k, cand);
            if (w > best_w) {
              best_w = w;
              best = cand;
              best_th = th;
              worse = 0;
            } else if (++worse >= 2) {
              break;
            }
            if (best_w >= minacc) break;
          }
          if (best) theta_state = best_th;
          return best;
        }
        default:
          return std::nullopt;
      }
    } catch (const NumericalError&) {
      return std::nullopt;
    } catch (const std::domain_error&) {
      return std::nullopt;
    }
  };

  for (int k = 0; k < l_count; ++k) {
    if (pairing_active) {
      const std::size_t pk = static_cast<std::size_t>(k % 2 == 0 ? k : k - 1);
      const int pd = table.entry[pk].pairing_digits;
      const int est = std::min(pd - 2, kNdec);
      // One digit of margin beyond the estimate: the measured Wronskian of a
      // paired row can land a digit under the estimate itself.
      if (pd >= 0 && pd - 3 >= minacc) {
        const int nb = k % 2 == 0 ? k + 1 : k - 1;
        out.push_back(r2_from_pairing(r1s[static_cast<std::size_t>(nb)], m + k, m, pd));
        continue;
      }
      pairing_active = false;
    }

    RadialResult best;
    int best_w = -1;
    const auto consider = [&](const std::optional<RadialResult>& cand) {
      if (!cand) return -1;
      const int w = meter(k, *cand);
      if (w > best_w) {
        best_w = w;
        best = *cand;
      }
      return w;
    };

    bool reached = false;
    if (!tall) {
      reached = consider(eval_method(RadialMethod::legendre_traditional, k)) >= minacc;
    }
    while (!reached && cursor < ladder.size()) {
      reached = consider(eval_method(ladder[cursor], k)) >= minacc;
      if (reached) break;
      if (cursor + 1 < ladder.size()) {
        ++cursor;
      } else {
        break;
      }
    }

    if (best_w < 0) {
      RadialResult none;
      none.kind = RadialKind::second;
      none.method = tall ? RadialMethod::neumann_eta0 : RadialMethod::legendre_traditional;
      none.below_target = true;
      out.push_back(none);
      continue;
    }
    best.accuracy_digits = std::clamp(best_w, 0, kNdec);
    best.below_target = best_w < minacc;
    out.push_back(best);
  }
  return out;
}

AccuracyReport accuracy_report(const RadialResult& r1, const RadialResult& r2, double c,
                               double xi) {
  AccuracyReport report;
  report.wronskian_digits = wronskian_accuracy(r1.r, r1.dr_dxi, r2.r, r2.dr_dxi, c, xi);
  report.subtraction_error = r2.subtraction_error;
  report.terms_used = r2.terms_used;
  report.terms_available = r2.terms_available;
  report.method = r2.method;
  report.below_target = r2.below_target;
  return report;
}

}  // namespace oblate
