#pragma once

#include <cstdint>
#include <numbers>
#include <vector>

#include "oblate/scaled.hpp"

namespace oblate {

// Order index beyond which the eigenvalue spectrum switches from the paired,
// oscillator-like regime to the Legendre-like regime.
inline double breakpoint_order(double c) { return 2.0 * c / std::numbers::pi; }

// Coefficients of the three-term recursion satisfied by the expansion
// coefficients d_n (n = l - m parity family):
//   alpha_n d_{n+2} + (beta_n - lambda) d_n + gamma_n d_{n-2} = 0.
// They are valid for negative n as well; the numerator factors vanish
// exactly where the recursion is supposed to terminate.
struct RecursionCoefficients {
  int m = 0;
  double c = 0.0;

  double alpha(std::int64_t n) const {
    const double num = -(2.0 * m + n + 2.0) * (2.0 * m + n + 1.0) * c * c;
    return num / ((2.0 * n + 2.0 * m + 3.0) * (2.0 * n + 2.0 * m + 5.0));
  }
  double beta(std::int64_t n) const {
    const double s = (static_cast<double>(n) + m) * (static_cast<double>(n) + m + 1.0);
    const double corr = (2.0 * s - 2.0 * m * m - 1.0) * c * c /
                        ((2.0 * n + 2.0 * m + 3.0) * (2.0 * n + 2.0 * m - 1.0));
    return s - corr;
  }
  double gamma(std::int64_t n) const {
    const double num = -static_cast<double>(n) * (static_cast<double>(n) - 1.0) * c * c;
    return num / ((2.0 * n + 2.0 * m - 3.0) * (2.0 * n + 2.0 * m - 1.0));
  }
};

// Symmetric tridiagonal matrix for one parity family (rows n = p, p+2, ...).
// The off-diagonal entries are sqrt(alpha_n gamma_{n+2}), which is real
// because the product is nonnegative for n >= 0.
struct TridiagonalSystem {
  std::vector<double> diag;
  std::vector<double> offdiag;  // size = diag.size() - 1
};

TridiagonalSystem build_tridiagonal(int m, double c, bool odd_family, int order);

// Eigenvalues in ascending order (implicit-shift QL, values only).
std::vector<double> solve_tridiagonal(const TridiagonalSystem& system);

// One guarded Newton run on the characteristic function of the recursion.
// The iteration refines `estimate` toward the eigenvalue for degree l; if an
// iterate leaves [lower, upper] the run reports out_of_interval so a caller
// can shrink the bracket and reseed.
struct BouwkampVerdict {
  enum class Outcome { refined, out_of_interval, no_convergence };
  Outcome outcome = Outcome::no_convergence;
  double lambda = 0.0;
  int iterations = 0;
};

BouwkampVerdict bouwkamp_refine(int m, double c, int l, double estimate, double lower,
                                double upper);

// Extended-precision polish of an already-located eigenvalue.  Runs the same
// Newton iteration without a bracket and keeps the extra mantissa digits so
// downstream recursions are not limited by double rounding of lambda.  The
// input is returned unchanged when the iteration fails or tries to move far
// enough to suggest a different root.
long double bouwkamp_polish(int m, double c, int l, long double estimate);

struct EigenvalueEntry {
  double lambda = 0.0;
  enum class Source {
    matrix,        // truncated-matrix value used as-is (refinement declined)
    refined,       // matrix seed polished by the characteristic function
    extrapolated,  // seeded by extrapolation beyond the matrix, then polished
  } source = Source::matrix;
  // For even k below the breakpoint: digits shared with the k+1 neighbor
  // (the near-degenerate pairing the radial cross-over method relies on);
  // -1 where pairing is not tracked.
  int pairing_digits = -1;
};

struct EigenTable {
  int m = 0;
  double c = 0.0;
  std::vector<EigenvalueEntry> entry;  // index k = l - m
};

// Eigenvalues for k = l - m in [0, k_max].
EigenTable eigenvalue_table(int m, double c, int k_max);

}  // namespace oblate
