#pragma once

#include <cstdint>
#include <vector>

#include "oblate/scaled.hpp"

namespace oblate {

// Expansion coefficients connecting one angular function of given (m, l) to
// the associated Legendre family of order m.  Index n runs over one parity
// class, n = parity, parity + 2, ..., n_max, and the set is stored in the
// scale d_{l-m} = 1; use unit_scale()/legendre_scale() to move to a public
// normalization.
struct DCoefficients {
  int m = 0;
  int l = 0;
  double c = 0.0;
  double lambda = 0.0;
  int parity = 0;                // (l - m) % 2
  std::int64_t n_max = 0;        // highest stored index, same parity
  std::vector<ScaledReal> d;     // (n - parity)/2 -> d_n
  int match_digits = 0;          // agreement of the two recursion sweeps
  ScaledReal norm_sum;           // sum_n w_n d_n^2 in the stored scale

  bool has(std::int64_t n) const;
  const ScaledReal& at(std::int64_t n) const;

  // Multiplier putting the set into sum_n w_n d_n^2 = 1, where
  // w_n = 2 (n+2m)! / ((2n+2m+1) n!).
  ScaledReal unit_scale() const;
  // Multiplier matching the Legendre normalization
  // sum_n w_n d_n^2 = 2 (l+m)! / ((2l+1) (l-m)!).
  ScaledReal legendre_scale() const;
};

// Builds the coefficient set for the eigenvalue lambda of (m, l, c).  The
// stored range always covers the oscillatory zone plus a convergence margin;
// min_top extends it further when a series needs deeper terms.
DCoefficients d_coefficients(int m, int l, double c, double lambda,
                             std::int64_t min_top = 0);

// Continuation of the coefficient set below n = 0, used to assemble the
// second radial solution from Legendre functions of the second kind.  The
// d-chain continues down to n = -(2m) + parity in the same scale as the
// positive-index set; below the closing row a second family of coefficients
// e takes over, each multiplying a first-kind Legendre function of the
// recorded spherical degree (e[0] sits at the join, deeper terms follow).
struct LowDegreeTail {
  int parity = 0;
  std::vector<ScaledReal> d_negative;   // j -> d at n = -(2 - parity) - 2j
  std::vector<ScaledReal> e;            // second-family coefficients
  std::vector<std::int64_t> e_degree;   // spherical degree paired with e[j]
};

LowDegreeTail low_degree_tail(const DCoefficients& dc, int e_count);

}  // namespace oblate
