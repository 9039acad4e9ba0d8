#pragma once

#include "oblate/scaled.hpp"

namespace oblate {

enum class RadialKind { first, second };

// Expansion actually used to produce a radial value.  The first-kind paths
// are the spherical Bessel expansions taken at eta = 1 (traditional), at an
// intermediate eta = cos(theta), or at eta = 0; the second-kind paths add
// the Legendre-function expansion, the Baber-Hasse recursion seeded from the
// closing row, the spherical Neumann counterparts of the three Bessel paths,
// the variational integral form, the high-degree pairing shortcut, the exact
// xi = 0 forms, and the Wronskian complement that fills the component a
// degenerate xi = 0 limit leaves undetermined.
enum class RadialMethod {
  traditional_eta1,
  variable_eta,
  eta0,
  legendre_traditional,
  baber_hasse,
  neumann_traditional,
  neumann_eta0,
  neumann_variable_eta,
  integral,
  pairing,
  xi_zero,
  wronskian_complement,
};

// One radial function value with its derivative and bookkeeping.
struct RadialResult {
  ScaledReal r;
  ScaledReal dr_dxi;
  RadialKind kind = RadialKind::first;
  RadialMethod method = RadialMethod::traditional_eta1;
  double eta_used = 1.0;       // in [0, 1]; exactly 1 for traditional_eta1
  int accuracy_digits = 0;     // estimated correct digits, in [0, kNdec]
  int subtraction_error = 0;   // worst cancellation among the sums involved
  int terms_used = 0;
  int terms_available = 0;
  bool below_target = false;   // set by the dispatcher when no method reached
                               // the requested accuracy
};

// Diagnostic record for one computed pair, as written to the report files.
struct AccuracyReport {
  int wronskian_digits = 0;    // in [0, kNdec]
  int subtraction_error = 0;
  int terms_used = 0;
  int terms_available = 0;
  RadialMethod method = RadialMethod::traditional_eta1;
  bool below_target = false;
};

// Short lower-case tag for report files ("traditional", "pairing", ...).
const char* radial_method_name(RadialMethod method);

}  // namespace oblate
