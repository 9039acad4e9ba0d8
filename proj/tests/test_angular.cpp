#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "oblate/angular.hpp"
#include "oblate/dcoeff.hpp"
#include "oblate/diagnostics.hpp"
#include "oblate/eigen.hpp"
#include "oblate/special.hpp"

using namespace oblate;

namespace {

double native(const ScaledReal& v) {
  const NativeResult r = to_native(v);
  REQUIRE(r.status == NativeStatus::ok);
  return r.value;
}

DCoefficients coeffs_for(int m, int l, double c) {
  const EigenTable table = eigenvalue_table(m, c, l - m + 1);
  return d_coefficients(m, l, c, table.entry[l - m].lambda);
}

}  // namespace

TEST_CASE("c = 0 reduces to the order-m Legendre function of degree l") {
  for (int m : {0, 1, 4}) {
    for (int dl : {0, 1, 5}) {
      const DCoefficients dc = coeffs_for(m, m + dl, 0.0);
      for (double eta : {-0.9, -0.5, 0.0, 0.3, 0.7}) {
        CAPTURE(m);
        CAPTURE(dl);
        CAPTURE(eta);
        const AngularResult r = angular_first_kind(dc, eta);
        const RealLegendreSet leg = legendre_p(m, eta, dl);
        CHECK(digits_of_agreement(r.s, leg.p[dl]) >= 14);
        CHECK(digits_of_agreement(r.ds_deta, leg.dp[dl]) >= 14);
      }
    }
  }
  // A hand value: P_2(1/2) = (3/4 - 1)/2 and P'_2(1/2) = 3/2.
  const DCoefficients dc = coeffs_for(0, 2, 0.0);
  const AngularResult r = angular_first_kind(dc, 0.5);
  CHECK(native(r.s) == doctest::Approx(-0.125).epsilon(1e-14));
  CHECK(native(r.ds_deta) == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(r.subtraction_error_s <= 1);
}

TEST_CASE("reflection eta -> -eta flips values by the parity class") {
  for (int m : {0, 2, 5}) {
    for (int dl : {0, 1, 3}) {
      for (double c : {2.0, 30.0}) {
        const DCoefficients dc = coeffs_for(m, m + dl, c);
        for (double eta : {0.1, 0.45, 0.8}) {
          CAPTURE(m);
          CAPTURE(dl);
          CAPTURE(c);
          CAPTURE(eta);
          const AngularResult plus = angular_first_kind(dc, eta);
          const AngularResult minus = angular_first_kind(dc, -eta);
          const bool odd = dl % 2 != 0;
          const ScaledReal s_expect = odd ? scaled_neg(plus.s) : plus.s;
          const ScaledReal ds_expect = odd ? plus.ds_deta : scaled_neg(plus.ds_deta);
          CHECK(digits_of_agreement(minus.s, s_expect) == kNdec);
          CHECK(digits_of_agreement(minus.ds_deta, ds_expect) == kNdec);
        }
      }
    }
  }
}

TEST_CASE("unit normalization integrates S^2 to one") {
  for (int m : {0, 1, 3, 200}) {
    for (double c : {0.7, 12.0}) {
      const DCoefficients dc = coeffs_for(m, m + 2, c);
      const AngularResult probe = angular_first_kind(dc, 0.3, NormScheme::unit_norm);
      // S^2 is a polynomial of degree about 2(m + top term); pad the rule.
      const int order = m + probe.terms_used + 30;
      const QuadratureRule rule = gauss_legendre_rule(order);
      long double integral = 0.0L;
      for (int i = 0; i < order; ++i) {
        const AngularResult r = angular_first_kind(dc, rule.node[i], NormScheme::unit_norm);
        // High orders pin the function against the ends of the interval and
        // its native image underflows in between; those nodes contribute
        // nothing at this tolerance.
        const NativeResult v = to_native(r.s);
        REQUIRE(v.status != NativeStatus::overflow);
        integral += static_cast<long double>(rule.weight[i]) * v.value * v.value;
      }
      CAPTURE(m);
      CAPTURE(c);
      CHECK(std::fabs(static_cast<double>(integral) - 1.0) < 1e-10);
    }
  }
}

TEST_CASE("derivative agrees with a central difference in the interior") {
  const double h = 1e-6;
  for (int m : {0, 1, 2, 5}) {
    for (int dl : {0, 3}) {
      for (double c : {1.0, 20.0}) {
        const DCoefficients dc = coeffs_for(m, m + dl, c);
        for (double eta : {0.25, 0.6}) {
          CAPTURE(m);
          CAPTURE(dl);
          CAPTURE(c);
          CAPTURE(eta);
          const AngularResult mid = angular_first_kind(dc, eta);
          const AngularResult fwd = angular_first_kind(dc, eta + h);
          const AngularResult bwd = angular_first_kind(dc, eta - h);
          const double fd = (native(fwd.s) - native(bwd.s)) / (2.0 * h);
          CHECK(digits_of_agreement(native(mid.ds_deta), fd) >= 6);
        }
      }
    }
  }
}

TEST_CASE("endpoint limits depend on the order") {
  SUBCASE("order 0: finite closed values at both ends") {
    // At c = 0 the function is P_l, so S(1) = 1 and S'(1) = l(l+1)/2.
    for (int l : {0, 1, 2, 5}) {
      const DCoefficients dc = coeffs_for(0, l, 0.0);
      const AngularResult plus = angular_first_kind(dc, 1.0);
      const AngularResult minus = angular_first_kind(dc, -1.0);
      CAPTURE(l);
      CHECK(native(plus.s) == doctest::Approx(1.0).epsilon(1e-13));
      CHECK(native(plus.ds_deta) == doctest::Approx(0.5 * l * (l + 1)).epsilon(1e-13));
      const double sign = l % 2 == 0 ? 1.0 : -1.0;
      CHECK(native(minus.s) == doctest::Approx(sign).epsilon(1e-13));
      if (l > 0) {
        CHECK(native(minus.ds_deta) ==
              doctest::Approx(-sign * 0.5 * l * (l + 1)).epsilon(1e-13));
      }
    }
    // c > 0: the endpoint value continues the interior function.
    const DCoefficients dc = coeffs_for(0, 2, 5.0);
    const AngularResult end = angular_first_kind(dc, 1.0);
    const AngularResult near = angular_first_kind(dc, 1.0 - 1e-8);
    CHECK(digits_of_agreement(native(end.s), native(near.s)) >= 6);
  }

  SUBCASE("order 1: vanishing value, diverging derivative") {
    for (int l : {1, 2}) {
      const DCoefficients dc = coeffs_for(1, l, 0.5);
      const AngularResult plus = angular_first_kind(dc, 1.0);
      const AngularResult minus = angular_first_kind(dc, -1.0);
      CAPTURE(l);
      CHECK(is_zero(plus.s));
      CHECK(is_zero(minus.s));
      CHECK(to_native(plus.ds_deta).status == NativeStatus::overflow);
      CHECK(to_native(minus.ds_deta).status == NativeStatus::overflow);
      // Slope sign: S ~ sqrt(1 - eta^2) x (positive at +1), so the
      // derivative falls toward +1; the reflection rule fixes the other end.
      CHECK(plus.ds_deta.characteristic < 0.0);
      const double expected = l % 2 != 0 ? 1.0 : -1.0;
      CHECK(minus.ds_deta.characteristic * expected > 0.0);
    }
  }

  SUBCASE("order 2: vanishing value, finite derivative limit") {
    for (double end : {1.0, -1.0}) {
      const DCoefficients dc = coeffs_for(2, 4, 4.0);
      const AngularResult r = angular_first_kind(dc, end);
      CAPTURE(end);
      CHECK(is_zero(r.s));
      const double h = 1e-7;
      const AngularResult near = angular_first_kind(dc, end - end * h);
      const double one_sided = native(near.s) / (end * h) * -1.0;
      CHECK(digits_of_agreement(native(r.ds_deta), one_sided) >= 5);
    }
    // P^2_2 = 3(1 - eta^2) has derivative -6 eta exactly.
    const DCoefficients dc = coeffs_for(2, 2, 0.0);
    const AngularResult r = angular_first_kind(dc, 1.0);
    CHECK(native(r.ds_deta) == doctest::Approx(-6.0).epsilon(1e-13));
  }

  SUBCASE("order 3 and higher: value and derivative both vanish") {
    for (int m : {3, 7}) {
      const DCoefficients dc = coeffs_for(m, m + 1, 2.0);
      for (double end : {1.0, -1.0}) {
        const AngularResult r = angular_first_kind(dc, end);
        CHECK(is_zero(r.s));
        CHECK(is_zero(r.ds_deta));
        CHECK(r.subtraction_error_s == 0);
        CHECK(r.subtraction_error_ds == 0);
      }
    }
  }
}

TEST_CASE("eta = 0 structure: exact zeros and clean sums at modest c") {
  for (int m : {0, 2}) {
    for (int dl : {0, 1, 2, 3}) {
      for (double c : {0.5, 2.0}) {
        const DCoefficients dc = coeffs_for(m, m + dl, c);
        const AngularResult r = angular_first_kind(dc, 0.0);
        CAPTURE(m);
        CAPTURE(dl);
        CAPTURE(c);
        if (dl % 2 != 0) {
          CHECK(is_zero(r.s));
          CHECK_FALSE(is_zero(r.ds_deta));
          CHECK(r.subtraction_error_ds == 0);
        } else {
          CHECK(is_zero(r.ds_deta));
          CHECK_FALSE(is_zero(r.s));
          CHECK(r.subtraction_error_s == 0);
        }
      }
    }
  }
}

TEST_CASE("subtraction error trends across the parameter plane") {
  SUBCASE("non-increasing in l - m below the turning range") {
    // c = 60 puts the oscillatory zone out to about n = 38.
    const double c = 60.0;
    const EigenTable table = eigenvalue_table(0, c, 40);
    int prev = kNdec;
    for (int l = 0; l <= 30; l += 5) {
      const DCoefficients dc = d_coefficients(0, l, c, table.entry[l].lambda);
      const AngularResult r = angular_first_kind(dc, 0.5);
      CAPTURE(l);
      CHECK(r.subtraction_error_s <= prev);
      prev = r.subtraction_error_s;
    }
    CHECK(prev <= 1);  // essentially clean by the turning range
  }

  SUBCASE("non-increasing in m at the lowest degree") {
    const double c = 60.0;
    int prev = kNdec;
    for (int m : {0, 10, 30, 50}) {
      const DCoefficients dc = coeffs_for(m, m, c);
      const AngularResult r = angular_first_kind(dc, 0.0);
      CAPTURE(m);
      CHECK(r.subtraction_error_s <= prev);
      prev = r.subtraction_error_s;
    }
    CHECK(prev == 0);
  }

  SUBCASE("non-decreasing in c at the lowest degree") {
    int prev = 0;
    for (double c : {1.0, 5.0, 20.0, 60.0}) {
      const DCoefficients dc = coeffs_for(0, 0, c);
      const AngularResult r = angular_first_kind(dc, 0.0);
      CAPTURE(c);
      CHECK(r.subtraction_error_s >= prev);
      prev = r.subtraction_error_s;
    }
    CHECK(prev == kNdec);  // total cancellation by c = 60
  }
}

TEST_CASE("series truncation and argument validation") {
  const DCoefficients dc = coeffs_for(0, 0, 2.0);
  const AngularResult r = angular_first_kind(dc, 0.37);
  // The stored coefficient range is hundreds long; the series must stop on
  // its own long before that.
  CHECK(dc.n_max >= 300);
  CHECK(r.terms_used < 60);
  CHECK(r.terms_used >= 5);

  CHECK_THROWS_AS((void)angular_first_kind(dc, 1.0000001), std::invalid_argument);
  CHECK_THROWS_AS((void)angular_first_kind(dc, -1.1), std::invalid_argument);
  CHECK_THROWS_AS((void)angular_first_kind(dc, std::nan("")), std::invalid_argument);
  const DCoefficients empty;
  CHECK_THROWS_AS((void)angular_first_kind(empty, 0.5), std::invalid_argument);
}
