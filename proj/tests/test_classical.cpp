#include <cmath>
#include <doctest.h>

#include "core/classical.hpp"
#include "core/stats.hpp"

using namespace qpinem;

TEST_CASE("bessel_jn basics") {
  CHECK(bessel_jn(0, 0.0) == 1.0);
  CHECK(bessel_jn(3, 0.0) == 0.0);
  CHECK(bessel_jn(-3, 0.0) == 0.0);
  // reflection identities
  CHECK(bessel_jn(-4, 2.5) == doctest::Approx(bessel_jn(4, 2.5)).epsilon(1e-14));
  CHECK(bessel_jn(-3, 2.5) == doctest::Approx(-bessel_jn(3, 2.5)).epsilon(1e-14));
  CHECK(bessel_jn(3, -2.5) == doctest::Approx(-bessel_jn(3, 2.5)).epsilon(1e-14));
}

TEST_CASE("bessel_jn against the standard library implementation") {
  for (double x : {0.05, 0.4, 1.0, 2.0, 2.7, 4.5, 9.0, 12.0, 20.0}) {
    for (int n = 0; n <= 40; ++n) {
      double mine = bessel_jn(n, x);
      double ref = std::cyl_bessel_j(static_cast<double>(n), x);
      CHECK(std::abs(mine - ref) < 1e-12);
    }
  }
  // high orders stay accurate
  CHECK(bessel_jn(100, 12.0) ==
        doctest::Approx(std::cyl_bessel_j(100.0, 12.0)).epsilon(1e-10));
  CHECK(bessel_jn(60, 2.0) == doctest::Approx(std::cyl_bessel_j(60.0, 2.0)).epsilon(1e-10));
}

TEST_CASE("bessel sum rule: sum_j J_j(x)^2 = 1") {
  for (double script_g : {0.3, 1.0, 2.25, 4.5, 6.0}) {
    double x = 2.0 * script_g;
    KahanSum total;
    int window = static_cast<int>(x) + 30;
    for (int j = -window; j <= window; ++j) {
      double v = bessel_jn(j, x);
      total.add(v * v);
    }
    CHECK(total.value() == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("classical amplitude at zero coupling is a delta") {
  ClassicalCoupling cc{{Complex(0, 0), Complex(0, 0)}};
  CHECK(classical_amplitude(cc, 0, 0) == Complex(1.0, 0.0));
  CHECK(classical_amplitude(cc, 1, 0) == Complex(0.0, 0.0));
  CHECK(classical_amplitude(cc, 0, -2) == Complex(0.0, 0.0));
}

TEST_CASE("classical amplitude carries the coupling phases") {
  ClassicalCoupling cc{{std::polar(1.3, 0.5), std::polar(0.9, -1.2)}};
  Complex a = classical_amplitude(cc, 2, -3);
  double expected_arg = 2 * 0.5 + (-3) * (-1.2);
  Complex expected =
      std::polar(1.0, expected_arg) * bessel_jn(2, 2.6) * bessel_jn(-3, 1.8);
  CHECK(std::abs(a - expected) < 1e-12);
}

TEST_CASE("classical joint factorizes: PCC is zero for any couplings") {
  ClassicalCoupling cc{{Complex(4.5, 0), Complex(4.5, 0)}};
  JointDistribution d = classical_joint(cc, -30, 30, -30, 30);
  CHECK(d.total_mass == doctest::Approx(1.0).epsilon(1e-10));
  PccResult r = pcc(d, "e1", "e2");
  CHECK(r.defined);
  CHECK(std::abs(r.value) < 1e-12);
}

TEST_CASE("classical limit distance vanishes against itself") {
  ClassicalCoupling cc{{Complex(1.0, 0), Complex(0.5, 0)}};
  JointDistribution d = classical_joint(cc, -12, 12, -12, 12);
  CHECK(classical_limit_distance(d, cc) < 1e-12);
}

TEST_CASE("classical limit distance sees a genuinely different table") {
  ClassicalCoupling cc{{Complex(1.0, 0), Complex(1.0, 0)}};
  JointDistribution d = classical_joint(cc, -12, 12, -12, 12);
  ClassicalCoupling other{{Complex(0, 0), Complex(0, 0)}};
  double dist = classical_limit_distance(d, other);
  CHECK(dist > 0.5);  // delta vs a broad product table
  CHECK(dist <= 1.0);
}
