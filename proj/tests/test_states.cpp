#include <cmath>
#include <doctest.h>

#include "core/error.hpp"
#include "core/states.hpp"

using namespace qpinem;

namespace {

// Independent oracle: Poisson pmf by direct accumulation in long double.
double poisson_pmf(double lambda, int n) {
  long double p = std::exp(static_cast<long double>(-lambda));
  for (int k = 1; k <= n; ++k) p *= static_cast<long double>(lambda) / k;
  return static_cast<double>(p);
}

}  // namespace

TEST_CASE("fock states are single spikes") {
  for (int n_i : {0, 5, 9}) {
    PhotonState st = make_fock(n_i);
    CHECK(st.prob(n_i) == 1.0);
    CHECK(st.retained_mass() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(st.truncation_deficit == 0.0);
    CHECK(st.n_cutoff >= n_i);
    CHECK(st.mean() == doctest::Approx(static_cast<double>(n_i)).epsilon(1e-15));
    CHECK(st.variance() == doctest::Approx(0.0).epsilon(1e-15));
  }
  CHECK_THROWS_AS(make_fock(-1), Error);
  CHECK_THROWS_AS(make_fock(5, 3), Error);
}

TEST_CASE("coherent state is Poissonian") {
  PhotonState vac = make_coherent(0.0);
  CHECK(vac.prob(0) == 1.0);

  PhotonState st = make_coherent(10.0);
  CHECK(st.prob(10) == doctest::Approx(poisson_pmf(10.0, 10)).epsilon(1e-12));
  CHECK(st.prob(10) == doctest::Approx(0.12511).epsilon(1e-4));
  for (int n : {0, 1, 3, 17, 25}) {
    CHECK(st.prob(n) == doctest::Approx(poisson_pmf(10.0, n)).epsilon(1e-11));
  }
  CHECK(st.truncation_deficit <= 1e-10);
  CHECK(st.mean() == doctest::Approx(10.0).epsilon(1e-6));
  CHECK(st.variance() == doctest::Approx(10.0).epsilon(1e-6));
}

TEST_CASE("coherent amplitudes carry no phase by convention") {
  PhotonState st = make_coherent(5.0);
  for (int n = 0; n <= st.n_cutoff; ++n) {
    CHECK(st.amplitudes[static_cast<std::size_t>(n)].imag() == 0.0);
    CHECK(st.amplitudes[static_cast<std::size_t>(n)].real() >= 0.0);
  }
}

TEST_CASE("thermal state is geometric") {
  PhotonState vac = make_thermal(0.0);
  CHECK(vac.prob(0) == 1.0);

  PhotonState st = make_thermal(2.0);
  CHECK(st.mixed());
  CHECK(st.prob(0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(st.prob(1) == doctest::Approx(2.0 / 9.0).epsilon(1e-15));
  CHECK(st.truncation_deficit <= 1e-10);

  PhotonState st5 = make_thermal(5.0);
  CHECK(st5.retained_mass() >= 1.0 - 1e-10);
  CHECK(st5.mean() == doctest::Approx(5.0).epsilon(1e-6));
  CHECK(st5.variance() == doctest::Approx(5.0 * 5.0 + 5.0).epsilon(1e-6));
}

TEST_CASE("explicit cutoffs that drop too much mass are rejected") {
  CHECK_THROWS_AS(make_coherent(100.0, 5), Error);
  CHECK_THROWS_AS(make_thermal(10.0, 3), Error);
  // A generous explicit cutoff is fine.
  CHECK_NOTHROW(make_coherent(4.0, 60));
}

TEST_CASE("default cutoffs hold across magnitudes") {
  for (double n_avg : {0.01, 0.5, 1.0, 9.0, 100.0, 256.0}) {
    PhotonState c = make_coherent(n_avg);
    CHECK(c.retained_mass() >= 1.0 - 1e-10);
    CHECK(c.mean() == doctest::Approx(n_avg).epsilon(1e-6));
    PhotonState t = make_thermal(n_avg);
    CHECK(t.retained_mass() >= 1.0 - 1e-10);
    CHECK(t.mean() == doctest::Approx(n_avg).epsilon(1e-6));
  }
}
