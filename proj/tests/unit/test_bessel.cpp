#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "krein/bessel.hpp"
#include "krein/errors.hpp"
#include "oracles.hpp"

using namespace krein;

namespace {

// exp(-|z|) scaled ascending series in long double, for complex z.
Complex series_i(int k, Complex z) {
  using LC = std::complex<long double>;
  const LC zz(z.real(), z.imag());
  LC term = 1.0L;
  for (int i = 1; i <= k; ++i) term *= zz / (2.0L * i);
  LC sum = 0.0L;
  for (int j = 0; j < 400; ++j) {
    sum += term;
    term *= zz * zz / (4.0L * (j + 1) * (j + 1 + k));
  }
  return {static_cast<double>(sum.real()), static_cast<double>(sum.imag())};
}

}  // namespace

TEST_CASE("I0(1) and I1(1) against an independent series") {
  const BesselPair i0 = bessel_i(0, 1.0);
  const BesselPair i1 = bessel_i(1, 1.0);
  CHECK(std::abs(i0.value - oracle::bessel_i_series(0, 1.0)) < 1e-14);
  CHECK(std::abs(i1.value - oracle::bessel_i_series(1, 1.0)) < 1e-14);
  CHECK(std::abs(i0.value.real() - 1.26607) < 1e-5);
  CHECK(std::abs(i1.value.real() - 0.56516) < 1e-5);
  CHECK(std::abs(i0.derivative - i1.value) < 1e-15);
}

TEST_CASE("Wronskian I K' - I' K = -1/z at random points") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> order(0, 16);
  std::uniform_real_distribution<double> radius(0.05, 20.0), angle(-1.5, 1.5);
  for (int trial = 0; trial < 50; ++trial) {
    const int k = order(rng);
    const Complex z = std::polar(radius(rng), angle(rng));
    const BesselEval e = bessel_eval(k, z);
    const Complex w = e.value_I * e.value_Kprime - e.value_Iprime * e.value_K;
    CHECK(std::abs(w * z + 1.0) < 1e-10);
  }
}

TEST_CASE("scaled Wronskian holds across all evaluation regimes") {
  for (double r : {0.5, 1.9, 2.1, 8.0, 29.0, 31.0, 80.0, 400.0, 2000.0}) {
    for (double theta : {0.0, 0.7, 1.4, 1.55}) {
      for (int k : {0, 1, 3, 8, 16}) {
        const Complex z = std::polar(r, theta);
        const BesselPair i = bessel_i_scaled(k, z);
        const BesselPair kk = bessel_k_scaled(k, z);
        const Complex w = i.value * kk.derivative - i.derivative * kk.value;
        INFO("r=" << r << " theta=" << theta << " k=" << k);
        CHECK(std::abs(w * z + 1.0) < 1e-10);
      }
    }
  }
}

TEST_CASE("I_k matches a long-double series in the Miller range") {
  for (double r : {3.0, 10.0, 25.0}) {
    for (double theta : {0.0, 0.8, 1.5707963267948966}) {
      for (int k : {0, 2, 7, 16}) {
        const Complex z = std::polar(r, theta);
        const Complex ref = series_i(k, z);
        const BesselPair got = bessel_i(k, z);
        // series loses relative accuracy as exp(|z|)/|I_k| grows
        const double tol = 1e-13 * std::exp(r) / std::max(1e-300, std::abs(ref)) + 1e-12;
        INFO("r=" << r << " theta=" << theta << " k=" << k);
        CHECK(std::abs(got.value - ref) <= tol * std::abs(ref));
      }
    }
  }
}

TEST_CASE("K_0 and K_1 reference values") {
  // tabulated: K0(1) = 0.42102443824070834, K1(1) = 0.60190723019723457,
  // K0(5) = 3.6910983340425942e-3, K0(40) = 8.3401037154300000e-19 (approx)
  CHECK(std::abs(bessel_k(0, 1.0).value.real() - 0.42102443824070834) < 1e-14);
  CHECK(std::abs(bessel_k(1, 1.0).value.real() - 0.60190723019723457) < 1e-14);
  CHECK(std::abs(bessel_k(0, 5.0).value.real() / 3.6910983340425942e-3 - 1.0) < 1e-13);
  CHECK(std::abs(bessel_k(0, 1.0).derivative + bessel_k(1, 1.0).value) < 1e-15);
}

TEST_CASE("small-z limits") {
  for (double x : {1e-3, 1e-5, 1e-8}) {
    CHECK(std::abs(bessel_i(0, x).value - 1.0) < 2.0 * x * x);
    CHECK(std::abs(bessel_i(1, x).value / x - 0.5) < x * x);
  }
}

TEST_CASE("I_k(ix) = i^k J_k(x)") {
  for (int k : {0, 1, 2, 5, 9}) {
    for (double x : {0.3, 2.5, 7.0, 15.0}) {
      const auto [j, dj] = bessel_j(k, x);
      CHECK(std::abs(j - oracle::bessel_j_series(k, x, 80)) < 1e-11);
      const double below = k == 0 ? -oracle::bessel_j_series(1, x, 80) : oracle::bessel_j_series(k - 1, x, 80);
      const double ref = k == 0 ? below : 0.5 * (below - oracle::bessel_j_series(k + 1, x, 80));
      CHECK(std::abs(dj - ref) < 1e-11);
    }
  }
}

TEST_CASE("reflection to Re z < 0 and negative orders") {
  const Complex z(-3.0, 1.2);
  for (int k : {0, 1, 4}) {
    const Complex ref = series_i(k, z);
    CHECK(std::abs(bessel_i(k, z).value - ref) < 1e-12 * std::abs(ref));
    CHECK(std::abs(bessel_i(-k, z).value - ref) < 1e-12 * std::abs(ref));
  }
}

TEST_CASE("overflow guard and argument checks") {
  CHECK_THROWS_AS(bessel_i(0, 701.0), Error);
  try {
    bessel_k(2, Complex(0.0, 800.0));
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::OverflowGuard);
  }
  CHECK_NOTHROW(bessel_i_scaled(3, 5000.0));
  CHECK_THROWS_AS(bessel_k(0, -1.0), Error);
  CHECK_THROWS_AS(bessel_i(0, Complex(NAN, 0.0)), Error);
}
