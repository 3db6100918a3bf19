#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "krein/errors.hpp"
#include "krein/potential.hpp"

using namespace krein;

TEST_CASE("constant and zero potentials") {
  const auto z = Potential1D::zero();
  CHECK(z.is_zero());
  CHECK(z.cell_average(0.0, 0.1) == Complex{});
  const auto c = Potential1D::constant(Complex(2.0, -1.0));
  CHECK(c.cell_average(0.3, 0.4) == Complex(2.0, -1.0));
  CHECK(c.conjugate().value(0.5) == Complex(2.0, 1.0));
  CHECK_FALSE(c.is_real());
}

TEST_CASE("polynomial cell averages are exact integrals") {
  const auto p = Potential1D::polynomial({1.0, Complex(0.0, 2.0), 3.0});
  // average of 1 + 2i x + 3x^2 over [a, b]
  const double a = 0.2, b = 0.7;
  const Complex expected = 1.0 + Complex(0.0, 1.0) * (b * b - a * a) / (b - a) + (b * b * b - a * a * a) / (b - a);
  CHECK(std::abs(p.cell_average(a, b) - expected) < 1e-14);
  CHECK(std::abs(p.conjugate().cell_average(a, b) - std::conj(expected)) < 1e-14);
}

TEST_CASE("power singularity averages match the closed-form integral") {
  const double alpha = 0.4;
  const auto v = Potential1D::power_singularity(1.0, 0.5, alpha, 2.0);
  auto primitive = [&](double t) {  // integral of |x - 1/2|^{-alpha} from 1/2 to 1/2 + t, t >= 0
    return std::pow(t, 1.0 - alpha) / (1.0 - alpha);
  };
  // straddling cell
  const double a = 0.45, b = 0.52;
  const double exact = (primitive(0.05) + primitive(0.02)) / (b - a);
  CHECK(std::abs(v.cell_average(a, b).real() - exact) <= 1e-10 * exact);
  // cell touching the singular point
  const double exact_edge = primitive(0.01) / 0.01;
  CHECK(std::abs(v.cell_average(0.5, 0.51).real() - exact_edge) <= 1e-10 * exact_edge);
  // detached cell
  const double exact_far = (primitive(0.3) - primitive(0.2)) / 0.1;
  CHECK(std::abs(v.cell_average(0.7, 0.8).real() - exact_far) <= 1e-10 * exact_far);
}

TEST_CASE("power singularity must be integrable to the declared power") {
  try {
    Potential1D::power_singularity(1.0, 0.5, 0.6, 2.0);
    FAIL("expected InvalidPotential");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidPotential);
  }
  CHECK_NOTHROW(Potential1D::power_singularity(1.0, 0.5, 0.49, 2.0));
}

TEST_CASE("table potentials average piecewise") {
  const auto t = Potential1D::table({1.0, 3.0}, 0.0, 1.0);
  CHECK(t.cell_average(0.25, 0.75) == Complex(2.0));
  CHECK(t.value(0.9) == Complex(3.0));
  const auto cells = t.cell_averages(0.0, 1.0, 4);
  REQUIRE(cells.size() == 4);
  CHECK(cells[0] == Complex(1.0));
  CHECK(cells[3] == Complex(3.0));
}
