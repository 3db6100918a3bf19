#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "krein/disk.hpp"
#include "krein/errors.hpp"
#include "krein/robin.hpp"
#include "krein/sectorial.hpp"
#include "oracles.hpp"

using namespace krein;

namespace {

const DiskModel& interior_model() {
  static const auto model = build_disk(DiskModelConfig{});
  return *model;
}

const DiskModel& exterior_model() {
  static const auto model = [] {
    DiskModelConfig c;
    c.side = DiskSide::Exterior;
    return build_disk(c);
  }();
  return *model;
}

Potential1D radial_potential() {
  return Potential1D::smooth([](double r) { return Complex(0.4 + 0.2 * r * r, 0.3 * std::cos(r)); }, "radial");
}

// supported in [1, 3), vanishing to sixth order at r = 3
Potential1D exterior_bump() {
  return Potential1D::smooth(
      [](double r) {
        if (r >= 3.0) return Complex{};
        const double w = std::pow(0.5 * (3.0 - r), 6);
        return Complex(0.8 * w, -0.5 * w);
      },
      "bump");
}

const DiskModel& interior_potential_model() {
  static const auto model = [] {
    DiskModelConfig c;
    c.k_max = 4;
    c.radial_potential = radial_potential();
    return build_disk(c);
  }();
  return *model;
}

const DiskModel& exterior_potential_model() {
  static const auto model = [] {
    DiskModelConfig c;
    c.side = DiskSide::Exterior;
    c.k_max = 4;
    c.r_cut = 3.0;
    c.radial_potential = exterior_bump();
    return build_disk(c);
  }();
  return *model;
}

double fitted_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST_CASE("interior mode 0 at lambda = -1") {
  const double expected = oracle::bessel_i_series(0, 1.0) / oracle::bessel_i_series(1, 1.0);
  const Complex m0 = interior_model().mode_weyl(0, -1.0);
  CHECK(std::abs(m0 - expected) <= 1e-13);
  CHECK(std::abs(m0.real() - 2.240) <= 1e-3);
}

TEST_CASE("interior mode values against the series oracle") {
  for (int k : {1, 3, 6}) {
    for (double s : {0.7, 2.5, 5.0}) {
      // I_k'(s) = I_{k-1}(s) - (k/s) I_k(s)
      const double ik = oracle::bessel_i_series(k, s, 60);
      const double d = oracle::bessel_i_series(k - 1, s, 60) - k / s * ik;
      CHECK(std::abs(interior_model().mode_weyl(k, -s * s) - ik / (s * d)) <= 1e-12 * ik / (s * d));
    }
  }
}

TEST_CASE("exterior mode 0 approaches 1/s") {
  double prev = INFINITY;
  for (double s : {10.0, 100.0, 1000.0, 1e4}) {
    const double err = std::abs(exterior_model().mode_weyl(0, -s * s) * s - 1.0);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev <= 1e-4);
}

TEST_CASE("mode values are real and positive on the certified half line") {
  for (double lambda : {-0.6, -3.0, -50.0, -1e4}) {
    const CMatrix mi = interior_model().weyl_matrix(lambda);
    const CMatrix me = exterior_model().weyl_matrix(lambda);
    for (Index i = 0; i < mi.rows(); ++i) {
      CHECK(mi(i, i).imag() == doctest::Approx(0.0));
      CHECK(mi(i, i).real() > 0.0);
      CHECK(me(i, i).imag() == doctest::Approx(0.0));
      CHECK(me(i, i).real() > 0.0);
    }
    CHECK(max_abs(mi - CMatrix(mi.diagonal().asDiagonal())) == 0.0);
  }
}

TEST_CASE("exterior Neumann trace sign") {
  // With Gamma0 = -u_r(1), the Green identity on (1, inf) for decaying modes
  // holds; the opposite sign leaves a defect of twice the boundary term.
  const DiskModel& model = exterior_model();
  std::mt19937_64 rng(3);
  const CVector f = model.random_state(rng), g = model.random_state(rng);
  CHECK(green_defect(model, f, g) <= 1e-9 * green_scale(model, f, g));
  const Complex lhs = model.inner(model.apply_T(f), g) - model.inner(f, model.apply_Ttilde(g));
  const CVector t0f = model.trace0(f), t0g = model.trace0(g);
  const Complex flipped = model.binner(model.trace1(f), -t0g) - model.binner(-t0f, model.trace1(g));
  CHECK(std::abs(lhs - flipped) >= 1e-3 * std::abs(lhs));
  // the gamma field decays: m0 = K0/(-s K0') > 0
  CHECK(model.mode_weyl(0, -4.0).real() > 0.0);
}

TEST_CASE("difference identity and symmetry") {
  for (const DiskModel* model : {&interior_model(), &exterior_model(), &interior_potential_model(),
                                 &exterior_potential_model()}) {
    INFO(model->name() << " potential=" << model->config().radial_potential.has_value());
    const double xi = model->certified_threshold();
    const SpectralPoint a = SpectralPoint::at(*model, std::min(-3.0, xi - 1.0));
    const SpectralPoint b = SpectralPoint::at(*model, std::min(-7.0, xi - 5.0));
    CHECK(difference_identity_defect(*model, a, b) <= 1e-9);
    CHECK(difference_identity_defect(*model, a, a) <= 1e-9);
    CHECK(weyl_symmetry_defect(*model, a) <= 1e-9);
    const SpectralPoint c = SpectralPoint::unchecked(*model, Complex(-4.0, 3.0));
    CHECK(weyl_symmetry_defect(*model, c) <= 1e-9);
    CHECK(difference_identity_defect(*model, c, b) <= 1e-9);
    std::mt19937_64 rng(5);
    const CVector g = oracle::random_vector(rng, model->boundary_dim());
    CHECK(gamma_resolvent_identity_defect(*model, a, b, g) <= 1e-8);
  }
}

TEST_CASE("Green identity on smooth truncated-mode states") {
  for (const DiskModel* model : {&interior_model(), &exterior_model(), &interior_potential_model()}) {
    INFO(model->name());
    std::mt19937_64 rng(7);
    for (int i = 0; i < 10; ++i) {
      const CVector f = model->random_state(rng), g = model->random_state(rng);
      CHECK(green_defect(*model, f, g) <= 1e-8 * green_scale(*model, f, g));
    }
  }
}

TEST_CASE("gamma field solves the mode equation") {
  const DiskModel& model = interior_potential_model();
  std::mt19937_64 rng(9);
  const CVector g = oracle::random_vector(rng, model.boundary_dim());
  const SpectralPoint l = SpectralPoint::at(model, -5.0);
  const CVector u = gamma(model, l, g);
  CHECK((model.trace0(u) - g).norm() <= 1e-8 * g.norm());
  CHECK(model.norm(model.apply_T(u) + 5.0 * u) <= 1e-8 * model.norm(u));
}

TEST_CASE("radial shooting agrees with the closed form at V = 0") {
  DiskModelConfig c;
  c.k_max = 3;
  c.radial_potential = Potential1D::smooth([](double) { return Complex{}; }, "zero-fn");
  const auto in = build_disk(c);
  c.side = DiskSide::Exterior;
  const auto out = build_disk(c);
  for (int k = 0; k <= 3; ++k)
    for (double lambda : {-1.0, -20.0}) {
      CHECK(std::abs(in->mode_weyl(k, lambda) - interior_model().mode_weyl(k, lambda)) <= 1e-9);
      CHECK(std::abs(out->mode_weyl(k, lambda) - exterior_model().mode_weyl(k, lambda)) <= 1e-9);
    }
}

TEST_CASE("mode decay exponents") {
  std::vector<double> x;
  for (int j = 2; j <= 9; ++j) x.push_back(std::log(std::pow(4.0, j)));
  for (int k = 0; k <= 8; ++k) {
    std::vector<double> yi, ye, oi, oe;
    for (int j = 2; j <= 9; ++j) {
      const double s = std::pow(2.0, j);
      yi.push_back(std::log(std::abs(interior_model().mode_weyl(k, -s * s))));
      ye.push_back(std::log(std::abs(exterior_model().mode_weyl(k, -s * s))));
      long double di = 0.0L;
      const long double iv = oracle::bessel_i_positive_series(k, s, di);
      oi.push_back(std::log(static_cast<double>(iv / (s * di))));
      double dk = 0.0;
      const double kv = oracle::bessel_k_integral(k, s, dk);
      oe.push_back(std::log(kv / (-s * dk)));
    }
    const double si = fitted_slope(x, yi), se = fitted_slope(x, ye);
    INFO("k=" << k << " interior " << si << " exterior " << se);
    CHECK(std::abs(si - fitted_slope(x, oi)) <= 1e-9);
    CHECK(std::abs(se - fitted_slope(x, oe)) <= 1e-9);
    CHECK(si <= -0.42);
    CHECK(se <= -0.42);
    // From k = 7 on the exact slope over |lambda| in [16, 4^9] lies above
    // -0.45 (m_k stays near 1/k until s passes k); the band holds below that.
    if (k <= 6) {
      CHECK(si >= -0.55);
      CHECK(si <= -0.45);
      CHECK(se >= -0.55);
      CHECK(se <= -0.45);
    }
  }
  std::vector<double> lambdas;
  for (int j = 2; j <= 9; ++j) lambdas.push_back(-std::pow(4.0, j));
  for (const DiskModel* model : {&interior_model(), &exterior_model()}) {
    const DecayStudy study = weyl_decay_study(*model, lambdas);
    CHECK(study.exponent >= -0.55);
    CHECK(study.exponent <= -0.45);
  }
}

TEST_CASE("Robin reference values") {
  CHECK(std::abs(disk_robin_reference(1, 0.0) - 3.3899) <= 1e-3);
  const double x1 = oracle::first_root(
      [](double x) {
        // J_1'(x) = J_0(x) - J_1(x)/x
        return oracle::bessel_j_series(0, x, 80) - oracle::bessel_j_series(1, x, 80) / x;
      },
      0.5, 0.01, 10.0);
  CHECK(std::abs(disk_robin_reference(1, 0.0) - x1 * x1) <= 1e-10);
  const double j01 = oracle::first_root([](double x) { return oracle::bessel_j_series(0, x, 80); }, 0.5, 0.01, 10.0);
  CHECK(std::abs(disk_robin_reference(0, -1e6) - j01 * j01) <= 1e-2);
  CHECK(std::abs(j01 * j01 - 5.78) <= 1e-2);
  CHECK_THROWS_AS(disk_robin_reference(0, NAN), Error);
}

TEST_CASE("robin_eigs reproduces the Bessel roots") {
  DiskModelConfig c;
  c.k_max = 4;
  const auto model = build_disk(c);
  for (double beta : {-1.0, 0.5, 1.0, 3.0}) {
    std::vector<double> refs;
    for (int k = 0; k <= 4; ++k) refs.push_back(disk_robin_reference(k, beta));
    const double top = *std::max_element(refs.begin(), refs.end()) + 2.0;
    const Region region{0.5, top, -2.0, 2.0};
    const RobinEigsResult res =
        robin_eigs(*model, BoundaryOperator::scalar(model->boundary_dim(), beta), region, ScanGrid{241, 9});
    for (int k = 0; k <= 4; ++k) {
      double best = INFINITY;
      for (Complex z : res.eigenvalues) best = std::min(best, std::abs(z - refs[static_cast<std::size_t>(k)]));
      INFO("beta=" << beta << " k=" << k << " ref=" << refs[static_cast<std::size_t>(k)]);
      CHECK(best <= 1e-8);
    }
  }
}

TEST_CASE("interior B = I, mode 0 root") {
  const double ref = oracle::first_root(
      [](double x) { return -x * oracle::bessel_j_series(1, x, 80) - oracle::bessel_j_series(0, x, 80); }, 1e-3, 0.01,
      10.0);
  CHECK(std::abs(disk_robin_reference(0, 1.0) - ref * ref) <= 1e-8);
}

TEST_CASE("Krein resolvent on the disk") {
  const DiskModel& model = interior_potential_model();
  std::mt19937_64 rng(15);
  const CMatrix b = 0.3 * oracle::random_matrix(rng, model.boundary_dim(), model.boundary_dim());
  const BoundaryOperator op = BoundaryOperator::from_matrix(b);
  const CVector f = model.random_state(rng);
  for (double lambda : {-3.0, -12.0}) {
    const CVector u = krein_resolvent(model, op, SpectralPoint::at(model, lambda), f);
    const RobinResidual r = robin_residual(model, op, lambda, u, f);
    CHECK(r.pde <= 1e-8);
    CHECK(r.boundary <= 1e-8);
  }
}

TEST_CASE("mode operator and config validation") {
  const ModeEntry ok[] = {{1, -1, 2.0}, {0, 0, 1.0}};
  const BoundaryOperator b = disk_mode_operator(2, ok);
  CHECK(b.matrix(3, 1) == Complex(2.0));
  CHECK(b.matrix(2, 2) == Complex(1.0));
  const ModeEntry bad[] = {{3, 0, 1.0}};
  try {
    disk_mode_operator(2, bad);
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::TruncationWarning);
  }
  DiskModelConfig c;
  c.k_max = 0;
  CHECK_THROWS_AS(build_disk(c), Error);
  c.k_max = 2;
  c.r_cut = 1.0;
  CHECK_THROWS_AS(build_disk(c), Error);
  CHECK(interior_model().hn_matrix() == std::nullopt);
  CHECK(interior_model().boundary_dim() == 33);
}

TEST_CASE("Neumann eigenvalue and essential spectrum are reported") {
  try {
    interior_model().mode_weyl(0, 0.0);
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MatchingSingular);
  }
  CHECK_THROWS_AS(exterior_model().mode_weyl(0, 2.0), Error);
  CHECK(std::abs(interior_model().mode_weyl(2, 0.0) - 0.5) <= 1e-15);
}
