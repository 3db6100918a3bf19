#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "krein/errors.hpp"
#include "krein/numerics.hpp"
#include "oracles.hpp"

using namespace krein;

namespace {

double residual_ratio(const CMatrix& a, const CVector& x, const CVector& b) {
  return (a * x - b).norm() / (spectral_norm(a) * x.norm() + b.norm());
}

CMatrix well_conditioned(std::mt19937_64& rng, Index n) {
  return oracle::random_matrix(rng, n, n) + 3.0 * std::sqrt(static_cast<double>(n)) * CMatrix::Identity(n, n);
}

}  // namespace

TEST_CASE("solve_linear small exact cases") {
  CVector b(3);
  b << 1.0, kI, -2.0;
  CHECK((solve_linear(CMatrix::Identity(3, 3), b) - b).norm() == 0.0);

  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = 4.0;
  CVector rhs(2);
  rhs << 2.0, 4.0;
  const CVector x = solve_linear(d, rhs);
  CHECK(std::abs(x(0) - 1.0) < 1e-15);
  CHECK(std::abs(x(1) - 1.0) < 1e-15);
}

TEST_CASE("solve_linear residual bound on random systems") {
  std::mt19937_64 rng(11);
  const CMatrix a = oracle::random_matrix(rng, 50, 50);
  const CVector b = oracle::random_vector(rng, 50);
  CHECK(residual_ratio(a, solve_linear(a, b), b) <= 1e-10);

  int checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Index n = trial < 990 ? 1 + trial % 40 : 50 * (trial - 989);
    const CMatrix m = well_conditioned(rng, n);
    const CVector rhs = oracle::random_vector(rng, n);
    if (residual_ratio(m, solve_linear(m, rhs), rhs) <= 1e-10) ++checked;
  }
  CHECK(checked == 1000);
}

TEST_CASE("solve_linear reports singular matrices") {
  CMatrix a = CMatrix::Zero(2, 2);
  a(0, 0) = 1.0;
  a(0, 1) = 2.0;
  a(1, 0) = 2.0;
  a(1, 1) = 4.0;
  try {
    solve_linear(a, CVector(CVector::Ones(2)));
    FAIL("expected SingularMatrix");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SingularMatrix);
  }
}

TEST_CASE("eig_dense small cases") {
  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = Complex(2.0, 1.0);
  const CVector ev = eig_dense(d);
  CHECK(oracle::matched_distance({ev(0), ev(1)}, {1.0, Complex(2.0, 1.0)}) < 1e-14);

  CMatrix nil = CMatrix::Zero(2, 2);
  nil(0, 1) = 1.0;
  const CVector zero = eig_dense(nil);
  CHECK(std::abs(zero(0)) < 1e-14);
  CHECK(std::abs(zero(1)) < 1e-14);
}

TEST_CASE("eig_dense agrees with characteristic polynomial roots") {
  std::mt19937_64 rng(5);
  const CMatrix a = oracle::random_matrix(rng, 20, 20);
  const CVector ev = eig_dense(a);
  const std::vector<Complex> ours(ev.data(), ev.data() + ev.size());
  CHECK(oracle::matched_distance(ours, oracle::charpoly_eigenvalues(a)) <= 1e-7);
}

TEST_CASE("eig_dense pairs and trace") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    const Index n = 5 + 7 * trial;
    const CMatrix a = oracle::random_matrix(rng, n, n);
    const EigenPairs pairs = eig_dense_vectors(a);
    const double scale = spectral_norm(a);
    for (Index j = 0; j < n; ++j) {
      const CVector v = pairs.vectors.col(j).normalized();
      CHECK((a * v - pairs.values(j) * v).norm() <= 1e-8 * scale);
    }
    CHECK(std::abs(pairs.values.sum() - a.trace()) <= 1e-8 * scale * static_cast<double>(n));
  }
}

TEST_CASE("smallest_singular_value") {
  CHECK(std::abs(smallest_singular_value(CMatrix::Identity(2, 2)) - 1.0) < 1e-15);
  CMatrix r = CMatrix::Zero(2, 2);
  r(0, 0) = 1.0;
  CHECK(smallest_singular_value(r) == doctest::Approx(0.0));

  std::mt19937_64 rng(7);
  const CMatrix a = oracle::random_matrix(rng, 10, 10);
  const double ours = smallest_singular_value(a);
  CHECK(std::abs(ours - oracle::sigma_min_gram(a)) <= 1e-9 * std::max(1.0, ours));

  // rank deficient by construction: last column is a combination of two others
  CMatrix b = oracle::random_matrix(rng, 12, 12);
  b.col(11) = 0.5 * b.col(0) - Complex(0.0, 2.0) * b.col(3);
  CHECK(smallest_singular_value(b) <= 1e-12 * spectral_norm(b));
}

TEST_CASE("herm_inv_sqrt") {
  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = 4.0;
  d(1, 1) = 9.0;
  const CMatrix s = herm_inv_sqrt(d);
  CHECK(std::abs(s(0, 0) - 0.5) < 1e-15);
  CHECK(std::abs(s(1, 1) - 1.0 / 3.0) < 1e-15);
  CHECK(std::abs(s(0, 1)) < 1e-15);

  CHECK((herm_inv_sqrt(CMatrix::Identity(6, 6)) - CMatrix::Identity(6, 6)).norm() < 1e-15);

  std::mt19937_64 rng(8);
  const CMatrix g = oracle::random_matrix(rng, 30, 30);
  const CMatrix a = g * g.adjoint() + CMatrix::Identity(30, 30);
  const CMatrix sa = herm_inv_sqrt(a);
  CHECK(spectral_norm(sa * a * sa - CMatrix::Identity(30, 30)) <= 1e-9);
  CHECK(spectral_norm(sa - sa.adjoint()) <= 1e-12);
  CHECK(spectral_norm(sa * a - a * sa) <= 1e-9 * spectral_norm(a) * spectral_norm(sa));

  CMatrix indefinite = CMatrix::Identity(2, 2);
  indefinite(1, 1) = -1.0;
  try {
    herm_inv_sqrt(indefinite);
    FAIL("expected NotPositiveDefinite");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotPositiveDefinite);
  }
}

TEST_CASE("fit_log_slope") {
  const std::vector<std::pair<double, double>> exact = {{1, 1}, {10, 0.1}, {100, 0.01}};
  CHECK(fit_log_slope(exact).slope == doctest::Approx(-1.0).epsilon(1e-14));

  const double c = 3.7;
  const std::vector<std::pair<double, double>> half = {{1, c}, {4, c / 2}, {16, c / 4}};
  const LogSlopeFit fit = fit_log_slope(half);
  CHECK(fit.slope == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(std::exp(fit.intercept) == doctest::Approx(c));

  // synthetic noisy half-power data with 5% multiplicative noise
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> noise(-0.05, 0.05);
  std::vector<std::pair<double, double>> noisy;
  for (int k = 0; k < 12; ++k) {
    const double x = std::pow(4.0, k);
    noisy.emplace_back(x, 2.0 * std::pow(x, -0.5) * (1.0 + noise(rng)));
  }
  const double slope = fit_log_slope(noisy).slope;
  CHECK(slope >= -0.55);
  CHECK(slope <= -0.45);

  const std::vector<std::pair<double, double>> flat = {{2, 1}, {2, 3}, {2, 5}};
  try {
    fit_log_slope(flat);
    FAIL("expected DegenerateInput");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateInput);
  }
}

TEST_CASE("complex_newton") {
  const auto r1 = complex_newton([](Complex z) { return z * z - 1.0; }, std::nullopt, 0.9, 1e-14);
  CHECK(std::abs(r1.root - 1.0) < 1e-13);
  const auto r2 = complex_newton([](Complex z) { return z * z + 1.0; },
                                 ComplexFn([](Complex z) { return 2.0 * z; }), Complex(0.0, 0.9), 1e-14);
  CHECK(std::abs(r2.root - kI) < 1e-13);
  try {
    complex_newton([](Complex z) { return std::exp(z); }, std::nullopt, 0.0, 1e-300);
    FAIL("expected NoConvergence");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NoConvergence);
  }
}

TEST_CASE("tridiagonal LU matches dense solve") {
  std::mt19937_64 rng(10);
  for (Index n : {1, 2, 3, 17, 200}) {
    const CVector sub = n > 1 ? oracle::random_vector(rng, n - 1) : CVector(0);
    const CVector sup = n > 1 ? oracle::random_vector(rng, n - 1) : CVector(0);
    const CVector diag = 0.1 * oracle::random_vector(rng, n);  // small diagonal forces row swaps
    CMatrix dense = CMatrix::Zero(n, n);
    dense.diagonal() = diag;
    for (Index i = 0; i + 1 < n; ++i) {
      dense(i + 1, i) = sub(i);
      dense(i, i + 1) = sup(i);
    }
    const CVector b = oracle::random_vector(rng, n);
    const TridiagonalLU lu(sub, diag, sup);
    const CVector x = lu.solve(b);
    CHECK((dense * x - b).norm() <= 1e-10 * (spectral_norm(dense) * x.norm() + b.norm()));
  }
}

TEST_CASE("hausdorff distance and merge") {
  const std::vector<Complex> a = {0.0, 1.0};
  const std::vector<Complex> b = {Complex(0.0, 0.5), 1.0};
  CHECK(hausdorff_distance(a, b) == doctest::Approx(0.5));
  CHECK(hausdorff_distance(std::vector<Complex>{}, std::vector<Complex>{}) == 0.0);
  CHECK(std::isinf(hausdorff_distance(a, std::vector<Complex>{})));
  const auto merged = sort_and_merge({1.0, Complex(1.0, 1e-9), -2.0}, 1e-7);
  REQUIRE(merged.size() == 2);
  CHECK(merged[0] == Complex(-2.0));
}
