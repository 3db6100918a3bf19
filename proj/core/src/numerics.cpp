#include "krein/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "krein/errors.hpp"

namespace krein {

namespace {

constexpr Index kMaxEigDimension = 4000;
constexpr double kPivotTolerance = 1e-14;

}  // namespace

bool all_finite(const CMatrix& a) {
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i)
      if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag())) return false;
  return true;
}

bool all_finite(const CVector& v) {
  for (Index i = 0; i < v.size(); ++i)
    if (!std::isfinite(v(i).real()) || !std::isfinite(v(i).imag())) return false;
  return true;
}

void require_finite(const CMatrix& a, std::string_view what) {
  if (!all_finite(a)) fail(ErrorKind::InvalidArgument, std::string(what) + " has non-finite entries");
}

void require_finite(const CVector& v, std::string_view what) {
  if (!all_finite(v)) fail(ErrorKind::InvalidArgument, std::string(what) + " has non-finite entries");
}

double max_abs(const CMatrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

namespace {

Eigen::PartialPivLU<CMatrix> factor_checked(const CMatrix& a) {
  if (a.rows() != a.cols()) fail(ErrorKind::InvalidArgument, "solve_linear: matrix is not square");
  require_finite(a, "solve_linear matrix");
  Eigen::PartialPivLU<CMatrix> lu(a);
  const double scale = max_abs(a);
  const auto& packed = lu.matrixLU();
  for (Index i = 0; i < packed.rows(); ++i) {
    if (std::abs(packed(i, i)) < kPivotTolerance * scale || scale == 0.0)
      fail(ErrorKind::SingularMatrix,
           "pivot " + std::to_string(std::abs(packed(i, i))) + " at row " + std::to_string(i));
  }
  return lu;
}

}  // namespace

CVector solve_linear(const CMatrix& a, const CVector& b) {
  if (b.size() != a.rows()) fail(ErrorKind::InvalidArgument, "solve_linear: rhs length mismatch");
  return factor_checked(a).solve(b);
}

CMatrix solve_linear(const CMatrix& a, const CMatrix& b) {
  if (b.rows() != a.rows()) fail(ErrorKind::InvalidArgument, "solve_linear: rhs rows mismatch");
  return factor_checked(a).solve(b);
}

CVector eig_dense(const CMatrix& a) {
  if (a.rows() != a.cols()) fail(ErrorKind::InvalidArgument, "eig_dense: matrix is not square");
  if (a.rows() > kMaxEigDimension) fail(ErrorKind::InvalidArgument, "eig_dense: dimension above 4000");
  require_finite(a, "eig_dense matrix");
  if (a.rows() == 0) return CVector{};
  Eigen::ComplexEigenSolver<CMatrix> solver(a, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) fail(ErrorKind::NoConvergence, "eig_dense: QR iteration cap reached");
  return solver.eigenvalues();
}

EigenPairs eig_dense_vectors(const CMatrix& a) {
  if (a.rows() != a.cols()) fail(ErrorKind::InvalidArgument, "eig_dense: matrix is not square");
  if (a.rows() > kMaxEigDimension) fail(ErrorKind::InvalidArgument, "eig_dense: dimension above 4000");
  require_finite(a, "eig_dense matrix");
  Eigen::ComplexEigenSolver<CMatrix> solver(a, /*computeEigenvectors=*/true);
  if (solver.info() != Eigen::Success) fail(ErrorKind::NoConvergence, "eig_dense: QR iteration cap reached");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

namespace {

Eigen::VectorXd singular_values(const CMatrix& a) {
  if (a.rows() <= 64 && a.cols() <= 64) {
    Eigen::JacobiSVD<CMatrix> svd(a);
    return svd.singularValues();
  }
  Eigen::BDCSVD<CMatrix> svd(a);
  return svd.singularValues();
}

}  // namespace

double smallest_singular_value(const CMatrix& a) {
  if (a.size() == 0) fail(ErrorKind::InvalidArgument, "smallest_singular_value: empty matrix");
  return singular_values(a).minCoeff();
}

double spectral_norm(const CMatrix& a) {
  if (a.size() == 0) return 0.0;
  return singular_values(a).maxCoeff();
}

CMatrix herm_inv_sqrt(const CMatrix& a) {
  if (a.rows() != a.cols()) fail(ErrorKind::InvalidArgument, "herm_inv_sqrt: matrix is not square");
  require_finite(a, "herm_inv_sqrt matrix");
  const double scale = std::max(max_abs(a), std::numeric_limits<double>::min());
  if (max_abs(a - a.adjoint()) > 1e-10 * scale)
    fail(ErrorKind::InvalidArgument, "herm_inv_sqrt: matrix is not Hermitian");
  const CMatrix herm = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(herm);
  if (solver.info() != Eigen::Success) fail(ErrorKind::NoConvergence, "herm_inv_sqrt: eigensolver failed");
  const Eigen::VectorXd& mu = solver.eigenvalues();
  if (mu.size() > 0 && mu.minCoeff() <= 0.0)
    fail(ErrorKind::NotPositiveDefinite,
         "herm_inv_sqrt: minimum eigenvalue " + std::to_string(mu.minCoeff()));
  const Eigen::VectorXd d = mu.cwiseSqrt().cwiseInverse();
  const CMatrix& u = solver.eigenvectors();
  return u * d.cast<Complex>().asDiagonal() * u.adjoint();
}

LogSlopeFit fit_log_slope(std::span<const std::pair<double, double>> points) {
  if (points.size() < 3) fail(ErrorKind::DegenerateInput, "fit_log_slope: need at least 3 points");
  std::vector<double> lx, ly;
  lx.reserve(points.size());
  ly.reserve(points.size());
  for (const auto& [x, y] : points) {
    if (!(x > 0.0) || !(y > 0.0)) fail(ErrorKind::DegenerateInput, "fit_log_slope: points must be positive");
    lx.push_back(std::log(x));
    ly.push_back(std::log(y));
  }
  const double n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx <= 1e-300) fail(ErrorKind::DegenerateInput, "fit_log_slope: all x equal");
  LogSlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  fit.slope_stderr = n > 2.0 ? std::sqrt(ss / (n - 2.0) / sxx) : 0.0;
  return fit;
}

NewtonResult complex_newton(const ComplexFn& f, const std::optional<ComplexFn>& df, Complex z0,
                            double tol, int max_iterations) {
  if (!(tol > 0.0)) fail(ErrorKind::InvalidArgument, "complex_newton: tol must be positive");
  Complex z = z0;
  Complex fz = f(z);
  for (int it = 0; it <= max_iterations; ++it) {
    if (!std::isfinite(std::abs(fz))) break;
    if (std::abs(fz) <= tol) return {z, it, std::abs(fz)};
    if (it == max_iterations) break;
    Complex slope;
    if (df) {
      slope = (*df)(z);
    } else {
      const double h = 1e-6 * std::max(1.0, std::abs(z));
      slope = (f(z + h) - f(z - h)) / (2.0 * h);
    }
    if (slope == Complex{0.0, 0.0} || !std::isfinite(std::abs(slope))) break;
    z -= fz / slope;
    fz = f(z);
  }
  fail(ErrorKind::NoConvergence, "complex_newton: no root near (" + std::to_string(z0.real()) + ", " +
                                     std::to_string(z0.imag()) + ")");
}

TridiagonalLU::TridiagonalLU(CVector sub, CVector diag, CVector super)
    : dl_(std::move(sub)), d_(std::move(diag)), du_(std::move(super)) {
  const Index n = d_.size();
  if (n == 0 || dl_.size() != n - 1 || du_.size() != n - 1)
    fail(ErrorKind::InvalidArgument, "TridiagonalLU: inconsistent band lengths");
  double scale = d_.cwiseAbs().maxCoeff();
  if (n > 1) scale = std::max({scale, dl_.cwiseAbs().maxCoeff(), du_.cwiseAbs().maxCoeff()});
  du2_ = CVector::Zero(std::max<Index>(n - 2, 0));
  pivot_.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) pivot_[static_cast<std::size_t>(i)] = i;

  for (Index i = 0; i + 1 < n; ++i) {
    if (std::abs(d_(i)) >= std::abs(dl_(i))) {
      if (d_(i) != Complex{}) {
        const Complex fact = dl_(i) / d_(i);
        dl_(i) = fact;
        d_(i + 1) -= fact * du_(i);
      }
    } else {
      const Complex fact = d_(i) / dl_(i);
      d_(i) = dl_(i);
      dl_(i) = fact;
      const Complex temp = du_(i);
      du_(i) = d_(i + 1);
      d_(i + 1) = temp - fact * d_(i + 1);
      if (i + 2 < n) {
        du2_(i) = du_(i + 1);
        du_(i + 1) = -fact * du_(i + 1);
      }
      pivot_[static_cast<std::size_t>(i)] = i + 1;
    }
  }
  for (Index i = 0; i < n; ++i) {
    if (std::abs(d_(i)) < kPivotTolerance * scale || scale == 0.0)
      fail(ErrorKind::SingularMatrix, "TridiagonalLU: pivot below tolerance at row " + std::to_string(i));
  }
}

CVector TridiagonalLU::solve(const CVector& rhs) const {
  const Index n = d_.size();
  if (rhs.size() != n) fail(ErrorKind::InvalidArgument, "TridiagonalLU::solve: rhs length mismatch");
  CVector b = rhs;
  for (Index i = 0; i + 1 < n; ++i) {
    if (pivot_[static_cast<std::size_t>(i)] == i) {
      b(i + 1) -= dl_(i) * b(i);
    } else {
      const Complex temp = b(i);
      b(i) = b(i + 1);
      b(i + 1) = temp - dl_(i) * b(i);
    }
  }
  b(n - 1) /= d_(n - 1);
  if (n > 1) b(n - 2) = (b(n - 2) - du_(n - 2) * b(n - 1)) / d_(n - 2);
  for (Index i = n - 3; i >= 0; --i) b(i) = (b(i) - du_(i) * b(i + 1) - du2_(i) * b(i + 2)) / d_(i);
  return b;
}

double hausdorff_distance(std::span<const Complex> a, std::span<const Complex> b) {
  if (a.empty() && b.empty()) return 0.0;
  if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
  auto directed = [](std::span<const Complex> from, std::span<const Complex> to) {
    double worst = 0.0;
    for (const Complex& p : from) {
      double best = std::numeric_limits<double>::infinity();
      for (const Complex& q : to) best = std::min(best, std::abs(p - q));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

std::vector<Complex> sort_and_merge(std::vector<Complex> points, double radius) {
  auto less = [](const Complex& x, const Complex& y) {
    return x.real() < y.real() || (x.real() == y.real() && x.imag() < y.imag());
  };
  std::sort(points.begin(), points.end(), less);
  std::vector<Complex> merged;
  for (const Complex& p : points) {
    const bool duplicate = std::any_of(merged.begin(), merged.end(),
                                       [&](const Complex& q) { return std::abs(p - q) <= radius; });
    if (!duplicate) merged.push_back(p);
  }
  return merged;
}

}  // namespace krein
