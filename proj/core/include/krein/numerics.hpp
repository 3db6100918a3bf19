#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace krein {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Index = Eigen::Index;

inline constexpr Complex kI{0.0, 1.0};

bool all_finite(const CMatrix& a);
bool all_finite(const CVector& v);

/// Throws InvalidArgument naming `what` when `a` holds a NaN or Inf.
void require_finite(const CMatrix& a, std::string_view what);
void require_finite(const CVector& v, std::string_view what);

double max_abs(const CMatrix& a);

/// Partial-pivoted LU solve. A pivot below 1e-14 * max|A_ij| is reported
/// as SingularMatrix rather than silently producing garbage.
CVector solve_linear(const CMatrix& a, const CVector& b);
CMatrix solve_linear(const CMatrix& a, const CMatrix& b);

struct EigenPairs {
  CVector values;
  CMatrix vectors;  // column j pairs with values(j)
};

/// Eigenvalues of a dense complex matrix (complex Schur form). Dimension is
/// capped at 4000.
CVector eig_dense(const CMatrix& a);
EigenPairs eig_dense_vectors(const CMatrix& a);

double smallest_singular_value(const CMatrix& a);
double spectral_norm(const CMatrix& a);

/// S = A^{-1/2} for Hermitian positive definite A.
CMatrix herm_inv_sqrt(const CMatrix& a);

struct LogSlopeFit {
  double slope = 0.0;
  double intercept = 0.0;  // log of the prefactor
  double residual = 0.0;   // root-mean-square residual in log space
  double slope_stderr = 0.0;
};

/// Least-squares line through (log x, log y).
LogSlopeFit fit_log_slope(std::span<const std::pair<double, double>> points);

using ComplexFn = std::function<Complex(Complex)>;

struct NewtonResult {
  Complex root;
  int iterations = 0;
  double residual = 0.0;
};

/// Newton iteration for a scalar holomorphic map. Without a derivative a
/// central difference with step 1e-6 * max(1, |z|) is used. Throws
/// NoConvergence when |f(z)| <= tol is not reached within 50 iterations.
NewtonResult complex_newton(const ComplexFn& f, const std::optional<ComplexFn>& df, Complex z0,
                            double tol, int max_iterations = 50);

/// LU factorisation of a tridiagonal matrix with partial pivoting (the
/// LAPACK gttrf/gttrs scheme). Reused for several right-hand sides.
class TridiagonalLU {
 public:
  /// sub(i) = A(i+1, i), diag(i) = A(i, i), super(i) = A(i, i+1).
  TridiagonalLU(CVector sub, CVector diag, CVector super);

  CVector solve(const CVector& rhs) const;
  Index size() const { return d_.size(); }

 private:
  CVector dl_, d_, du_, du2_;
  std::vector<Index> pivot_;
};

/// Symmetric Hausdorff distance between two finite point sets in C.
/// Two empty sets are at distance 0; one empty set gives +inf.
double hausdorff_distance(std::span<const Complex> a, std::span<const Complex> b);

/// Sort by (Re, Im) and merge points closer than `radius`.
std::vector<Complex> sort_and_merge(std::vector<Complex> points, double radius);

}  // namespace krein
