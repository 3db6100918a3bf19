#include "krein/fd1d.hpp"

#include <algorithm>
#include <cmath>

#include "krein/errors.hpp"

namespace krein {

FdGrid make_fd_grid(Index n, double length) {
  if (n < 16) fail(ErrorKind::InvalidArgument, "fd1d needs at least 16 nodes");
  if (!(length > 0.0) || !std::isfinite(length)) fail(ErrorKind::InvalidArgument, "fd1d needs L > 0");
  FdGrid grid;
  grid.n = n;
  grid.length = length;
  grid.h = length / static_cast<double>(n - 2);
  grid.nodes.resize(n);
  grid.weights = Eigen::VectorXd::Constant(n, grid.h);
  for (Index j = 0; j < n; ++j) grid.nodes(j) = (static_cast<double>(j) - 0.5) * grid.h;
  grid.weights(0) = 0.0;
  grid.weights(n - 1) = 0.0;
  return grid;
}

Fd1dModel::Fd1dModel(Index n, double length, Potential1D potential)
    : grid_(make_fd_grid(n, length)), potential_(std::move(potential)) {
  const std::vector<Complex> cells = potential_.cell_averages(0.0, length, n - 2);
  v_ = Eigen::Map<const CVector>(cells.data(), static_cast<Index>(cells.size()));
  require_finite(v_, "cell-averaged potential");
  v_sup_ = v_.size() ? v_.cwiseAbs().maxCoeff() : 0.0;
  threshold_ = a_priori_threshold(v_sup_);
}

CVector Fd1dModel::apply(const CVector& f, bool tilde) const {
  const Index n = grid_.n;
  if (f.size() != n) fail(ErrorKind::InvalidArgument, "fd1d: state length mismatch");
  const double inv_h2 = 1.0 / (grid_.h * grid_.h);
  CVector out = CVector::Zero(n);
  for (Index j = 1; j + 1 < n; ++j) {
    const Complex v = tilde ? std::conj(v_(j - 1)) : v_(j - 1);
    out(j) = -(f(j - 1) - 2.0 * f(j) + f(j + 1)) * inv_h2 + v * f(j);
  }
  return out;
}

CVector Fd1dModel::apply_T(const CVector& f) const { return apply(f, false); }
CVector Fd1dModel::apply_Ttilde(const CVector& g) const { return apply(g, true); }

CVector Fd1dModel::trace0(const CVector& f) const {
  const Index n = grid_.n;
  CVector t(2);
  t(0) = (f(0) - f(1)) / grid_.h;
  t(1) = (f(n - 1) - f(n - 2)) / grid_.h;
  return t;
}

CVector Fd1dModel::trace1(const CVector& f) const {
  const Index n = grid_.n;
  CVector t(2);
  t(0) = 0.5 * (f(0) + f(1));
  t(1) = 0.5 * (f(n - 2) + f(n - 1));
  return t;
}

Complex Fd1dModel::inner(const CVector& f, const CVector& g) const {
  const Index m = grid_.n - 2;
  return grid_.h * g.segment(1, m).dot(f.segment(1, m));
}

Complex Fd1dModel::binner(const CVector& phi, const CVector& psi) const { return psi.dot(phi); }

// Rows ordered [left trace row; interior stencil rows; right trace row].
// The trace rows are scaled like the stencil: (f_0 - f_1)/h^2 = g_0/h, so
// the last pivot stays O(sqrt|lambda| h) relative to the others.
CVector Fd1dModel::solve_system(Complex lambda, bool tilde, const CVector& rhs) const {
  const Index n = grid_.n;
  const double inv_h2 = 1.0 / (grid_.h * grid_.h);
  CVector sub(n - 1), diag(n), super(n - 1);
  diag(0) = inv_h2;
  super(0) = -inv_h2;
  for (Index j = 1; j + 1 < n; ++j) {
    const Complex v = tilde ? std::conj(v_(j - 1)) : v_(j - 1);
    sub(j - 1) = -inv_h2;
    diag(j) = 2.0 * inv_h2 + v - lambda;
    super(j) = -inv_h2;
  }
  sub(n - 2) = -inv_h2;
  diag(n - 1) = inv_h2;
  const TridiagonalLU lu(std::move(sub), std::move(diag), std::move(super));
  return lu.solve(rhs);
}

CVector Fd1dModel::solve_bvp(Complex lambda, const CVector& g) const {
  if (g.size() != 2) fail(ErrorKind::InvalidArgument, "fd1d: boundary data must have length 2");
  CVector rhs = CVector::Zero(grid_.n);
  rhs(0) = g(0) / grid_.h;
  rhs(grid_.n - 1) = g(1) / grid_.h;
  return solve_system(lambda, false, rhs);
}

CVector Fd1dModel::solve_bvp_tilde(Complex mu, const CVector& g) const {
  if (g.size() != 2) fail(ErrorKind::InvalidArgument, "fd1d: boundary data must have length 2");
  CVector rhs = CVector::Zero(grid_.n);
  rhs(0) = g(0) / grid_.h;
  rhs(grid_.n - 1) = g(1) / grid_.h;
  return solve_system(mu, true, rhs);
}

CVector Fd1dModel::neumann_resolvent(Complex lambda, const CVector& f) const {
  if (f.size() != grid_.n) fail(ErrorKind::InvalidArgument, "fd1d: state length mismatch");
  CVector rhs = f;
  rhs(0) = 0.0;
  rhs(grid_.n - 1) = 0.0;
  return solve_system(lambda, false, rhs);
}

CVector Fd1dModel::neumann_resolvent_tilde(Complex mu, const CVector& f) const {
  if (f.size() != grid_.n) fail(ErrorKind::InvalidArgument, "fd1d: state length mismatch");
  CVector rhs = f;
  rhs(0) = 0.0;
  rhs(grid_.n - 1) = 0.0;
  return solve_system(mu, true, rhs);
}

namespace {

CMatrix second_difference(Index m, double h, Complex corner) {
  const double inv_h2 = 1.0 / (h * h);
  CMatrix a = CMatrix::Zero(m, m);
  for (Index i = 0; i < m; ++i) {
    a(i, i) = 2.0 * inv_h2;
    if (i > 0) a(i, i - 1) = -inv_h2;
    if (i + 1 < m) a(i, i + 1) = -inv_h2;
  }
  a(0, 0) -= corner * inv_h2;
  a(m - 1, m - 1) -= corner * inv_h2;
  return a;
}

}  // namespace

std::optional<CMatrix> Fd1dModel::hn_matrix() const { return second_difference(grid_.n - 2, grid_.h, 1.0); }

std::optional<CMatrix> Fd1dModel::v_matrix() const { return CMatrix(v_.asDiagonal()); }

CMatrix Fd1dModel::neumann_matrix() const {
  CMatrix a = second_difference(grid_.n - 2, grid_.h, 1.0);
  a.diagonal() += v_;
  return a;
}

CMatrix Fd1dModel::neumann_matrix_tilde() const {
  CMatrix a = second_difference(grid_.n - 2, grid_.h, 1.0);
  a.diagonal() += v_.conjugate();
  return a;
}

std::shared_ptr<const Fd1dModel> build_fd1d(Index n, double length, const Potential1D& potential) {
  return std::make_shared<const Fd1dModel>(n, length, potential);
}

// With u = (f_0, f_{n-1}) and w = (f_1, f_{n-2}) the traces are
// Gamma1 = (u + w)/2 and Gamma0 = (u - w)/h, so B Gamma1 = Gamma0 reads
// (I/h - B/2) u = (I/h + B/2) w.
CMatrix dense_robin_matrix(const Fd1dModel& model, const CMatrix& b) {
  if (b.rows() != 2 || b.cols() != 2) fail(ErrorKind::InvalidArgument, "fd1d boundary operator must be 2x2");
  require_finite(b, "boundary operator");
  const double h = model.grid().h;
  const Index m = model.grid().n - 2;
  const CMatrix lhs = CMatrix::Identity(2, 2) / h - 0.5 * b;
  const CMatrix rhs = CMatrix::Identity(2, 2) / h + 0.5 * b;
  if (smallest_singular_value(lhs) <= 1e-12 * std::max(1.0 / h, max_abs(b)))
    fail(ErrorKind::ConstraintSingular, "Robin constraint I/h - B/2 is singular");
  const CMatrix p = solve_linear(lhs, rhs);
  const double inv_h2 = 1.0 / (h * h);
  CMatrix a = second_difference(m, h, 0.0);
  a.diagonal() += model.cell_potential();
  a(0, 0) -= p(0, 0) * inv_h2;
  a(0, m - 1) -= p(0, 1) * inv_h2;
  a(m - 1, 0) -= p(1, 0) * inv_h2;
  a(m - 1, m - 1) -= p(1, 1) * inv_h2;
  return a;
}

CMatrix dense_dirichlet_matrix(const Fd1dModel& model) {
  const Index m = model.grid().n - 2;
  CMatrix a = second_difference(m, model.grid().h, -1.0);
  a.diagonal() += model.cell_potential();
  return a;
}

CVector interior(const Fd1dModel& model, const CVector& f) { return f.segment(1, model.grid().n - 2); }

}  // namespace krein
