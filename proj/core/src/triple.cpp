#include "krein/triple.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "krein/errors.hpp"

namespace krein {

namespace {

CVector unit(Index dim, Index j) {
  CVector e = CVector::Zero(dim);
  e(j) = 1.0;
  return e;
}

void check_boundary(const TripleModel& model, const CVector& g) {
  if (g.size() != model.boundary_dim())
    fail(ErrorKind::InvalidArgument, "boundary vector has length " + std::to_string(g.size()) +
                                         ", expected " + std::to_string(model.boundary_dim()));
  require_finite(g, "boundary data");
}

void check_state(const TripleModel& model, const CVector& f) {
  if (f.size() != model.state_dim())
    fail(ErrorKind::InvalidArgument, "state vector has length " + std::to_string(f.size()) +
                                         ", expected " + std::to_string(model.state_dim()));
  require_finite(f, "state vector");
}

// Singular model solves surface as BvpSolveFailure at this layer.
template <class Fn>
CVector guarded_solve(Fn&& fn, Complex lambda) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::SingularMatrix || e.kind() == ErrorKind::MatchingSingular) {
      std::ostringstream os;
      os << "boundary value solve at lambda = (" << lambda.real() << ", " << lambda.imag()
         << ") failed: " << e.what();
      fail(ErrorKind::BvpSolveFailure, os.str());
    }
    throw;
  }
}

}  // namespace

CMatrix TripleModel::weyl_matrix(Complex lambda) const {
  const Index d = boundary_dim();
  CMatrix m(d, d);
  for (Index j = 0; j < d; ++j) m.col(j) = trace1(solve_bvp(lambda, unit(d, j)));
  return m;
}

CMatrix TripleModel::weyl_matrix_tilde(Complex mu) const {
  const Index d = boundary_dim();
  CMatrix m(d, d);
  for (Index j = 0; j < d; ++j) m.col(j) = trace1(solve_bvp_tilde(mu, unit(d, j)));
  return m;
}

CVector TripleModel::boundary_gram() const {
  const Index d = boundary_dim();
  CVector gram(d);
  for (Index j = 0; j < d; ++j) {
    const CVector e = unit(d, j);
    gram(j) = binner(e, e);
  }
  return gram;
}

CVector TripleModel::random_state(std::mt19937_64& rng) const {
  std::normal_distribution<double> normal;
  CVector f(state_dim());
  for (Index i = 0; i < f.size(); ++i) f(i) = Complex(normal(rng), normal(rng));
  return f;
}

CVector TripleModel::random_boundary(std::mt19937_64& rng) const {
  std::normal_distribution<double> normal;
  CVector g(boundary_dim());
  for (Index i = 0; i < g.size(); ++i) g(i) = Complex(normal(rng), normal(rng));
  return g;
}

double TripleModel::norm(const CVector& f) const { return std::sqrt(std::max(0.0, inner(f, f).real())); }

double TripleModel::bnorm(const CVector& phi) const {
  return std::sqrt(std::max(0.0, binner(phi, phi).real()));
}

double a_priori_threshold(double potential_sup) { return -std::max(0.5, 2.0 * potential_sup); }

bool is_certified(const TripleModel& model, Complex lambda) {
  return lambda.imag() == 0.0 && lambda.real() < model.certified_threshold();
}

SpectralPoint SpectralPoint::at(const TripleModel& model, Complex lambda) {
  return {lambda, is_certified(model, lambda), false};
}

SpectralPoint SpectralPoint::unchecked(const TripleModel& model, Complex lambda) {
  return {lambda, is_certified(model, lambda), true};
}

void require_usable(const SpectralPoint& point, const TripleModel& model) {
  if (!std::isfinite(point.lambda.real()) || !std::isfinite(point.lambda.imag()))
    fail(ErrorKind::InvalidArgument, "spectral parameter is not finite");
  if (point.certified || point.allow_uncertified) return;
  std::ostringstream os;
  os << "lambda = (" << point.lambda.real() << ", " << point.lambda.imag()
     << ") is outside the certified region lambda < " << model.certified_threshold() << " of "
     << model.name();
  fail(ErrorKind::UncertifiedPoint, os.str());
}

BoundaryOperator BoundaryOperator::zero(Index dim) { return {CMatrix::Zero(dim, dim)}; }

BoundaryOperator BoundaryOperator::scalar(Index dim, Complex beta) {
  return {beta * CMatrix::Identity(dim, dim)};
}

BoundaryOperator BoundaryOperator::diagonal(const CVector& d) { return from_matrix(d.asDiagonal()); }

BoundaryOperator BoundaryOperator::from_matrix(CMatrix m) {
  if (m.rows() != m.cols()) fail(ErrorKind::InvalidArgument, "boundary operator must be square");
  require_finite(m, "boundary operator");
  return {std::move(m)};
}

bool BoundaryOperator::is_zero() const { return matrix.size() == 0 || max_abs(matrix) == 0.0; }

CVector gamma(const TripleModel& model, const SpectralPoint& lambda, const CVector& g) {
  require_usable(lambda, model);
  check_boundary(model, g);
  if (g.isZero(0.0)) return CVector::Zero(model.state_dim());
  return guarded_solve([&] { return model.solve_bvp(lambda.lambda, g); }, lambda.lambda);
}

CVector gamma_tilde(const TripleModel& model, const SpectralPoint& mu, const CVector& g) {
  require_usable(mu, model);
  check_boundary(model, g);
  if (g.isZero(0.0)) return CVector::Zero(model.state_dim());
  return guarded_solve([&] { return model.solve_bvp_tilde(mu.lambda, g); }, mu.lambda);
}

CVector gamma_adjoint(const TripleModel& model, const SpectralPoint& lambda, const CVector& f) {
  require_usable(lambda, model);
  check_state(model, f);
  if (f.isZero(0.0)) return CVector::Zero(model.boundary_dim());
  const Complex conj_lambda = std::conj(lambda.lambda);
  return model.trace1(
      guarded_solve([&] { return model.neumann_resolvent_tilde(conj_lambda, f); }, conj_lambda));
}

CVector gamma_tilde_adjoint(const TripleModel& model, const SpectralPoint& mu, const CVector& f) {
  require_usable(mu, model);
  check_state(model, f);
  if (f.isZero(0.0)) return CVector::Zero(model.boundary_dim());
  const Complex conj_mu = std::conj(mu.lambda);
  return model.trace1(guarded_solve([&] { return model.neumann_resolvent(conj_mu, f); }, conj_mu));
}

WeylSample weyl(const TripleModel& model, const SpectralPoint& lambda) {
  require_usable(lambda, model);
  WeylSample sample;
  sample.lambda = lambda.lambda;
  try {
    sample.m = model.weyl_matrix(lambda.lambda);
    sample.m_tilde_at_conj = model.weyl_matrix_tilde(std::conj(lambda.lambda));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::SingularMatrix || e.kind() == ErrorKind::MatchingSingular)
      fail(ErrorKind::BvpSolveFailure, std::string("Weyl function evaluation failed: ") + e.what());
    throw;
  }
  sample.norm = spectral_norm(sample.m);
  return sample;
}

double weyl_symmetry_defect(const TripleModel& model, const SpectralPoint& lambda) {
  const WeylSample s = weyl(model, lambda);
  return spectral_norm(s.m - s.m_tilde_at_conj.adjoint());
}

double difference_identity_defect(const TripleModel& model, const SpectralPoint& lambda,
                                  const SpectralPoint& mu) {
  require_usable(lambda, model);
  require_usable(mu, model);
  const Index d = model.boundary_dim();
  const CVector gram = model.boundary_gram();
  std::vector<CVector> gl, gm;
  gl.reserve(static_cast<std::size_t>(d));
  gm.reserve(static_cast<std::size_t>(d));
  CMatrix m_lambda(d, d), m_tilde_mu(d, d);
  for (Index j = 0; j < d; ++j) {
    gl.push_back(gamma(model, lambda, unit(d, j)));
    gm.push_back(gamma_tilde(model, mu, unit(d, j)));
  }
  CMatrix g(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j)
      g(i, j) = model.inner(gl[static_cast<std::size_t>(j)], gm[static_cast<std::size_t>(i)]) / gram(i);
  m_lambda = model.weyl_matrix(lambda.lambda);
  m_tilde_mu = model.weyl_matrix_tilde(mu.lambda);
  return spectral_norm(m_lambda - m_tilde_mu.adjoint() - (lambda.lambda - std::conj(mu.lambda)) * g);
}

double gamma_resolvent_identity_defect(const TripleModel& model, const SpectralPoint& lambda,
                                       const SpectralPoint& nu, const CVector& g) {
  if (lambda.lambda == nu.lambda) return 0.0;
  const CVector gl = gamma(model, lambda, g);
  const CVector gn = gamma(model, nu, g);
  const CVector r =
      guarded_solve([&] { return model.neumann_resolvent(lambda.lambda, gn); }, lambda.lambda);
  const double denom = model.norm(gl);
  if (denom == 0.0) return 0.0;
  return model.norm(gl - gn - (lambda.lambda - nu.lambda) * r) / denom;
}

double green_defect(const TripleModel& model, const CVector& f, const CVector& g) {
  check_state(model, f);
  check_state(model, g);
  const Complex lhs = model.inner(model.apply_T(f), g) - model.inner(f, model.apply_Ttilde(g));
  const Complex rhs =
      model.binner(model.trace1(f), model.trace0(g)) - model.binner(model.trace0(f), model.trace1(g));
  return std::abs(lhs - rhs);
}

double green_scale(const TripleModel& model, const CVector& f, const CVector& g) {
  auto graph_norm = [&](const CVector& x, const CVector& tx) {
    const double a = model.norm(x), b = model.norm(tx);
    const double c = model.bnorm(model.trace0(x)), d = model.bnorm(model.trace1(x));
    return std::sqrt(a * a + b * b + c * c + d * d);
  };
  return graph_norm(f, model.apply_T(f)) * graph_norm(g, model.apply_Ttilde(g));
}

}  // namespace krein
