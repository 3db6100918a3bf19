#include "krein/sectorial.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "krein/errors.hpp"

namespace krein {

namespace {

struct MatrixPair {
  CMatrix hn;
  CMatrix v;
};

MatrixPair matrices(const TripleModel& model) {
  auto hn = model.hn_matrix();
  auto v = model.v_matrix();
  if (!hn || !v) fail(ErrorKind::InvalidArgument, model.name() + " exposes no HN/V matrices");
  return {std::move(*hn), std::move(*v)};
}

// HN = U diag(d) U^*, with V carried to the eigenbasis once: W = U^* V U.
struct SpectralCache {
  Eigen::VectorXd d;
  CMatrix w;
};

SpectralCache diagonalise(const MatrixPair& mp) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(0.5 * (mp.hn + mp.hn.adjoint()));
  if (solver.info() != Eigen::Success) fail(ErrorKind::NoConvergence, "HN eigensolve failed");
  return {solver.eigenvalues(), solver.eigenvectors().adjoint() * mp.v * solver.eigenvectors()};
}

double c1_norm_from_cache(const SpectralCache& cache, double lambda) {
  const Eigen::VectorXd s = (cache.d.array() - lambda).rsqrt().matrix();
  const CMatrix c1 = s.cast<Complex>().asDiagonal() * cache.w * s.cast<Complex>().asDiagonal();
  return spectral_norm(c1);
}

}  // namespace

SectorialFactorization sectorial_factorization(const TripleModel& model, double lambda) {
  const MatrixPair mp = matrices(model);
  const Index n = mp.hn.rows();
  const CMatrix id = CMatrix::Identity(n, n);
  const CMatrix s = herm_inv_sqrt(mp.hn - lambda * id);
  SectorialFactorization out;
  out.lambda = lambda;
  out.c1 = s * mp.v * s;
  out.c1_norm = spectral_norm(out.c1);
  const CMatrix direct = solve_linear(mp.hn + mp.v - lambda * id, id);
  const CMatrix factored = s * solve_linear(id + out.c1, s);
  out.defect = spectral_norm(direct - factored);
  out.resolvent_norm = spectral_norm(direct);
  return out;
}

double find_xi2(const TripleModel& model, double lambda_start) {
  if (!(lambda_start < 0.0)) fail(ErrorKind::InvalidArgument, "find_xi2 needs lambda_start < 0");
  const MatrixPair mp = matrices(model);
  const SpectralCache cache = diagonalise(mp);
  const double d_min = cache.d.minCoeff();
  const double w_norm = spectral_norm(cache.w);
  constexpr int kSteps = 20;
  // Walk up from the most negative point; ||C1|| <= ||V|| / (d_min - lambda)
  // settles a point without an SVD whenever that bound already passes.
  std::optional<double> best;
  for (int k = kSteps; k >= 0; --k) {
    const double lambda = lambda_start * std::ldexp(1.0, k);
    if (!(lambda < d_min)) break;
    const double bound = w_norm / (d_min - lambda);
    const double norm = bound <= 0.5 ? bound : c1_norm_from_cache(cache, lambda);
    if (norm > 0.5) break;
    best = lambda;
  }
  if (!best) {
    std::ostringstream os;
    os << "||C1|| > 1/2 at lambda = " << lambda_start * std::ldexp(1.0, kSteps);
    fail(ErrorKind::ThresholdNotFound, os.str());
  }
  return *best;
}

double empirical_threshold(const TripleModel& model, double lambda_start, double margin) {
  return std::min(find_xi2(model, lambda_start), -model.potential_sup() - margin);
}

DecayStudy weyl_decay_study(const TripleModel& model, const std::vector<double>& lambdas) {
  DecayStudy study;
  std::vector<std::pair<double, double>> points;
  for (double lambda : lambdas) {
    WeylSample s = weyl(model, SpectralPoint::at(model, lambda));
    points.emplace_back(std::abs(lambda), s.norm);
    study.samples.push_back(std::move(s));
  }
  const LogSlopeFit fit = fit_log_slope(points);
  study.exponent = fit.slope;
  study.exponent_stderr = fit.slope_stderr;
  study.log_constant = fit.intercept;
  study.residual = fit.residual;
  return study;
}

std::vector<std::pair<double, double>> relative_bound_decay(const TripleModel& model,
                                                            const std::vector<double>& lambdas) {
  const MatrixPair mp = matrices(model);
  std::vector<std::pair<double, double>> out;
  if (max_abs(mp.v) == 0.0) {
    for (double lambda : lambdas) out.emplace_back(lambda, 0.0);
    return out;
  }
  // ||V (HN - lambda)^{-1}|| = ||V U diag(1/(d - lambda))|| since U is unitary.
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(0.5 * (mp.hn + mp.hn.adjoint()));
  if (solver.info() != Eigen::Success) fail(ErrorKind::NoConvergence, "HN eigensolve failed");
  const CMatrix vu = mp.v * solver.eigenvectors();
  for (double lambda : lambdas) {
    if (!(lambda < solver.eigenvalues().minCoeff()))
      fail(ErrorKind::InvalidArgument, "relative_bound_decay needs lambda below the spectrum of HN");
    const Eigen::VectorXd inv = (solver.eigenvalues().array() - lambda).inverse().matrix();
    out.emplace_back(lambda, spectral_norm(vu * inv.cast<Complex>().asDiagonal()));
  }
  return out;
}

}  // namespace krein
