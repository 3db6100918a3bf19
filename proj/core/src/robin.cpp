#include "krein/robin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/SVD>
#include <spdlog/spdlog.h>

#include "krein/errors.hpp"

namespace krein {

namespace {

constexpr double kSingularTolerance = 1e-10;

void check_operator(const TripleModel& model, const BoundaryOperator& b) {
  const Index d = model.boundary_dim();
  if (b.matrix.rows() != d || b.matrix.cols() != d)
    fail(ErrorKind::InvalidArgument, "boundary operator must be " + std::to_string(d) + "x" + std::to_string(d));
  require_finite(b.matrix, "boundary operator");
}

std::string describe(Complex z) {
  std::ostringstream os;
  os << "(" << z.real() << ", " << z.imag() << ")";
  return os.str();
}

CMatrix bs_matrix(const CMatrix& b, const CMatrix& m) {
  return CMatrix::Identity(b.rows(), b.cols()) - b * m;
}

CMatrix weyl_or_fail(const TripleModel& model, Complex lambda, bool tilde) {
  try {
    return tilde ? model.weyl_matrix_tilde(lambda) : model.weyl_matrix(lambda);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::SingularMatrix || e.kind() == ErrorKind::MatchingSingular)
      fail(ErrorKind::BvpSolveFailure, std::string("Weyl function evaluation failed: ") + e.what());
    throw;
  }
}

// Shared body of the two Krein formulas; `tilde` selects the pair.
CVector krein_apply(const TripleModel& model, const BoundaryOperator& b, const SpectralPoint& point,
                    const CVector& f, bool tilde) {
  require_usable(point, model);
  check_operator(model, b);
  if (f.size() != model.state_dim()) fail(ErrorKind::InvalidArgument, "krein_resolvent: state length mismatch");
  require_finite(f, "right-hand side");
  const Complex lambda = point.lambda;
  CVector r0;
  try {
    r0 = tilde ? model.neumann_resolvent_tilde(lambda, f) : model.neumann_resolvent(lambda, f);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::SingularMatrix)
      fail(ErrorKind::BvpSolveFailure, std::string("Neumann resolvent failed: ") + e.what());
    throw;
  }
  if (b.is_zero()) return r0;
  const CMatrix m = weyl_or_fail(model, lambda, tilde);
  const CMatrix a = bs_matrix(b.matrix, m);
  const double sigma = smallest_singular_value(a);
  if (sigma <= kSingularTolerance)
    fail(ErrorKind::BirmanSchwingerSingular, "sigma_min(I - BM) = " + std::to_string(sigma) +
                                                 " at lambda = " + describe(lambda));
  const CVector w = model.trace1(r0);
  const CVector phi = solve_linear(a, CVector(b.matrix * w));
  const CVector lift = tilde ? model.solve_bvp_tilde(lambda, phi) : model.solve_bvp(lambda, phi);
  return r0 + lift;
}

struct EigenBranch {
  Complex value;
  bool ok = false;
};

EigenBranch nearest_eigenvalue(const TripleModel& model, const CMatrix& b, Complex lambda, Complex target) {
  try {
    const CVector ev = eig_dense(bs_matrix(b, model.weyl_matrix(lambda)));
    Index best = 0;
    for (Index i = 1; i < ev.size(); ++i)
      if (std::abs(ev(i) - target) < std::abs(ev(best) - target)) best = i;
    return {ev(best), true};
  } catch (const Error&) {
    return {};
  }
}

// Newton on the eigenvalue branch of I - BM(lambda) that passes closest to 0.
std::optional<Complex> polish_on_branch(const TripleModel& model, const CMatrix& b, Complex z) {
  for (int it = 0; it < 40; ++it) {
    const EigenBranch e = nearest_eigenvalue(model, b, z, 0.0);
    if (!e.ok) return std::nullopt;
    const double h = 1e-6 * std::max(1.0, std::abs(z));
    const EigenBranch ep = nearest_eigenvalue(model, b, z + h, e.value);
    const EigenBranch em = nearest_eigenvalue(model, b, z - h, e.value);
    if (!ep.ok || !em.ok) return std::nullopt;
    const Complex slope = (ep.value - em.value) / (2.0 * h);
    if (slope == Complex{} || !std::isfinite(std::abs(slope))) return std::nullopt;
    const Complex step = e.value / slope;
    z -= step;
    if (std::abs(step) <= 1e-14 * std::max(1.0, std::abs(z))) break;
  }
  const EigenBranch final_value = nearest_eigenvalue(model, b, z, 0.0);
  if (!final_value.ok || std::abs(final_value.value) > 1e-9) return std::nullopt;
  return z;
}

/// Newton on 1/f from z0. Landing on the pole itself (f not computable)
/// counts as convergence. Gives up beyond 3 cells from z0.
std::optional<Complex> locate_pole(const ComplexFn& f, Complex z0, double cell) {
  Complex z = z0;
  for (int it = 0; it < 60; ++it) {
    const double h = 1e-7 * std::max(1.0, std::abs(z));
    Complex q, slope;
    try {
      q = 1.0 / f(z);
      slope = (1.0 / f(z + h) - 1.0 / f(z - h)) / (2.0 * h);
    } catch (const Error&) {
      return z;
    }
    if (slope == Complex{} || !std::isfinite(std::abs(slope)) || !std::isfinite(std::abs(q))) return std::nullopt;
    const Complex step = q / slope;
    z -= step;
    if (std::abs(z - z0) > 3.0 * cell) return std::nullopt;
    if (std::abs(step) <= 1e-13 * std::max(1.0, std::abs(z))) return z;
  }
  return std::nullopt;
}

}  // namespace

CVector krein_resolvent(const TripleModel& model, const BoundaryOperator& b, const SpectralPoint& lambda,
                        const CVector& f) {
  return krein_apply(model, b, lambda, f, false);
}

CVector krein_resolvent_tilde(const TripleModel& model, const BoundaryOperator& b, const SpectralPoint& mu,
                              const CVector& g) {
  return krein_apply(model, b, mu, g, true);
}

double bs_indicator(const TripleModel& model, const BoundaryOperator& b, Complex lambda) {
  check_operator(model, b);
  if (b.is_zero()) return 1.0;
  return smallest_singular_value(bs_matrix(b.matrix, weyl_or_fail(model, lambda, false)));
}

Complex bs_determinant(const TripleModel& model, const BoundaryOperator& b, Complex lambda) {
  check_operator(model, b);
  return bs_matrix(b.matrix, weyl_or_fail(model, lambda, false)).determinant();
}

std::vector<CVector> bs_kernel_lift(const TripleModel& model, const BoundaryOperator& b, Complex lambda) {
  check_operator(model, b);
  const CMatrix a = bs_matrix(b.matrix, weyl_or_fail(model, lambda, false));
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeFullV);
  const Eigen::VectorXd& sigma = svd.singularValues();
  if (sigma(sigma.size() - 1) > 1e-8)
    fail(ErrorKind::NotAnEigenvalue, "sigma_min(I - BM) = " + std::to_string(sigma(sigma.size() - 1)) +
                                         " at lambda = " + describe(lambda));
  std::vector<CVector> lifted;
  for (Index j = 0; j < sigma.size(); ++j) {
    if (sigma(j) > 1e-6) continue;
    CVector u = model.solve_bvp(lambda, svd.matrixV().col(j));
    const double n = model.norm(u);
    if (n > 0.0) u /= n;
    lifted.push_back(std::move(u));
  }
  return lifted;
}

RobinEigsResult robin_eigs(const TripleModel& model, const BoundaryOperator& b, const Region& region,
                           const ScanGrid& grid, const RobinEigsOptions& options) {
  check_operator(model, b);
  if (grid.re_points < 1 || grid.im_points < 1) fail(ErrorKind::InvalidArgument, "robin_eigs: empty grid");
  if (!(region.re_max >= region.re_min) || !(region.im_max >= region.im_min))
    fail(ErrorKind::InvalidArgument, "robin_eigs: malformed region");
  RobinEigsResult result;
  if (b.is_zero()) return result;

  const Index nr = grid.re_points, ni = grid.im_points;
  auto node = [&](Index i, Index j) {
    const double re = nr == 1 ? 0.5 * (region.re_min + region.re_max)
                              : region.re_min + (region.re_max - region.re_min) * static_cast<double>(i) /
                                                    static_cast<double>(nr - 1);
    const double im = ni == 1 ? 0.5 * (region.im_min + region.im_max)
                              : region.im_min + (region.im_max - region.im_min) * static_cast<double>(j) /
                                                    static_cast<double>(ni - 1);
    return Complex(re, im);
  };
  constexpr double kInf = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd values = Eigen::MatrixXd::Constant(nr, ni, kInf);
  Eigen::MatrixXd bm_norm = Eigen::MatrixXd::Zero(nr, ni);
  for (Index i = 0; i < nr; ++i) {
    for (Index j = 0; j < ni; ++j) {
      const Complex z = node(i, j);
      try {
        const CMatrix bm = b.matrix * model.weyl_matrix(z);
        values(i, j) = smallest_singular_value(CMatrix::Identity(bm.rows(), bm.cols()) - bm);
        bm_norm(i, j) = spectral_norm(bm);
      } catch (const Error& e) {
        spdlog::debug("robin_eigs: skipping grid node {}: {}", describe(z), e.what());
        result.skipped.push_back(z);
      }
    }
  }

  // +1 for a strict local minimum of `v` (sign -1: maximum) over the 8 neighbours.
  auto is_extremum = [&](const Eigen::MatrixXd& v, Index i, Index j, double sign) {
    for (Index di = -1; di <= 1; ++di)
      for (Index dj = -1; dj <= 1; ++dj) {
        const Index a = i + di, c = j + dj;
        if ((di == 0 && dj == 0) || a < 0 || a >= nr || c < 0 || c >= ni) continue;
        if (sign * v(a, c) < sign * v(i, j)) return false;
      }
    return true;
  };
  const ComplexFn det = [&](Complex x) { return bs_matrix(b.matrix, model.weyl_matrix(x)).determinant(); };
  const double cell = std::max((region.re_max - region.re_min) / static_cast<double>(std::max<Index>(nr - 1, 1)),
                               (region.im_max - region.im_min) / static_cast<double>(std::max<Index>(ni - 1, 1)));

  const double dre = nr > 1 ? (region.re_max - region.re_min) / static_cast<double>(nr - 1) : 0.0;
  const double dim = ni > 1 ? (region.im_max - region.im_min) / static_cast<double>(ni - 1) : 0.0;
  auto subgrid_minimum = [&](Complex centre) {
    std::pair<double, Complex> best{kInf, centre};
    for (int a = -4; a <= 4; ++a)
      for (int c = -4; c <= 4; ++c) {
        const Complex z = centre + Complex(dre * a / 4.0, dim * c / 4.0);
        try {
          const double v = smallest_singular_value(bs_matrix(b.matrix, model.weyl_matrix(z)));
          if (v < best.first) best = {v, z};
        } catch (const Error&) {
        }
      }
    return best;
  };

  std::vector<Complex> roots;
  auto refine = [&](const ComplexFn& fn, Complex z0, double tol) {
    Complex z = z0;
    try {
      z = complex_newton(fn, std::nullopt, z0, tol).root;
    } catch (const Error& e) {
      spdlog::debug("robin_eigs: determinant Newton from {} failed: {}", describe(z0), e.what());
    }
    const std::optional<Complex> polished = polish_on_branch(model, b.matrix, z);
    if (!polished) {
      spdlog::debug("robin_eigs: candidate near {} did not converge", describe(z0));
      return;
    }
    if (region.contains(*polished)) roots.push_back(*polished);
  };

  for (Index i = 0; i < nr; ++i) {
    for (Index j = 0; j < ni; ++j) {
      Complex z0 = node(i, j);
      bool candidate = values(i, j) < options.indicator_threshold && is_extremum(values, i, j, 1.0);
      // A shallow minimum may hide a root between nodes: resample its cell.
      if (!candidate && values(i, j) < 5.0 * options.indicator_threshold && is_extremum(values, i, j, 1.0)) {
        const auto [best, at] = subgrid_minimum(z0);
        if (best < options.indicator_threshold) {
          candidate = true;
          z0 = at;
        }
      }
      if (candidate) {
        ++result.candidates;
        double scale = 1.0;
        try {
          scale = std::pow(std::max(1.0, spectral_norm(b.matrix * model.weyl_matrix(z0))),
                           static_cast<double>(b.matrix.rows()));
        } catch (const Error&) {
        }
        refine(det, z0, 1e-9 * scale);
      }
      // A root within a cell of a pole of M cancels against it on the grid,
      // so sigma_min shows no dip there. Locate the pole p as a zero of
      // 1/det and search (lambda - p) det(I - BM) around it.
      if (bm_norm(i, j) > 1.0 && is_extremum(bm_norm, i, j, -1.0)) {
        ++result.candidates;
        const std::optional<Complex> p = locate_pole(det, node(i, j), cell);
        if (!p) continue;
        const ComplexFn deflated = [&](Complex x) { return (x - *p) * det(x); };
        for (const Complex dir : {Complex(1.0, 0.0), Complex(0.0, 1.0), Complex(-1.0, 0.0), Complex(0.0, -1.0)}) {
          const Complex start = *p + 0.25 * cell * dir;
          try {
            refine(deflated, start, 1e-10 * std::max(1.0, std::abs(deflated(start))));
          } catch (const Error& e) {
            spdlog::debug("robin_eigs: deflated search from {} failed: {}", describe(start), e.what());
          }
        }
      }
    }
  }
  result.eigenvalues = sort_and_merge(std::move(roots), options.merge_radius);
  return result;
}

RobinResidual robin_residual(const TripleModel& model, const BoundaryOperator& b, Complex lambda,
                             const CVector& u, const CVector& f) {
  RobinResidual r;
  const double fn = model.norm(f);
  const CVector pde = model.apply_T(u) - lambda * u - f;
  r.pde = fn > 0.0 ? model.norm(pde) / (fn * (1.0 + std::abs(lambda))) : model.norm(pde);
  const double un = model.norm(u);
  const CVector bc = b.matrix * model.trace1(u) - model.trace0(u);
  r.boundary = un > 0.0 ? model.bnorm(bc) / un : model.bnorm(bc);
  return r;
}

}  // namespace krein
