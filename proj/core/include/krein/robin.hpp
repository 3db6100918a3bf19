#pragma once

#include <vector>

#include "krein/triple.hpp"

namespace krein {

/// (A_B - lambda)^{-1} f = (A0 - lambda)^{-1} f
///                         + gamma(lambda) (I - B M(lambda))^{-1} B gamma~(conj lambda)^* f.
/// Throws BirmanSchwingerSingular when sigma_min(I - B M(lambda)) <= 1e-10.
CVector krein_resolvent(const TripleModel& model, const BoundaryOperator& b, const SpectralPoint& lambda,
                        const CVector& f);

/// The same formula for the tilded pair.
CVector krein_resolvent_tilde(const TripleModel& model, const BoundaryOperator& b, const SpectralPoint& mu,
                              const CVector& g);

/// sigma_min(I - B M(lambda)). Vanishes exactly at eigenvalues of A_B.
double bs_indicator(const TripleModel& model, const BoundaryOperator& b, Complex lambda);

/// det(I - B M(lambda)), holomorphic in lambda away from the Neumann spectrum.
Complex bs_determinant(const TripleModel& model, const BoundaryOperator& b, Complex lambda);

/// gamma(lambda) applied to an orthonormal basis of the numerical kernel of
/// I - B M(lambda). Throws NotAnEigenvalue when the indicator exceeds 1e-8.
std::vector<CVector> bs_kernel_lift(const TripleModel& model, const BoundaryOperator& b, Complex lambda);

struct Region {
  double re_min = 0.0, re_max = 0.0, im_min = 0.0, im_max = 0.0;
  bool contains(Complex z) const {
    return z.real() >= re_min && z.real() <= re_max && z.imag() >= im_min && z.imag() <= im_max;
  }
  bool operator==(const Region&) const = default;
};

struct ScanGrid {
  Index re_points = 41;
  Index im_points = 17;
  bool operator==(const ScanGrid&) const = default;
};

struct RobinEigsOptions {
  double indicator_threshold = 0.1;
  double merge_radius = 1e-7;
};

struct RobinEigsResult {
  std::vector<Complex> eigenvalues;  // sorted by (Re, Im)
  std::vector<Complex> skipped;      // grid nodes where M(lambda) was not computable
  Index candidates = 0;
};

/// Scans sigma_min(I - B M) on a grid over the region, refines local minima
/// below the threshold by Newton on det(I - B M), then polishes on the
/// eigenvalue of I - B M(lambda) closest to zero (which also resolves roots
/// of even multiplicity in det).
RobinEigsResult robin_eigs(const TripleModel& model, const BoundaryOperator& b, const Region& region,
                           const ScanGrid& grid, const RobinEigsOptions& options = {});

/// Residuals of a candidate resolvent solution u of (A_B - lambda) u = f.
struct RobinResidual {
  double pde = 0.0;       // ||(T - lambda) u - f|| / (||f|| (1 + |lambda|))
  double boundary = 0.0;  // ||B Gamma1 u - Gamma0 u|| / ||u||
};

RobinResidual robin_residual(const TripleModel& model, const BoundaryOperator& b, Complex lambda,
                             const CVector& u, const CVector& f);

}  // namespace krein
