#pragma once

#include <memory>

#include "krein/potential.hpp"
#include "krein/triple.hpp"

namespace krein {

/// Cell-centred grid on [0, L] with one ghost node past each end.
///
/// Node j sits at x_j = (j - 1/2) h with h = L / (n - 2), so nodes 1..n-2
/// are the interior cell centres and the half-nodes x = 0, x = L fall
/// midway between a ghost and its neighbour.
struct FdGrid {
  Index n = 0;
  double length = 1.0;
  double h = 0.0;
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;  // h on interior nodes, 0 on the ghosts
};

FdGrid make_fd_grid(Index n, double length);

/// Second-order finite-difference realization of the triple on [0, L].
///
/// Traces live on the half-nodes:
///   Gamma1 f = ((f_0 + f_1)/2, (f_{n-2} + f_{n-1})/2)
///   Gamma0 f = ((f_0 - f_1)/h, (f_{n-1} - f_{n-2})/h)
/// With D_j = f_j conj(g_{j+1}) - f_{j+1} conj(g_j), summing the interior
/// stencil by parts gives
///   (Tf, g) - (f, T~g) = (D_{n-2} - D_0) / h,
/// the V terms cancelling node by node. Expanding the boundary form
/// Gamma1 f conj(Gamma0 g) - Gamma0 f conj(Gamma1 g) gives -D_0/h at the
/// left end and D_{n-2}/h at the right, so the discrete Green identity
/// holds to rounding.
class Fd1dModel final : public TripleModel {
 public:
  Fd1dModel(Index n, double length, Potential1D potential);

  std::string name() const override { return "fd1d"; }
  Index state_dim() const override { return grid_.n; }
  Index boundary_dim() const override { return 2; }

  CVector apply_T(const CVector& f) const override;
  CVector apply_Ttilde(const CVector& g) const override;
  CVector trace0(const CVector& f) const override;
  CVector trace1(const CVector& f) const override;
  Complex inner(const CVector& f, const CVector& g) const override;
  Complex binner(const CVector& phi, const CVector& psi) const override;
  CVector solve_bvp(Complex lambda, const CVector& g) const override;
  CVector solve_bvp_tilde(Complex mu, const CVector& g) const override;
  CVector neumann_resolvent(Complex lambda, const CVector& f) const override;
  CVector neumann_resolvent_tilde(Complex mu, const CVector& f) const override;
  std::optional<CMatrix> hn_matrix() const override;
  std::optional<CMatrix> v_matrix() const override;
  double certified_threshold() const override { return threshold_; }
  double potential_sup() const override { return v_sup_; }
  bool potential_is_real() const override { return potential_.is_real(); }

  const FdGrid& grid() const { return grid_; }
  const Potential1D& potential() const { return potential_; }
  /// Cell averages of V on the interior cells, length n - 2.
  const CVector& cell_potential() const { return v_; }

  /// Matrices of A0 and A0~ on the interior nodes after eliminating the
  /// ghosts through Gamma0 f = 0.
  CMatrix neumann_matrix() const;
  CMatrix neumann_matrix_tilde() const;

  /// Solution samples of (T - lambda) f = 0 on the interior with the given
  /// ghost-row data; exposed for the shooting model's resolvent.
  CVector solve_system(Complex lambda, bool tilde, const CVector& rhs) const;

 private:
  CVector apply(const CVector& f, bool tilde) const;

  FdGrid grid_;
  Potential1D potential_;
  CVector v_;
  double v_sup_ = 0.0;
  double threshold_ = -1.0;
};

std::shared_ptr<const Fd1dModel> build_fd1d(Index n, double length, const Potential1D& potential);

/// Matrix of A_B on the interior nodes: the ghosts are eliminated through
/// the Robin constraint B Gamma1 f = Gamma0 f.
CMatrix dense_robin_matrix(const Fd1dModel& model, const CMatrix& b);

/// The Dirichlet limit (Gamma1 f = 0) of dense_robin_matrix.
CMatrix dense_dirichlet_matrix(const Fd1dModel& model);

/// The interior block of a carrier vector.
CVector interior(const Fd1dModel& model, const CVector& f);

}  // namespace krein
