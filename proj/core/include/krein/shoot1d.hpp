#pragma once

#include <memory>
#include <vector>

#include "krein/fd1d.hpp"
#include "krein/ode.hpp"
#include "krein/potential.hpp"
#include "krein/triple.hpp"

namespace krein {

struct ShootConfig {
  double length = 1.0;
  Potential1D potential = Potential1D::zero();
  double rtol = 1e-11;
  double atol = 1e-12;
  /// Step cap at |lambda| <= 1; larger |lambda| divides it by sqrt|lambda|.
  double max_step = 0.05;
  /// Gauss-Lobatto collocation nodes of the carrier used for inner products
  /// and the Neumann resolvent.
  Index carrier_nodes = 97;
  /// Grid of the internal fd1d model behind hn_matrix / v_matrix.
  Index matrix_nodes = 512;

  /// Throws InvalidArgument unless rtol, atol in (1e-13, 1e-3), L > 0,
  /// max_step > 0 and both grids have at least 16 nodes.
  void validate() const;
};

enum class ShootDirection { Forward, Backward };

struct IvpSolution {
  std::vector<double> x;
  std::vector<Complex> f;
  std::vector<Complex> df;
  Complex f_end;
  Complex df_end;
  long steps = 0;
};

/// Integrates -f'' + V f = lambda f from x_start to L (Forward) or to 0
/// (Backward), sampling at `outputs` (any order, inside the range).
///
/// A power singularity at x0 is replaced by its average over
/// [x0 - delta, x0 + delta], delta = 1e-6 L; both ends are breakpoints. The
/// jump in f' across the singular point is then exact to first order and the
/// remaining error is O(delta^(2 - alpha)).
IvpSolution solve_ivp_schrodinger(const ShootConfig& config, Complex lambda, double x_start, Complex f0,
                                  Complex df0, ShootDirection direction, std::span<const double> outputs = {});

/// Continuum realization on [0, L]: Weyl function from two shooting
/// solutions, everything else on a Legendre-Gauss-Lobatto collocation
/// carrier x_0 = 0 < ... < x_N = L.
///
/// A state is the value vector of its degree-N interpolant p. T p = -p'' + V p
/// at the nodes, Gamma0 = (-p'(0), p'(L)), Gamma1 = (p(0), p(L)), and the
/// inner product is the Lobatto rule. The rule integrates p'' conj(q) exactly,
/// so the Green identity holds for every state to rounding.
///
/// psi_R solves with psi_R(L) = 1, psi_R'(L) = 0 and psi_L with
/// psi_L(0) = 1, psi_L'(0) = 0, so
///   M = [ -psi_R(0)/psi_R'(0)   1/psi_L'(L)        ]
///       [ -1/psi_R'(0)          psi_L(L)/psi_L'(L) ].
class Shoot1dModel final : public TripleModel {
 public:
  explicit Shoot1dModel(ShootConfig config);

  std::string name() const override { return "shoot1d"; }
  Index state_dim() const override { return nodes_.size(); }
  Index boundary_dim() const override { return 2; }

  CVector apply_T(const CVector& f) const override { return apply(f, false); }
  CVector apply_Ttilde(const CVector& g) const override { return apply(g, true); }
  CVector trace0(const CVector& f) const override;
  CVector trace1(const CVector& f) const override;
  Complex inner(const CVector& f, const CVector& g) const override;
  Complex binner(const CVector& phi, const CVector& psi) const override { return psi.dot(phi); }
  CVector solve_bvp(Complex lambda, const CVector& g) const override;
  CVector solve_bvp_tilde(Complex mu, const CVector& g) const override;
  CVector neumann_resolvent(Complex lambda, const CVector& f) const override;
  CVector neumann_resolvent_tilde(Complex mu, const CVector& f) const override;
  std::optional<CMatrix> hn_matrix() const override { return matrices_->hn_matrix(); }
  std::optional<CMatrix> v_matrix() const override { return matrices_->v_matrix(); }
  double certified_threshold() const override { return threshold_; }
  double potential_sup() const override { return v_sup_; }
  bool potential_is_real() const override { return config_.potential.is_real(); }

  CMatrix weyl_matrix(Complex lambda) const override;
  CMatrix weyl_matrix_tilde(Complex mu) const override;

  /// Random smooth state: a short random trigonometric sum, so collocated
  /// residuals measure the method rather than the interpolation of noise.
  CVector random_state(std::mt19937_64& rng) const override;

  const ShootConfig& config() const { return config_; }
  const Eigen::VectorXd& nodes() const { return nodes_; }

 private:
  struct Endpoints {
    Complex right_at_0, dright_at_0;  // psi_R(0), psi_R'(0)
    Complex left_at_L, dleft_at_L;    // psi_L(L), psi_L'(L)
  };

  Endpoints endpoints(Complex lambda, bool tilde) const;
  CMatrix weyl_from(const Endpoints& e, Complex lambda) const;
  CVector gamma_samples(Complex lambda, bool tilde, const CVector& g) const;
  CVector apply(const CVector& f, bool tilde) const;
  CVector resolve(Complex lambda, bool tilde, const CVector& f) const;

  ShootConfig config_;
  ShootConfig tilde_config_;
  std::shared_ptr<const Fd1dModel> matrices_;
  Eigen::VectorXd nodes_;
  Eigen::VectorXd weights_;
  Eigen::MatrixXd d1_;
  Eigen::MatrixXd d2_;
  CVector v_;
  std::vector<double> interior_;
  double v_sup_ = 0.0;
  double threshold_ = -1.0;
};

std::shared_ptr<const Shoot1dModel> build_shoot1d(const ShootConfig& config);

}  // namespace krein
