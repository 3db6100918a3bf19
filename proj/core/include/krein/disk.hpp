#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "krein/ode.hpp"
#include "krein/potential.hpp"
#include "krein/triple.hpp"

namespace krein {

enum class DiskSide { Interior, Exterior };

struct DiskModelConfig {
  DiskSide side = DiskSide::Interior;
  /// Modes k = -k_max..k_max.
  int k_max = 16;
  /// Radial potential V(r) on (0, 1) or (1, r_cut). Exterior values beyond
  /// r_cut are ignored. Spectral accuracy needs V smooth on the disk (a
  /// smooth function of r^2 in the interior) and, outside, V vanishing to
  /// high order at r_cut; otherwise the collocation converges algebraically.
  std::optional<Potential1D> radial_potential;
  /// Gauss-Legendre nodes per mode (one boundary node is added).
  Index radial_nodes = 64;
  double r_cut = 4.0;
  /// Radial shooting tolerances when a potential is present.
  OdeOptions ode{};

  /// Throws InvalidArgument unless k_max >= 1, radial_nodes >= 8 and
  /// 1 < r_cut < inf.
  void validate() const;
};

/// -Laplace + V(r) on the unit disk or its exterior, expanded in Fourier
/// modes e^{ik theta}, |k| <= K.
///
/// A state stores 2K+1 radial blocks of radial_nodes + 1 values, block k + K
/// for mode k, boundary node last.
///   interior: u_k(r) = r^|k| q(t), t = r^2, and the block holds q at
///             Gauss-Legendre points in t and at t = 1. Then
///             T q = -4t q'' - 4(|k|+1) q' + V q,
///             Gamma1 = q(1), Gamma0 = u_r(1) = |k| q(1) + 2 q'(1).
///   exterior: r = 1 + 2(1 + x)/(1 - x), the block holds u_k at Gauss-Legendre
///             points in x and at x = -1 (r = 1), Gamma0 = -u_r(1) (the
///             exterior normal points at the origin).
/// Inner products carry the 2 pi of the angular integral. Boundary data are
/// Fourier coefficients with binner = 2 pi times the Euclidean product.
///
/// M(lambda) is diagonal. With V = 0 its entries are
///   interior m_k = I_k(s) / (s I_k'(s)),  exterior m_k = K_k(s) / (-s K_k'(s)),
/// s = sqrt(-lambda) on the principal branch, and gamma(lambda) is sampled
/// from the same closed forms. A radial potential switches both to radial
/// shooting. The Neumann resolvent is polynomial collocation per mode.
class DiskModel final : public TripleModel {
 public:
  explicit DiskModel(DiskModelConfig config);

  std::string name() const override;
  Index state_dim() const override { return modes() * block_; }
  Index boundary_dim() const override { return modes(); }

  CVector apply_T(const CVector& f) const override { return apply(f, false); }
  CVector apply_Ttilde(const CVector& g) const override { return apply(g, true); }
  CVector trace0(const CVector& f) const override;
  CVector trace1(const CVector& f) const override;
  Complex inner(const CVector& f, const CVector& g) const override;
  Complex binner(const CVector& phi, const CVector& psi) const override;
  CVector solve_bvp(Complex lambda, const CVector& g) const override { return lift(lambda, false, g); }
  CVector solve_bvp_tilde(Complex mu, const CVector& g) const override { return lift(mu, true, g); }
  CVector neumann_resolvent(Complex lambda, const CVector& f) const override { return resolve(lambda, false, f); }
  CVector neumann_resolvent_tilde(Complex mu, const CVector& f) const override { return resolve(mu, true, f); }
  std::optional<CMatrix> hn_matrix() const override { return std::nullopt; }
  std::optional<CMatrix> v_matrix() const override { return std::nullopt; }
  double certified_threshold() const override { return threshold_; }
  double potential_sup() const override { return v_sup_; }
  bool potential_is_real() const override;

  CMatrix weyl_matrix(Complex lambda) const override;
  CMatrix weyl_matrix_tilde(Complex mu) const override;

  /// Interior: random polynomial q of degree <= 6 per mode. Exterior:
  /// sum_{j=2..7} c_j r^-j per mode.
  CVector random_state(std::mt19937_64& rng) const override;

  /// m_k(lambda) for a single mode.
  Complex mode_weyl(int k, Complex lambda, bool tilde = false) const;

  const DiskModelConfig& config() const { return config_; }
  int k_max() const { return config_.k_max; }
  Index modes() const { return 2 * config_.k_max + 1; }
  /// Radius of each node of a block (boundary node last).
  const Eigen::VectorXd& radii() const { return radii_; }

 private:
  struct ModeSolution {
    CVector samples;  // block with Gamma0 = 1
    Complex weyl;
  };

  ModeSolution mode_solution(int k, Complex lambda, bool tilde) const;
  ModeSolution free_interior(int k, Complex s) const;
  ModeSolution free_exterior(int k, Complex s) const;
  ModeSolution shoot_interior(int k, Complex lambda, bool tilde) const;
  ModeSolution shoot_exterior(int k, Complex lambda, bool tilde) const;

  CVector apply(const CVector& f, bool tilde) const;
  CVector resolve(Complex lambda, bool tilde, const CVector& f) const;
  CVector lift(Complex lambda, bool tilde, const CVector& g) const;
  Complex radial_v(double r, bool tilde) const;
  OdeOptions ode_options(Complex lambda) const;

  bool interior() const { return config_.side == DiskSide::Interior; }

  DiskModelConfig config_;
  bool has_potential_ = false;
  Index block_ = 0;
  Eigen::VectorXd radii_;
  Eigen::VectorXd coords_;                  // t (interior) or x (exterior) per node
  std::vector<Eigen::VectorXd> weights_;    // quadrature weights per |k|
  std::vector<Eigen::MatrixXd> operators_;  // free radial operator per |k|
  std::vector<Eigen::RowVectorXd> neumann_rows_;
  CVector v_;  // V at the block nodes
  double v_sup_ = 0.0;
  double threshold_ = -0.5;
};

std::shared_ptr<const DiskModel> build_disk(const DiskModelConfig& config);

/// One entry B_{kj} of a boundary operator in the mode basis.
struct ModeEntry {
  int k = 0;
  int j = 0;
  Complex value;
};

/// Boundary operator on modes -k_max..k_max from its nonzero entries.
/// Throws TruncationWarning if an entry couples a mode beyond k_max.
BoundaryOperator disk_mode_operator(int k_max, std::span<const ModeEntry> entries);

/// Smallest positive Robin eigenvalue lambda = x^2 of mode k on the unit
/// disk with V = 0 and u_r = beta u on the boundary: the first root of
/// x J_k'(x) = beta J_k(x) for x in (1e-3, 100], by scan and bisection to
/// 1e-14. Throws NoRootInBracket.
double disk_robin_reference(int k, double beta);

}  // namespace krein
