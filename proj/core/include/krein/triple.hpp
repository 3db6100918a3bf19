#pragma once

#include <optional>
#include <random>
#include <string>

#include "krein/numerics.hpp"

namespace krein {

/// Discrete adjoint pair {T, T~} = {-Laplace + V, -Laplace + conj(V)} with
/// Neumann trace Gamma0 and Dirichlet trace Gamma1, both shared by T and T~.
///
/// Vectors of length state_dim() are samples of functions on the model's
/// carrier; vectors of length boundary_dim() are boundary data in a basis
/// that is orthogonal for binner(). Implementations are immutable after
/// construction and may be shared across threads.
class TripleModel {
 public:
  virtual ~TripleModel() = default;

  virtual std::string name() const = 0;
  virtual Index state_dim() const = 0;
  virtual Index boundary_dim() const = 0;

  virtual CVector apply_T(const CVector& f) const = 0;
  virtual CVector apply_Ttilde(const CVector& g) const = 0;
  virtual CVector trace0(const CVector& f) const = 0;
  virtual CVector trace1(const CVector& f) const = 0;

  /// Inner products, linear in the first argument.
  virtual Complex inner(const CVector& f, const CVector& g) const = 0;
  virtual Complex binner(const CVector& phi, const CVector& psi) const = 0;

  /// The f with (T - lambda) f = 0 and Gamma0 f = g.
  virtual CVector solve_bvp(Complex lambda, const CVector& g) const = 0;
  virtual CVector solve_bvp_tilde(Complex mu, const CVector& g) const = 0;

  /// (A0 - lambda)^{-1} f with A0 = T restricted to ker Gamma0.
  virtual CVector neumann_resolvent(Complex lambda, const CVector& f) const = 0;
  virtual CVector neumann_resolvent_tilde(Complex mu, const CVector& f) const = 0;

  /// Free Neumann operator and multiplication by V on a carrier where both
  /// are Hermitian/normal for the standard inner product. Absent for models
  /// without a matrix realization.
  virtual std::optional<CMatrix> hn_matrix() const = 0;
  virtual std::optional<CMatrix> v_matrix() const = 0;

  /// xi < 0 with (-inf, xi) inside the resolvent sets of A0 and A0~.
  virtual double certified_threshold() const = 0;

  /// Sup-norm proxy of the potential on the carrier.
  virtual double potential_sup() const = 0;
  virtual bool potential_is_real() const = 0;

  /// M(lambda) = Gamma1 gamma(lambda). The default assembles columns from
  /// solve_bvp; models with a cheaper route override it.
  virtual CMatrix weyl_matrix(Complex lambda) const;
  virtual CMatrix weyl_matrix_tilde(Complex mu) const;

  /// binner(e_i, e_i) for the boundary basis.
  virtual CVector boundary_gram() const;

  /// Random element of the carrier suitable for identity checks. The
  /// default is a vector of independent complex normals.
  virtual CVector random_state(std::mt19937_64& rng) const;
  virtual CVector random_boundary(std::mt19937_64& rng) const;

  /// Euclidean norm induced by inner().
  double norm(const CVector& f) const;
  double bnorm(const CVector& phi) const;
};

/// A spectral parameter tagged with whether it lies on the certified half
/// line of a particular model.
struct SpectralPoint {
  Complex lambda;
  bool certified = false;
  bool allow_uncertified = false;

  static SpectralPoint at(const TripleModel& model, Complex lambda);
  /// Accept lambda regardless of certification (complex-plane scans).
  static SpectralPoint unchecked(const TripleModel& model, Complex lambda);
};

/// -max(1/2, 2 ||V||_inf). Below it Re(A0 - lambda) >= |lambda| / 2 on the
/// numerical range, so both Neumann realizations are invertible, and
/// ||(HN - lambda)^{-1/2} V (HN - lambda)^{-1/2}|| <= ||V|| / |lambda| < 1/2.
double a_priori_threshold(double potential_sup);

/// True for real lambda < xi. Complex points are never certified; identity
/// checks at complex lambda go through SpectralPoint::unchecked.
bool is_certified(const TripleModel& model, Complex lambda);

/// Throws UncertifiedPoint unless the point is certified or overridden.
void require_usable(const SpectralPoint& point, const TripleModel& model);

struct BoundaryOperator {
  CMatrix matrix;

  static BoundaryOperator zero(Index dim);
  static BoundaryOperator scalar(Index dim, Complex beta);
  static BoundaryOperator diagonal(const CVector& d);
  static BoundaryOperator from_matrix(CMatrix m);
  bool is_zero() const;
};

struct WeylSample {
  Complex lambda;
  CMatrix m;
  CMatrix m_tilde_at_conj;
  double norm = 0.0;
};

CVector gamma(const TripleModel& model, const SpectralPoint& lambda, const CVector& g);
CVector gamma_tilde(const TripleModel& model, const SpectralPoint& mu, const CVector& g);

/// gamma(lambda)^* f = Gamma1~ (A0~ - conj(lambda))^{-1} f.
CVector gamma_adjoint(const TripleModel& model, const SpectralPoint& lambda, const CVector& f);
/// gamma~(mu)^* f = Gamma1 (A0 - conj(mu))^{-1} f.
CVector gamma_tilde_adjoint(const TripleModel& model, const SpectralPoint& mu, const CVector& f);

WeylSample weyl(const TripleModel& model, const SpectralPoint& lambda);

/// ||M(lambda) - M~(conj lambda)^*||.
double weyl_symmetry_defect(const TripleModel& model, const SpectralPoint& lambda);

/// ||M(lambda) - M~(mu)^* - (lambda - conj mu) G|| with
/// G_ij = <gamma(lambda) e_j, gamma~(mu) e_i> / <e_i, e_i>.
double difference_identity_defect(const TripleModel& model, const SpectralPoint& lambda,
                                  const SpectralPoint& mu);

/// ||gamma(l) g - gamma(n) g - (l - n)(A0 - l)^{-1} gamma(n) g|| / ||gamma(l) g||.
double gamma_resolvent_identity_defect(const TripleModel& model, const SpectralPoint& lambda,
                                       const SpectralPoint& nu, const CVector& g);

/// |(Tf, g) - (f, T~g) - (Gamma1 f, Gamma0 g) + (Gamma0 f, Gamma1 g)|.
double green_defect(const TripleModel& model, const CVector& f, const CVector& g);

/// Normalisation for green_defect: ||f||_T ||g||_T~ with
/// ||f||_T^2 = ||f||^2 + ||Tf||^2 + ||Gamma0 f||^2 + ||Gamma1 f||^2.
double green_scale(const TripleModel& model, const CVector& f, const CVector& g);

}  // namespace krein
