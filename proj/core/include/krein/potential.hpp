#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "krein/numerics.hpp"

namespace krein {

/// A complex potential on a real interval. The interval is implied by the
/// consumer (the 1D models use [0, L]; the disk uses a radial interval).
///
/// A power singularity c |x - x0|^(-alpha) is declared together with the
/// integrability exponent p it is meant to satisfy; alpha * p < 1 keeps it in
/// L^p and is enforced at construction.
class Potential1D {
 public:
  enum class Kind { Zero, Constant, Smooth, PowerSingularity, Table };

  static Potential1D zero();
  static Potential1D constant(Complex value);
  /// `real` declares that fn takes real values only (enables the real-V
  /// shortcuts); it is not checked.
  static Potential1D smooth(std::function<Complex(double)> fn, std::string label, bool real = false);
  /// Complex polynomial sum_k coeffs[k] x^k (the config-file form of a
  /// smooth potential).
  static Potential1D polynomial(std::vector<Complex> coeffs);
  static Potential1D power_singularity(Complex c, double x0, double alpha, double p);
  /// Piecewise constant on `values.size()` equal cells of [a, b].
  static Potential1D table(std::vector<Complex> values, double a, double b);

  Kind kind() const { return kind_; }
  const std::string& label() const { return label_; }
  bool is_zero() const { return kind_ == Kind::Zero; }
  bool is_real() const { return real_; }

  /// Pointwise value. At the singular point of a power singularity this is
  /// +inf scaled by c; integrators must avoid evaluating there.
  Complex value(double x) const;

  /// (1/(b-a)) * integral of V over [a, b], by adaptive Gauss-Kronrod with
  /// the singular point (if any) placed on a subinterval endpoint.
  Complex cell_average(double a, double b) const;

  /// Cell averages over `cells` equal cells of [a, b].
  std::vector<Complex> cell_averages(double a, double b, Index cells) const;

  /// Potential with V replaced by conj(V).
  Potential1D conjugate() const;

  /// Singularity data (only meaningful for Kind::PowerSingularity).
  double singular_point() const { return x0_; }
  double exponent() const { return alpha_; }
  Complex strength() const { return c_; }

 private:
  Potential1D() = default;

  Kind kind_ = Kind::Zero;
  std::string label_ = "zero";
  bool real_ = true;
  Complex c_{0.0, 0.0};
  double x0_ = 0.0;
  double alpha_ = 0.0;
  double p_ = 0.0;
  double table_a_ = 0.0;
  double table_b_ = 1.0;
  std::shared_ptr<const std::vector<Complex>> table_;
  std::function<Complex(double)> fn_;
  bool conjugated_ = false;
};

/// Adaptive 7/15-point Gauss-Kronrod quadrature of a complex integrand on
/// [a, b] to relative tolerance `rtol`. Integrable endpoint singularities
/// are fine; the integrand is never evaluated at a or b.
Complex integrate_adaptive(const std::function<Complex(double)>& fn, double a, double b, double rtol,
                           int max_intervals = 4000);

}  // namespace krein
